#pragma once

// Perversity index: worst heterogeneous-equilibrium welfare over the best
// all-selfish equilibrium welfare. Values below one mean the altruists make
// the equilibrium outcome worse.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "altperv/equilibrium.hpp"
#include "altperv/game.hpp"

namespace altperv {

/// The best all-selfish equilibrium welfare is zero, so the ratio is undefined.
class DivisionByZeroWelfare : public std::domain_error {
 public:
  explicit DivisionByZeroWelfare(const PayoffMatrix& m)
      : std::domain_error("DivisionByZeroWelfare: best all-selfish equilibrium welfare is zero"),
        matrix_(m) {}
  const PayoffMatrix& matrix() const noexcept { return matrix_; }

 private:
  PayoffMatrix matrix_;
};

class NotPrisonersDilemma : public std::invalid_argument {
 public:
  NotPrisonersDilemma()
      : std::invalid_argument("NotPrisonersDilemma: payoffs must satisfy S < P < R < T") {}
};

struct PerversityReport {
  double pi = 1.0;
  EquilibriumPoint worst_hetero;
  EquilibriumPoint best_selfish;
  double worst_welfare = 0.0;
  double best_selfish_welfare = 0.0;
};

namespace detail {

struct Extremum {
  EquilibriumPoint point;
  double welfare = 0.0;
};

// Interval components are handled analytically: the quadratic attains its
// extremum at an endpoint or at the vertex when the vertex is inside.
inline Extremum welfare_extremum(const EquilibriumSet& set, const PayoffMatrix& m, bool minimize) {
  const auto w = WelfareCoefficients::of(m);
  std::optional<Extremum> best;
  auto offer = [&](const EquilibriumPoint& p) {
    const double value = w(p.u);
    if (!best || (minimize ? value < best->welfare : value > best->welfare))
      best = Extremum{p, value};
  };
  for (const auto& p : set.points) offer(p);
  for (const auto& iv : set.intervals) {
    offer(iv.at(iv.lo));
    offer(iv.at(iv.hi));
    if (auto v = w.vertex(); v && *v > iv.lo && *v < iv.hi) offer(iv.at(*v));
  }
  if (!best) throw std::logic_error("welfare extremum over an empty equilibrium set");
  return *best;
}

}  // namespace detail

/// Welfare at or below this magnitude counts as zero in the denominator.
inline constexpr double kZeroWelfare = 1e-12;

inline PerversityReport perversity_index(const GameInstance& g) {
  const auto worst = detail::welfare_extremum(enumerate_equilibria(g), g.matrix(), true);
  const auto best = detail::welfare_extremum(all_selfish_equilibria(g), g.matrix(), false);
  if (std::abs(best.welfare) <= kZeroWelfare) throw DivisionByZeroWelfare(g.matrix());
  return {worst.welfare / best.welfare, worst.point, best.point, worst.welfare, best.welfare};
}

enum class PdBranch { ConvexBelow, ConvexAbove, ConcaveBelow, ConcaveAbove, AffineDelta };

inline const char* to_string(PdBranch b) {
  switch (b) {
    case PdBranch::ConvexBelow: return "ConvexBelow";
    case PdBranch::ConvexAbove: return "ConvexAbove";
    case PdBranch::ConcaveBelow: return "ConcaveBelow";
    case PdBranch::ConcaveAbove: return "ConcaveAbove";
    case PdBranch::AffineDelta: return "AffineDelta";
  }
  return "?";
}

inline bool is_prisoners_dilemma(const PayoffMatrix& m) {
  return m.S < m.P && m.P < m.R && m.R < m.T;
}

struct PDClassification {
  bool is_pd = false;
  PdBranch branch = PdBranch::AffineDelta;
  std::optional<double> threshold;  // u*_a, absent on the affine branch
};

inline PDClassification classify_pd(const GameInstance& g) {
  const PayoffMatrix& m = g.matrix();
  PDClassification out;
  out.is_pd = is_prisoners_dilemma(m);
  const Curvature c = classify_curvature(m);
  if (c == Curvature::Affine) return out;
  out.threshold = interior_equilibrium(AgentType::Altruistic, m)->u;
  const bool below = g.p_a() < *out.threshold;
  if (c == Curvature::StrictlyConvex)
    out.branch = below ? PdBranch::ConvexBelow : PdBranch::ConvexAbove;
  else
    out.branch = below ? PdBranch::ConcaveBelow : PdBranch::ConcaveAbove;
  return out;
}

/// Perversity index of a Prisoner's Dilemma in closed form. Selfish agents
/// always defect, so the denominator is W(0) = P and only the altruists'
/// choice among {0, u*_a, p_a} matters.
inline double pd_closed_form_pi(const GameInstance& g) {
  const PayoffMatrix& m = g.matrix();
  if (!is_prisoners_dilemma(m)) throw NotPrisonersDilemma();
  const auto w = WelfareCoefficients::of(m);
  const double p = g.p_a();
  const double all_cooperate = (w.delta * p * p + w.beta * p) / m.P + 1.0;
  const double at_vertex = 1.0 - w.beta * w.beta / (4.0 * m.P * w.delta);

  const auto cls = classify_pd(g);
  switch (cls.branch) {
    case PdBranch::AffineDelta:
      return all_cooperate;
    case PdBranch::ConcaveBelow:
      return all_cooperate;
    case PdBranch::ConcaveAbove:
      return at_vertex;
    case PdBranch::ConvexBelow:
      return 1.0;
    case PdBranch::ConvexAbove:
      // u*_a < 0 means beta > 0: the welfare gradient is positive on [0, 1],
      // altruists always cooperate and there is no interior minimum to fall into.
      return *cls.threshold < 0.0 ? all_cooperate : at_vertex;
  }
  return all_cooperate;
}

}  // namespace altperv
