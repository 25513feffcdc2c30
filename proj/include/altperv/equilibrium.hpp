#pragma once

// Exact Nash equilibrium enumeration for the heterogeneous game, plus a
// brute-force grid oracle used to cross-check it.
//
// Both types see payoffs that depend on the state only through u, so the set
// of cooperator masses a type accepts at a fixed u is {0}, {p}, or [0, p]
// depending on the sign of its payoff difference there. Equilibrium levels
// are therefore confined to the corner sums {0, p_a, p_s, 1} and the two
// indifference points, unless a type is indifferent everywhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "altperv/game.hpp"

namespace altperv {

enum class Play { AllDefect, Interior, AllCooperate };

inline const char* to_string(Play p) {
  switch (p) {
    case Play::AllDefect: return "AllDefect";
    case Play::Interior: return "Interior";
    case Play::AllCooperate: return "AllCooperate";
  }
  return "?";
}

/// Closed range of cooperator masses.
struct MassRange {
  double lo = 0.0;
  double hi = 0.0;

  bool singleton() const { return hi - lo <= tol::kMass; }
};

struct EquilibriumPoint {
  double u = 0.0;
  double witness_x_a = 0.0;
  double witness_x_s = 0.0;
  Play kind_a = Play::AllDefect;
  Play kind_s = Play::AllDefect;
  /// Every altruist mass x_a in this range, paired with x_s = u - x_a, is an
  /// equilibrium realizing u. A singleton unless both types are indifferent.
  MassRange altruist_witnesses;

  PopulationState witness() const { return {witness_x_a, witness_x_s}; }
};

/// A continuum of equilibrium levels [lo, hi]. Only arises when some type is
/// indifferent at every u; the other type's admissible range is then fixed.
struct EquilibriumInterval {
  double lo = 0.0;
  double hi = 0.0;
  Play kind_a = Play::Interior;
  Play kind_s = Play::Interior;
  MassRange altruist;
  MassRange selfish;

  /// A witness state realizing u, for u in [lo, hi].
  EquilibriumPoint at(double u) const {
    u = std::clamp(u, lo, hi);
    const double x_a = std::clamp(u - selfish.hi, altruist.lo, altruist.hi);
    const double x_s = std::clamp(u - x_a, selfish.lo, selfish.hi);
    const MassRange range{x_a, std::clamp(u - selfish.lo, altruist.lo, altruist.hi)};
    return {u, x_a, x_s, kind_a, kind_s, range};
  }
};

struct EquilibriumSet {
  std::vector<EquilibriumPoint> points;       // sorted by u, no duplicates
  std::vector<EquilibriumInterval> intervals;

  /// Number of connected components.
  std::size_t size() const { return points.size() + intervals.size(); }
  bool empty() const { return size() == 0; }

  /// Distance from u to the nearest equilibrium level.
  double distance_to(double u) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::min(best, std::abs(p.u - u));
    for (const auto& iv : intervals) {
      const double d = u < iv.lo ? iv.lo - u : (u > iv.hi ? u - iv.hi : 0.0);
      best = std::min(best, d);
    }
    return best;
  }
};

namespace detail {

inline Play classify_gap(double gap) {
  if (gap > tol::kIndifference) return Play::AllCooperate;
  if (gap < -tol::kIndifference) return Play::AllDefect;
  return Play::Interior;
}

inline MassRange admissible_for(Play play, double mass) {
  switch (play) {
    case Play::AllDefect: return {0.0, 0.0};
    case Play::AllCooperate: return {mass, mass};
    case Play::Interior: return {0.0, mass};
  }
  return {0.0, mass};
}

inline Play play_at(AgentType t, const GameInstance& g, double u) {
  if (is_degenerate(t, g.matrix())) return Play::Interior;
  return classify_gap(payoff(t, u, g.matrix()).gap());
}

}  // namespace detail

/// Checks the Nash condition by direct payoff comparison: every strategy used
/// with positive mass earns at least the alternative, up to `tolerance`.
inline bool satisfies_nash(const GameInstance& g, const PopulationState& x,
                           double tolerance = tol::kIndifference) {
  if (!x.feasible_in(g)) return false;
  const double u = std::clamp(x.utilization(), 0.0, 1.0);
  for (AgentType t : {AgentType::Altruistic, AgentType::Selfish}) {
    const double gap = payoff(t, u, g.matrix()).gap();
    const double coop = x.cooperators(t);
    if (coop > tol::kMass && gap < -tolerance) return false;
    if (g.mass(t) - coop > tol::kMass && gap > tolerance) return false;
  }
  return true;
}

/// Resolves whether some feasible state with utilization u is an equilibrium
/// and, if so, returns it with the full range of altruist witnesses.
inline std::optional<EquilibriumPoint> equilibrium_at(const GameInstance& g, double u) {
  if (!(u >= -tol::kMass && u <= 1.0 + tol::kMass)) return std::nullopt;
  u = std::clamp(u, 0.0, 1.0);
  const Play kind_a = detail::play_at(AgentType::Altruistic, g, u);
  const Play kind_s = detail::play_at(AgentType::Selfish, g, u);
  const MassRange a = detail::admissible_for(kind_a, g.p_a());
  const MassRange s = detail::admissible_for(kind_s, g.p_s());

  const double lo = std::max(a.lo, u - s.hi);
  const double hi = std::min(a.hi, u - s.lo);
  if (lo > hi + tol::kMass) return std::nullopt;

  const double x_a = std::clamp(lo, a.lo, a.hi);
  const double x_s = std::clamp(u - x_a, s.lo, s.hi);
  const MassRange range{x_a, std::clamp(hi, x_a, a.hi)};
  return EquilibriumPoint{u, x_a, x_s, kind_a, kind_s, range};
}

namespace detail {

// Some type is indifferent everywhere, which forces delta == 0 (within
// tolerance), so the other type's payoff difference is constant in u.
inline EquilibriumSet enumerate_degenerate(const GameInstance& g) {
  const Play kind_a = play_at(AgentType::Altruistic, g, 0.5);
  const Play kind_s = play_at(AgentType::Selfish, g, 0.5);
  const MassRange a = admissible_for(kind_a, g.p_a());
  const MassRange s = admissible_for(kind_s, g.p_s());
  const EquilibriumInterval iv{a.lo + s.lo, std::min(1.0, a.hi + s.hi), kind_a, kind_s, a, s};

  EquilibriumSet out;
  if (iv.hi - iv.lo <= tol::kMerge)
    out.points.push_back(iv.at(iv.lo));
  else
    out.intervals.push_back(iv);
  return out;
}

}  // namespace detail

inline EquilibriumSet enumerate_equilibria(const GameInstance& g) {
  const PayoffMatrix& m = g.matrix();
  EquilibriumSet out;
  if (is_degenerate(AgentType::Altruistic, m) || is_degenerate(AgentType::Selfish, m)) {
    out = detail::enumerate_degenerate(g);
  } else {
    std::vector<double> candidates{0.0, g.p_a(), g.p_s(), 1.0};
    for (AgentType t : {AgentType::Altruistic, AgentType::Selfish}) {
      if (auto star = interior_equilibrium(t, m)) candidates.push_back(star->u);
    }
    std::sort(candidates.begin(), candidates.end());
    for (double u : candidates) {
      auto point = equilibrium_at(g, u);
      if (!point) continue;
      if (!out.points.empty() && std::abs(out.points.back().u - point->u) <= tol::kMerge) continue;
      out.points.push_back(*point);
    }
  }
  if (out.empty())
    throw std::logic_error("equilibrium enumeration returned an empty set");
  return out;
}

inline EquilibriumSet all_selfish_equilibria(const GameInstance& g) {
  return enumerate_equilibria(g.with_altruist_mass(0.0));
}

inline EquilibriumSet all_altruistic_equilibria(const GameInstance& g) {
  return enumerate_equilibria(g.with_altruist_mass(1.0));
}

struct OracleOptions {
  double grid_step = 1e-3;
  double tol = 1e-6;
};

/// Brute-force scan of the (x_a, x_s) box. Each axis is sampled at multiples
/// of grid_step below the type's mass, plus the mass itself. A grid state is
/// reported when each type's Nash condition holds within tol somewhere in
/// the utilization cell [u - step/2, u + step/2] ∩ [0, 1] around it, so that
/// isolated indifference points between grid nodes are still detected.
inline std::vector<PopulationState> oracle_equilibria(const GameInstance& g, double grid_step,
                                                      double tol) {
  if (!(grid_step > 0.0 && grid_step <= 1e-2))
    throw std::invalid_argument("grid_step must lie in (0, 1e-2]");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

  auto axis = [grid_step](double mass) {
    std::vector<double> v;
    for (std::size_t k = 0;; ++k) {
      const double x = static_cast<double>(k) * grid_step;
      if (x >= mass - tol::kMass) break;
      v.push_back(x);
    }
    v.push_back(mass);
    return v;
  };
  const auto xs_a = axis(g.p_a());
  const auto xs_s = axis(g.p_s());
  const double half = grid_step / 2.0;
  const PayoffMatrix& m = g.matrix();

  auto type_ok = [&](AgentType t, double x, double u) {
    const double g_lo = payoff(t, std::max(0.0, u - half), m).gap();
    const double g_hi = payoff(t, std::min(1.0, u + half), m).gap();
    const double lo = std::min(g_lo, g_hi);
    const double hi = std::max(g_lo, g_hi);
    if (x > tol::kMass && hi < -tol) return false;
    if (g.mass(t) - x > tol::kMass && lo > tol) return false;
    return true;
  };

  std::vector<PopulationState> out;
  for (double x_a : xs_a) {
    for (double x_s : xs_s) {
      const double u = std::min(1.0, x_a + x_s);
      if (type_ok(AgentType::Altruistic, x_a, u) && type_ok(AgentType::Selfish, x_s, u))
        out.push_back({x_a, x_s});
    }
  }
  return out;
}

inline std::vector<PopulationState> oracle_equilibria(const GameInstance& g,
                                                      const OracleOptions& opts = {}) {
  return oracle_equilibria(g, opts.grid_step, opts.tol);
}

}  // namespace altperv
