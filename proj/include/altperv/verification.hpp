#pragma once

// Seeded randomized campaigns that check the structural claims about the
// heterogeneous game: concave welfare never admits perversity, the five
// concave sub-cases behave as claimed, the Prisoner's Dilemma closed form
// agrees with enumeration, and enumeration agrees with the grid oracle.
//
// Every trial draws from its own generator seeded by (seed, trial), so a
// campaign's result does not depend on evaluation order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "altperv/equilibrium.hpp"
#include "altperv/game.hpp"
#include "altperv/perversity.hpp"

namespace altperv {

namespace sampling {

inline constexpr double kMaxPayoff = 10.0;

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform on [lo, hi) from the top 53 bits, identical on every platform.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline PayoffMatrix uniform_matrix(std::mt19937_64& rng) {
  PayoffMatrix m;
  m.R = uniform(rng, 0.0, kMaxPayoff);
  m.S = uniform(rng, 0.0, kMaxPayoff);
  m.T = uniform(rng, 0.0, kMaxPayoff);
  m.P = uniform(rng, 0.0, kMaxPayoff);
  return m;
}

/// Rejection-samples a matrix with delta < -margin.
inline PayoffMatrix concave_matrix(std::mt19937_64& rng, double margin = 1e-6) {
  for (;;) {
    const auto m = uniform_matrix(rng);
    if (WelfareCoefficients::of(m).delta < -margin) return m;
  }
}

/// Rejection-samples S < P < R < T.
inline PayoffMatrix pd_matrix(std::mt19937_64& rng) {
  for (;;) {
    const auto m = uniform_matrix(rng);
    if (is_prisoners_dilemma(m)) return m;
  }
}

/// A matrix with delta exactly zero: R is solved from S + T - P.
inline PayoffMatrix affine_matrix(std::mt19937_64& rng) {
  for (;;) {
    PayoffMatrix m;
    m.S = uniform(rng, 0.0, kMaxPayoff);
    m.T = uniform(rng, 0.0, kMaxPayoff);
    m.P = uniform(rng, 0.0, kMaxPayoff);
    m.R = m.S + m.T - m.P;
    if (m.R >= 0.0 && m.R <= kMaxPayoff && WelfareCoefficients::of(m).delta == 0.0) return m;
  }
}

}  // namespace sampling

struct Counterexample {
  std::uint64_t trial = 0;
  PayoffMatrix matrix;
  double p_a = 0.0;
  std::string reason;
};

struct VerificationSummary {
  std::string suite;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t failures = 0;
  std::uint64_t rejected = 0;  // draws discarded because the index is undefined
  double min_pi = std::numeric_limits<double>::infinity();
  double max_pi = -std::numeric_limits<double>::infinity();
  std::array<std::uint64_t, 5> case_counts{};  // proof cases 1..5
  double max_gap = 0.0;                        // closed-form or oracle mismatch
  std::uint64_t affine_probes = 0;
  std::uint64_t affine_perverse = 0;  // affine games observed with PI < 1
  std::optional<Counterexample> counterexample;

  bool passed() const { return failures == 0; }

  void record_pi(double pi) {
    min_pi = std::min(min_pi, pi);
    max_pi = std::max(max_pi, pi);
  }

  void fail(std::uint64_t trial, const GameInstance& g, std::string reason) {
    ++failures;
    if (!counterexample) counterexample = Counterexample{trial, g.matrix(), g.p_a(), std::move(reason)};
  }
};

class VerificationFailure : public std::runtime_error {
 public:
  explicit VerificationFailure(VerificationSummary s)
      : std::runtime_error("VerificationFailure: " + s.suite + " violated on " +
                           std::to_string(s.failures) + " of " + std::to_string(s.trials) +
                           " trials" +
                           (s.counterexample ? " (first: " + s.counterexample->reason + ")" : "")),
        summary_(std::move(s)) {}
  const VerificationSummary& summary() const noexcept { return summary_; }

 private:
  VerificationSummary summary_;
};

inline VerificationSummary require_passed(VerificationSummary s) {
  if (!s.passed()) throw VerificationFailure(std::move(s));
  return s;
}

/// Tolerance for perversity comparisons in every campaign.
inline constexpr double kPiTolerance = 1e-9;

namespace detail {

inline VerificationSummary start(const char* suite, std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  VerificationSummary s;
  s.suite = suite;
  s.trials = trials;
  s.seed = seed;
  return s;
}

// Redraws until the index is defined; each discard is counted.
template <class Draw>
std::pair<GameInstance, PerversityReport> draw_defined(std::mt19937_64& rng, Draw draw,
                                                       VerificationSummary& s) {
  for (;;) {
    const GameInstance g = draw(rng);
    try {
      return {g, perversity_index(g)};
    } catch (const DivisionByZeroWelfare&) {
      ++s.rejected;
    }
  }
}

}  // namespace detail

/// Concave welfare implies PI >= 1. Draws concave games (delta < -1e-6) with
/// a uniform altruist mass. Every tenth trial also probes an affine game and
/// counts, without failing, any PI < 1 observed there.
inline VerificationSummary verify_theorem1(std::uint64_t trials, std::uint64_t seed) {
  auto s = detail::start("theorem1", trials, seed);
  for (std::uint64_t k = 0; k < trials; ++k) {
    auto rng = sampling::trial_rng(seed, k);
    const auto [g, report] = detail::draw_defined(
        rng,
        [](std::mt19937_64& r) {
          const auto m = sampling::concave_matrix(r);
          return GameInstance(m, sampling::uniform(r, 0.0, 1.0));
        },
        s);
    s.record_pi(report.pi);
    if (report.pi < 1.0 - kPiTolerance)
      s.fail(k, g, "concave game with PI = " + std::to_string(report.pi));

    if (k % 10 == 0) {
      const auto [ga, ra] = detail::draw_defined(
          rng,
          [](std::mt19937_64& r) {
            return GameInstance(sampling::affine_matrix(r), sampling::uniform(r, 0.0, 1.0));
          },
          s);
      ++s.affine_probes;
      if (ra.pi < 1.0 - kPiTolerance) ++s.affine_perverse;
    }
  }
  return require_passed(std::move(s));
}

enum class ProofCase { NonPositiveStar = 0, StarAtLeastOne, LargeAltruists, SelfishCorner, SelfishInterior };

/// Which of the five concave sub-cases a game falls into; they partition the
/// concave parameter space.
inline ProofCase proof_case(const GameInstance& g) {
  const double star = interior_equilibrium(AgentType::Altruistic, g.matrix())->u;
  if (star <= 0.0) return ProofCase::NonPositiveStar;
  if (star >= 1.0) return ProofCase::StarAtLeastOne;
  if (star <= g.p_a()) return ProofCase::LargeAltruists;
  const auto selfish = all_selfish_equilibria(g);
  const bool interior = selfish.intervals.empty() && selfish.points.size() == 1 &&
                        selfish.points.front().kind_s == Play::Interior;
  return interior ? ProofCase::SelfishInterior : ProofCase::SelfishCorner;
}

/// Draws concave games and checks, per sub-case, the behavior the proof of
/// the concave result relies on, together with single-equilibrium
/// uniqueness for the all-selfish and all-altruistic populations.
inline VerificationSummary verify_proof_cases(std::uint64_t trials, std::uint64_t seed) {
  constexpr double eps = kPiTolerance;
  auto s = detail::start("cases", trials, seed);
  for (std::uint64_t k = 0; k < trials; ++k) {
    auto rng = sampling::trial_rng(seed, k);
    const auto [g, report] = detail::draw_defined(
        rng,
        [](std::mt19937_64& r) {
          const auto m = sampling::concave_matrix(r);
          return GameInstance(m, sampling::uniform(r, 0.0, 1.0));
        },
        s);
    s.record_pi(report.pi);
    if (report.pi < 1.0 - eps) s.fail(k, g, "concave game with PI < 1");

    const auto hetero = enumerate_equilibria(g);
    const auto selfish = all_selfish_equilibria(g);
    if (selfish.size() != 1 || all_altruistic_equilibria(g).size() != 1)
      s.fail(k, g, "concave game without unique single-type equilibria");

    const PayoffMatrix& m = g.matrix();
    const double star = interior_equilibrium(AgentType::Altruistic, m)->u;
    const ProofCase c = proof_case(g);
    ++s.case_counts[static_cast<std::size_t>(c)];

    // Interval components cannot arise here (delta < 0), so points suffice.
    switch (c) {
      case ProofCase::NonPositiveStar:
        for (const auto& p : hetero.points)
          if (p.witness_x_a > eps || p.altruist_witnesses.hi > eps)
            s.fail(k, g, "case 1: altruists cooperate at an equilibrium");
        break;
      case ProofCase::StarAtLeastOne:
        for (const auto& p : hetero.points)
          if (p.witness_x_a < g.p_a() - eps || p.altruist_witnesses.lo < g.p_a() - eps)
            s.fail(k, g, "case 2: altruists defect at an equilibrium");
        break;
      case ProofCase::LargeAltruists:
        for (const auto& p : hetero.points) {
          if (p.witness_x_s <= star + eps) {
            if (std::abs(p.u - star) > eps) s.fail(k, g, "case 3: equilibrium level differs from u*_a");
          } else if (p.witness_x_a > eps) {
            s.fail(k, g, "case 3: altruists cooperate although x_s > u*_a");
          }
        }
        break;
      case ProofCase::SelfishCorner:
      case ProofCase::SelfishInterior: {
        const auto w = WelfareCoefficients::of(m);
        double selfish_best = -std::numeric_limits<double>::infinity();
        for (const auto& p : selfish.points) selfish_best = std::max(selfish_best, w(p.u));
        for (const auto& p : hetero.points)
          if (selfish_best > w(p.u) + eps)
            s.fail(k, g, c == ProofCase::SelfishCorner ? "case 4: welfare drops"
                                                       : "case 5: welfare drops");
        break;
      }
    }
  }
  return require_passed(std::move(s));
}

/// Dual-path check of the Prisoner's Dilemma closed form against enumeration.
/// max_gap records the largest relative difference observed.
inline VerificationSummary verify_proposition1(std::uint64_t games, std::uint64_t seed,
                                               std::size_t altruist_masses_per_game = 50) {
  auto s = detail::start("proposition1", games, seed);
  for (std::uint64_t k = 0; k < games; ++k) {
    auto rng = sampling::trial_rng(seed, k);
    const PayoffMatrix m = sampling::pd_matrix(rng);
    for (std::size_t j = 0; j < altruist_masses_per_game; ++j) {
      const GameInstance g(m, sampling::uniform(rng, 0.0, 1.0));
      const double closed = pd_closed_form_pi(g);
      const double enumerated = perversity_index(g).pi;
      const double gap = std::abs(closed - enumerated) / std::max(1.0, std::abs(enumerated));
      s.max_gap = std::max(s.max_gap, gap);
      s.record_pi(enumerated);
      if (gap > kPiTolerance)
        s.fail(k, g, "closed form " + std::to_string(closed) + " vs enumeration " +
                         std::to_string(enumerated));
    }
  }
  return require_passed(std::move(s));
}

struct OracleAgreement {
  double analytic_to_oracle = 0.0;  // worst distance from an analytic level to the oracle
  double oracle_to_analytic = 0.0;  // worst distance from an oracle level to the analytic set
};

inline OracleAgreement compare_with_oracle(const EquilibriumSet& analytic,
                                           const std::vector<PopulationState>& oracle) {
  OracleAgreement out;
  auto nearest_oracle = [&](double u) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : oracle) best = std::min(best, std::abs(x.utilization() - u));
    return best;
  };
  for (const auto& p : analytic.points)
    out.analytic_to_oracle = std::max(out.analytic_to_oracle, nearest_oracle(p.u));
  for (const auto& iv : analytic.intervals)
    for (double u : {iv.lo, 0.5 * (iv.lo + iv.hi), iv.hi})
      out.analytic_to_oracle = std::max(out.analytic_to_oracle, nearest_oracle(u));
  for (const auto& x : oracle)
    out.oracle_to_analytic = std::max(out.oracle_to_analytic, analytic.distance_to(x.utilization()));
  return out;
}

/// Enumeration versus the brute-force grid oracle on uniform random games.
/// max_gap records the worst mismatch in either direction.
inline VerificationSummary verify_oracle(std::uint64_t games, std::uint64_t seed,
                                         const OracleOptions& opts = {}) {
  auto s = detail::start("oracle", games, seed);
  for (std::uint64_t k = 0; k < games; ++k) {
    auto rng = sampling::trial_rng(seed, k);
    const PayoffMatrix m = sampling::uniform_matrix(rng);
    const GameInstance g(m, sampling::uniform(rng, 0.0, 1.0));
    const auto agreement = compare_with_oracle(enumerate_equilibria(g), oracle_equilibria(g, opts));
    const double gap = std::max(agreement.analytic_to_oracle, agreement.oracle_to_analytic);
    s.max_gap = std::max(s.max_gap, gap);
    if (gap > opts.grid_step) s.fail(k, g, "oracle mismatch " + std::to_string(gap));
  }
  return require_passed(std::move(s));
}

}  // namespace altperv
