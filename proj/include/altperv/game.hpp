#pragma once

// Two-strategy symmetric population game with altruistic and selfish types.
//
// Strategies are Cooperate (row/column 1) and Defect (row/column 2). Every
// payoff in this game depends on the population state only through the
// utilization level u, the total mass of cooperators.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace altperv {

namespace tol {
/// Absolute threshold on delta separating convex, concave and affine welfare.
inline constexpr double kCurvature = 1e-9;
/// Absolute threshold on payoff differences when deciding indifference.
inline constexpr double kIndifference = 1e-9;
/// Slack on masses and utilization levels lying slightly outside their box.
inline constexpr double kMass = 1e-12;
/// Utilization levels closer than this are the same equilibrium.
inline constexpr double kMerge = 1e-9;
}  // namespace tol

/// Thrown when a game or a state violates its invariants. The message names
/// the offending field.
class InvalidGame : public std::invalid_argument {
 public:
  InvalidGame(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class AgentType { Selfish, Altruistic };

inline const char* to_string(AgentType t) {
  return t == AgentType::Selfish ? "selfish" : "altruistic";
}

/// Row-player payoffs: R (C vs C), S (C vs D), T (D vs C), P (D vs D).
struct PayoffMatrix {
  double R = 0.0;
  double S = 0.0;
  double T = 0.0;
  double P = 0.0;

  void validate() const {
    check("R", R);
    check("S", S);
    check("T", T);
    check("P", P);
  }

  bool operator==(const PayoffMatrix&) const = default;

 private:
  static void check(const char* name, double v) {
    if (!std::isfinite(v)) throw InvalidGame(name, "payoff must be finite");
    if (v < 0.0) throw InvalidGame(name, "payoff must be nonnegative");
  }
};

/// W(u) = delta * u^2 + beta * u + constant.
struct WelfareCoefficients {
  double delta = 0.0;
  double beta = 0.0;
  double constant = 0.0;

  static WelfareCoefficients of(const PayoffMatrix& m) {
    return {m.R + m.P - (m.S + m.T), m.S + m.T - 2.0 * m.P, m.P};
  }

  double operator()(double u) const { return (delta * u + beta) * u + constant; }

  /// Stationary point of the quadratic; absent when delta is exactly zero.
  std::optional<double> vertex() const {
    if (delta == 0.0) return std::nullopt;
    return -beta / (2.0 * delta);
  }
};

class GameInstance {
 public:
  GameInstance(PayoffMatrix m, double p_a) : matrix_(m), p_a_(p_a), p_s_(1.0 - p_a) {
    matrix_.validate();
    if (!std::isfinite(p_a) || p_a < 0.0 || p_a > 1.0)
      throw InvalidGame("p_a", "altruist mass must lie in [0, 1]");
  }

  const PayoffMatrix& matrix() const noexcept { return matrix_; }
  double p_a() const noexcept { return p_a_; }
  double p_s() const noexcept { return p_s_; }
  double mass(AgentType t) const noexcept { return t == AgentType::Selfish ? p_s_ : p_a_; }

  GameInstance with_altruist_mass(double p_a) const { return GameInstance(matrix_, p_a); }

 private:
  PayoffMatrix matrix_;
  double p_a_;
  double p_s_;
};

/// Cooperator masses per type; defector masses are p_tau - x_tau.
struct PopulationState {
  double x_a = 0.0;
  double x_s = 0.0;

  double utilization() const { return x_a + x_s; }
  double cooperators(AgentType t) const { return t == AgentType::Selfish ? x_s : x_a; }

  bool feasible_in(const GameInstance& g, double slack = tol::kMass) const {
    return std::isfinite(x_a) && std::isfinite(x_s) && x_a >= -slack &&
           x_a <= g.p_a() + slack && x_s >= -slack && x_s <= g.p_s() + slack;
  }

  void validate_in(const GameInstance& g) const {
    if (!std::isfinite(x_a) || x_a < -tol::kMass || x_a > g.p_a() + tol::kMass)
      throw InvalidGame("x_a", "cooperating altruist mass must lie in [0, p_a]");
    if (!std::isfinite(x_s) || x_s < -tol::kMass || x_s > g.p_s() + tol::kMass)
      throw InvalidGame("x_s", "cooperating selfish mass must lie in [0, p_s]");
  }
};

/// Payoff of choosing Cooperate and Defect at a given utilization level.
struct StrategyPayoffs {
  double cooperate = 0.0;
  double defect = 0.0;

  double gap() const { return cooperate - defect; }
};

enum class Curvature { StrictlyConvex, StrictlyConcave, Affine };

inline const char* to_string(Curvature c) {
  switch (c) {
    case Curvature::StrictlyConvex: return "StrictlyConvex";
    case Curvature::StrictlyConcave: return "StrictlyConcave";
    case Curvature::Affine: return "Affine";
  }
  return "?";
}

namespace detail {
inline void check_utilization(double u) {
  if (!(u >= -tol::kMass && u <= 1.0 + tol::kMass))
    throw std::domain_error("utilization level must lie in [0, 1]");
}
}  // namespace detail

inline double welfare(double u, const PayoffMatrix& m) {
  detail::check_utilization(u);
  return WelfareCoefficients::of(m)(u);
}

/// Actual matrix payoffs, the column vector A [u, 1-u]^T.
inline StrategyPayoffs selfish_payoff(double u, const PayoffMatrix& m) {
  detail::check_utilization(u);
  return {m.R * u + m.S * (1.0 - u), m.T * u + m.P * (1.0 - u)};
}

/// Welfare gradient projected on the simplex. Defect is the exact negation
/// of Cooperate.
inline StrategyPayoffs altruistic_payoff(double u, const PayoffMatrix& m) {
  detail::check_utilization(u);
  const double st = m.S + m.T;
  const double c = (2.0 * m.R - st) * u + (st - 2.0 * m.P) * (1.0 - u);
  return {c, -c};
}

inline StrategyPayoffs payoff(AgentType t, double u, const PayoffMatrix& m) {
  return t == AgentType::Selfish ? selfish_payoff(u, m) : altruistic_payoff(u, m);
}

inline Curvature classify_curvature(const PayoffMatrix& m) {
  const double d = WelfareCoefficients::of(m).delta;
  if (d > tol::kCurvature) return Curvature::StrictlyConvex;
  if (d < -tol::kCurvature) return Curvature::StrictlyConcave;
  return Curvature::Affine;
}

/// True when the type's payoff difference vanishes for every u, so the type
/// is indifferent everywhere. For altruists this means constant welfare.
inline bool is_degenerate(AgentType t, const PayoffMatrix& m) {
  if (t == AgentType::Selfish)
    return std::abs(m.R - m.T) + std::abs(m.S - m.P) < tol::kIndifference;
  const auto w = WelfareCoefficients::of(m);
  return std::abs(2.0 * w.delta) + std::abs(w.beta) < tol::kIndifference;
}

struct IndifferencePoint {
  double u = 0.0;
  bool feasible = false;  // u lies in [0, 1]
};

/// The utilization level at which a type is indifferent between C and D.
/// Values outside [0, 1] are returned unclamped with feasible == false.
/// Absent when delta == 0: the payoff difference is then constant.
inline std::optional<IndifferencePoint> interior_equilibrium(AgentType t, const PayoffMatrix& m) {
  const double delta = WelfareCoefficients::of(m).delta;
  if (delta == 0.0) return std::nullopt;
  const double u = t == AgentType::Selfish ? (m.P - m.S) / delta
                                           : (2.0 * m.P - (m.S + m.T)) / (2.0 * delta);
  return IndifferencePoint{u, u >= 0.0 && u <= 1.0};
}

}  // namespace altperv
