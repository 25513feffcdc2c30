#pragma once

// Projected payoff-difference flow. Each type moves its cooperator mass in
// the direction of its payoff difference and is clipped to [0, p_tau]. A
// state is stationary exactly when every type is indifferent, or sits at the
// corner its payoff difference pushes it against, which is the Nash
// condition.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "altperv/game.hpp"

namespace altperv {

struct FlowOptions {
  double dt = 1e-2;
  std::size_t max_steps = 1'000'000;
  double residual_tol = 1e-8;
  /// Keep every n-th iterate in the trajectory; the final state is always kept.
  std::size_t record_every = 1;
};

struct TrajectorySample {
  double t = 0.0;
  double x_a = 0.0;
  double x_s = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  bool converged = false;
  double final_residual = 0.0;
  std::size_t steps = 0;

  PopulationState final_state() const { return {samples.back().x_a, samples.back().x_s}; }
};

inline PopulationState step_flow(const GameInstance& g, const PopulationState& state, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::domain_error("dt must be positive and finite");
  state.validate_in(g);
  const double u = std::clamp(state.utilization(), 0.0, 1.0);
  const PayoffMatrix& m = g.matrix();
  return {std::clamp(state.x_a + dt * altruistic_payoff(u, m).gap(), 0.0, g.p_a()),
          std::clamp(state.x_s + dt * selfish_payoff(u, m).gap(), 0.0, g.p_s())};
}

/// Iterates step_flow until the realized movement per unit time drops below
/// residual_tol. Running out of steps is reported through `converged`.
inline Trajectory integrate(const GameInstance& g, const PopulationState& init,
                            const FlowOptions& opts = {}) {
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt))
    throw std::domain_error("dt must be positive and finite");
  if (opts.max_steps == 0) throw std::domain_error("max_steps must be positive");
  if (!(opts.residual_tol > 0.0)) throw std::domain_error("residual_tol must be positive");
  if (opts.record_every == 0) throw std::domain_error("record_every must be positive");
  init.validate_in(g);

  Trajectory out;
  PopulationState state{std::clamp(init.x_a, 0.0, g.p_a()), std::clamp(init.x_s, 0.0, g.p_s())};
  out.samples.push_back({0.0, state.x_a, state.x_s});

  std::size_t step = 0;
  for (; step < opts.max_steps; ++step) {
    const PopulationState next = step_flow(g, state, opts.dt);
    out.final_residual = std::hypot(next.x_a - state.x_a, next.x_s - state.x_s) / opts.dt;
    if (out.final_residual < opts.residual_tol) {
      out.converged = true;
      break;
    }
    state = next;
    if ((step + 1) % opts.record_every == 0)
      out.samples.push_back({static_cast<double>(step + 1) * opts.dt, state.x_a, state.x_s});
  }
  out.steps = step;
  const double t_end = static_cast<double>(step) * opts.dt;
  if (out.samples.back().t < t_end) out.samples.push_back({t_end, state.x_a, state.x_s});
  return out;
}

}  // namespace altperv
