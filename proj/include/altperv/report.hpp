#pragma once

// Tabular and JSON outputs of the analysis tool: perversity sweeps over the
// altruist mass, payoff landscapes, full single-game analyses, verification
// reports, and flow trajectories.
//
// CSV is '.'-decimal, ','-separated, with a header row and every number
// printed with 17 significant digits so doubles round-trip exactly.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "altperv/dynamics.hpp"
#include "altperv/equilibrium.hpp"
#include "altperv/game.hpp"
#include "altperv/perversity.hpp"
#include "altperv/spec_file.hpp"
#include "altperv/verification.hpp"
#include "json.hpp"

namespace altperv {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- sweep

struct SweepRow {
  double p_a = 0.0;
  double pi = 0.0;
  double worst_u = 0.0;
  double worst_welfare = 0.0;
  double best_selfish_welfare = 0.0;
  std::size_t equilibrium_count = 0;

  bool operator==(const SweepRow&) const = default;
};

/// Altruist masses i / (grid - 1), with u*_a inserted when it lies in [0, 1]
/// so the branch point is sampled exactly.
inline std::vector<double> sweep_masses(const PayoffMatrix& m, std::size_t grid) {
  if (grid < 2) throw std::invalid_argument("grid must be at least 2");
  std::vector<double> out;
  out.reserve(grid + 1);
  for (std::size_t i = 0; i < grid; ++i)
    out.push_back(static_cast<double>(i) / static_cast<double>(grid - 1));
  if (auto star = interior_equilibrium(AgentType::Altruistic, m); star && star->feasible) {
    if (std::find(out.begin(), out.end(), star->u) == out.end()) out.push_back(star->u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<SweepRow> pi_sweep(const PayoffMatrix& m, std::size_t grid) {
  std::vector<SweepRow> rows;
  for (double p_a : sweep_masses(m, grid)) {
    const GameInstance g(m, p_a);
    const auto report = perversity_index(g);
    rows.push_back({p_a, report.pi, report.worst_hetero.u, report.worst_welfare,
                    report.best_selfish_welfare, enumerate_equilibria(g).size()});
  }
  return rows;
}

inline constexpr const char* kSweepHeader =
    "p_a,pi,worst_u,worst_welfare,best_selfish_welfare,equilibrium_count";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_number(r.p_a) << ',' << format_number(r.pi) << ',' << format_number(r.worst_u)
        << ',' << format_number(r.worst_welfare) << ',' << format_number(r.best_selfish_welfare)
        << ',' << r.equilibrium_count << '\n';
  }
}

inline std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader)
    throw std::runtime_error("sweep CSV: unexpected header");
  std::vector<SweepRow> rows;
  for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 6)
      throw std::runtime_error("sweep CSV line " + std::to_string(line_no) + ": expected 6 fields");
    double v[5];
    for (int i = 0; i < 5; ++i) {
      auto parsed = detail::parse_double(cells[i]);
      if (!parsed)
        throw std::runtime_error("sweep CSV line " + std::to_string(line_no) + ": bad number");
      v[i] = *parsed;
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4], std::stoul(cells[5])});
  }
  return rows;
}

inline nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"p_a", r.p_a},
                   {"pi", r.pi},
                   {"worst_u", r.worst_u},
                   {"worst_welfare", r.worst_welfare},
                   {"best_selfish_welfare", r.best_selfish_welfare},
                   {"equilibrium_count", r.equilibrium_count}});
  return out;
}

// ------------------------------------------------------------ landscape

struct LandscapeRow {
  std::string kind;  // grid, u_star_a, u_star_s, altruist_ne
  double u = 0.0;
  double welfare = 0.0;
  StrategyPayoffs selfish;
  StrategyPayoffs altruistic;
};

/// Payoff curves on `grid` evenly spaced levels, followed by marker rows for
/// feasible indifference points and the all-altruistic equilibria.
inline std::vector<LandscapeRow> landscape(const PayoffMatrix& m, std::size_t grid) {
  if (grid < 2) throw std::invalid_argument("grid must be at least 2");
  std::vector<LandscapeRow> rows;
  auto row = [&](const char* kind, double u) {
    rows.push_back({kind, u, welfare(u, m), selfish_payoff(u, m), altruistic_payoff(u, m)});
  };
  for (std::size_t i = 0; i < grid; ++i)
    row("grid", static_cast<double>(i) / static_cast<double>(grid - 1));
  if (auto s = interior_equilibrium(AgentType::Altruistic, m); s && s->feasible) row("u_star_a", s->u);
  if (auto s = interior_equilibrium(AgentType::Selfish, m); s && s->feasible) row("u_star_s", s->u);
  const auto stars = all_altruistic_equilibria(GameInstance(m, 1.0));
  for (const auto& p : stars.points) row("altruist_ne", p.u);
  for (const auto& iv : stars.intervals) {
    row("altruist_ne", iv.lo);
    row("altruist_ne", iv.hi);
  }
  return rows;
}

inline void write_landscape_csv(std::ostream& out, const std::vector<LandscapeRow>& rows) {
  out << "kind,u,welfare,f_C_s,f_D_s,f_C_a,f_D_a\n";
  for (const auto& r : rows) {
    out << r.kind << ',' << format_number(r.u) << ',' << format_number(r.welfare) << ','
        << format_number(r.selfish.cooperate) << ',' << format_number(r.selfish.defect) << ','
        << format_number(r.altruistic.cooperate) << ',' << format_number(r.altruistic.defect)
        << '\n';
  }
}

inline nlohmann::json landscape_json(const std::vector<LandscapeRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"kind", r.kind},
                   {"u", r.u},
                   {"welfare", r.welfare},
                   {"f_C_s", r.selfish.cooperate},
                   {"f_D_s", r.selfish.defect},
                   {"f_C_a", r.altruistic.cooperate},
                   {"f_D_a", r.altruistic.defect}});
  return out;
}

// ------------------------------------------------------------- analysis

inline nlohmann::json to_json(const PayoffMatrix& m) {
  return {{"R", m.R}, {"S", m.S}, {"T", m.T}, {"P", m.P}};
}

inline nlohmann::json to_json(const EquilibriumSet& set, const PayoffMatrix& m) {
  const auto w = WelfareCoefficients::of(m);
  auto points = nlohmann::json::array();
  for (const auto& p : set.points)
    points.push_back({{"u", p.u},
                      {"x_a", p.witness_x_a},
                      {"x_s", p.witness_x_s},
                      {"x_a_range", {p.altruist_witnesses.lo, p.altruist_witnesses.hi}},
                      {"kind_a", to_string(p.kind_a)},
                      {"kind_s", to_string(p.kind_s)},
                      {"welfare", w(p.u)}});
  auto intervals = nlohmann::json::array();
  for (const auto& iv : set.intervals)
    intervals.push_back({{"lo", iv.lo},
                         {"hi", iv.hi},
                         {"kind_a", to_string(iv.kind_a)},
                         {"kind_s", to_string(iv.kind_s)},
                         {"welfare_lo", w(iv.lo)},
                         {"welfare_hi", w(iv.hi)}});
  return {{"points", points}, {"intervals", intervals}};
}

inline nlohmann::json indifference_json(AgentType t, const PayoffMatrix& m) {
  const auto s = interior_equilibrium(t, m);
  if (!s) return nullptr;
  return {{"value", s->u}, {"feasible", s->feasible}};
}

/// Everything known about one game. A DivisionByZeroWelfare is recorded under
/// perversity.error verbatim instead of a value.
inline nlohmann::json analyze(const GameSpec& spec) {
  const GameInstance g = spec.instance();
  const PayoffMatrix& m = g.matrix();
  const auto coeffs = WelfareCoefficients::of(m);

  nlohmann::json doc;
  doc["label"] = spec.label;
  doc["metadata"] = spec.metadata;
  doc["matrix"] = to_json(m);
  doc["p_a"] = g.p_a();
  doc["p_s"] = g.p_s();
  doc["curvature"] = to_string(classify_curvature(m));
  doc["delta"] = coeffs.delta;
  doc["beta"] = coeffs.beta;
  doc["u_star_s"] = indifference_json(AgentType::Selfish, m);
  doc["u_star_a"] = indifference_json(AgentType::Altruistic, m);
  doc["degenerate"] = {{"selfish", is_degenerate(AgentType::Selfish, m)},
                       {"altruistic", is_degenerate(AgentType::Altruistic, m)}};
  doc["equilibria"] = to_json(enumerate_equilibria(g), m);
  doc["selfish_equilibria"] = to_json(all_selfish_equilibria(g), m);
  doc["altruistic_equilibria"] = to_json(all_altruistic_equilibria(g), m);
  try {
    const auto r = perversity_index(g);
    doc["perversity"] = {{"pi", r.pi},
                         {"worst_u", r.worst_hetero.u},
                         {"worst_x_a", r.worst_hetero.witness_x_a},
                         {"worst_x_s", r.worst_hetero.witness_x_s},
                         {"worst_welfare", r.worst_welfare},
                         {"best_selfish_u", r.best_selfish.u},
                         {"best_selfish_welfare", r.best_selfish_welfare}};
  } catch (const DivisionByZeroWelfare& e) {
    doc["perversity"] = {{"error", e.what()}};
  }
  const auto pd = classify_pd(g);
  if (pd.is_pd) {
    doc["prisoners_dilemma"] = {{"is_pd", true},
                                {"branch", to_string(pd.branch)},
                                {"threshold", pd.threshold ? nlohmann::json(*pd.threshold) : nullptr},
                                {"closed_form_pi", pd_closed_form_pi(g)}};
  } else {
    doc["prisoners_dilemma"] = {{"is_pd", false}};
  }
  return doc;
}

inline void write_equilibria_csv(std::ostream& out, const GameInstance& g) {
  const PayoffMatrix& m = g.matrix();
  out << "set,u,x_a,x_s,kind_a,kind_s,welfare\n";
  auto emit = [&](const char* name, const EquilibriumSet& set) {
    for (const auto& p : set.points)
      out << name << ',' << format_number(p.u) << ',' << format_number(p.witness_x_a) << ','
          << format_number(p.witness_x_s) << ',' << to_string(p.kind_a) << ','
          << to_string(p.kind_s) << ',' << format_number(welfare(p.u, m)) << '\n';
    for (const auto& iv : set.intervals)
      for (double u : {iv.lo, iv.hi}) {
        const auto p = iv.at(u);
        out << name << "_interval," << format_number(p.u) << ',' << format_number(p.witness_x_a)
            << ',' << format_number(p.witness_x_s) << ',' << to_string(p.kind_a) << ','
            << to_string(p.kind_s) << ',' << format_number(welfare(p.u, m)) << '\n';
      }
  };
  emit("heterogeneous", enumerate_equilibria(g));
  emit("selfish", all_selfish_equilibria(g));
  emit("altruistic", all_altruistic_equilibria(g));
}

// --------------------------------------------------------- verification

inline nlohmann::json to_json(const VerificationSummary& s) {
  nlohmann::json doc{{"suite", s.suite},
                     {"trials", s.trials},
                     {"seed", s.seed},
                     {"passed", s.passed()},
                     {"failures", s.failures},
                     {"rejected", s.rejected},
                     {"max_gap", s.max_gap}};
  // Infinite extrema (no PI recorded) become null.
  doc["min_pi"] = s.min_pi <= s.max_pi ? nlohmann::json(s.min_pi) : nullptr;
  doc["max_pi"] = s.min_pi <= s.max_pi ? nlohmann::json(s.max_pi) : nullptr;
  if (s.suite == "cases") doc["case_counts"] = s.case_counts;
  if (s.suite == "theorem1")
    doc["affine_probes"] = {{"count", s.affine_probes}, {"perverse", s.affine_perverse}};
  if (s.counterexample) {
    const auto& c = *s.counterexample;
    doc["counterexample"] = {
        {"trial", c.trial}, {"matrix", to_json(c.matrix)}, {"p_a", c.p_a}, {"reason", c.reason}};
  } else {
    doc["counterexample"] = nullptr;
  }
  return doc;
}

// ------------------------------------------------------------- dynamics

inline nlohmann::json to_json(const Trajectory& tr) {
  auto samples = nlohmann::json::array();
  for (const auto& s : tr.samples) samples.push_back({s.t, s.x_a, s.x_s});
  const auto fin = tr.final_state();
  return {{"converged", tr.converged},
          {"steps", tr.steps},
          {"final_residual", tr.final_residual},
          {"final", {{"x_a", fin.x_a}, {"x_s", fin.x_s}, {"u", fin.utilization()}}},
          {"samples", samples}};
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  out << "t,x_a,x_s,u\n";
  for (const auto& s : tr.samples)
    out << format_number(s.t) << ',' << format_number(s.x_a) << ',' << format_number(s.x_s) << ','
        << format_number(s.x_a + s.x_s) << '\n';
}

}  // namespace altperv
