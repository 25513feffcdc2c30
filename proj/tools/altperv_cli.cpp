// altperv: command-line front end for the heterogeneous two-strategy game
// analyses. Exit codes: 0 success, 1 property violation, 2 input error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "altperv/dynamics.hpp"
#include "altperv/report.hpp"
#include "altperv/spec_file.hpp"
#include "altperv/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InputError("cannot open output file '" + out_path + "'");
  out << text;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PERVERSITY_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError("PERVERSITY_SEED must be a nonnegative integer");
  }
  return 0;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact analysis of two-strategy population games with altruistic and selfish agents"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path;
  std::string format;  // empty selects the command's default
  std::size_t sweep_grid = 201;
  std::size_t landscape_grid = 101;

  auto add_common = [&](CLI::App* cmd, std::size_t* grid) {
    cmd->add_option("--spec", spec_path, "game specification file (key = value or JSON)")
        ->required();
    cmd->add_option("--out", out_path, "write output to this file instead of stdout");
    cmd->add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    if (grid) {
      cmd->add_option("--grid", *grid, "number of evenly spaced grid points (>= 2)")
          ->check(CLI::Range(std::size_t{2}, std::size_t{100'000'000}))
          ->capture_default_str();
    }
  };

  auto* analyze = app.add_subcommand("analyze", "curvature, equilibria, perversity index (json)");
  add_common(analyze, nullptr);

  auto* sweep = app.add_subcommand("pi-sweep", "perversity index as a function of p_a (csv)");
  add_common(sweep, &sweep_grid);

  auto* land = app.add_subcommand("landscape", "welfare and payoff curves over u (csv)");
  add_common(land, &landscape_grid);

  auto* verify = app.add_subcommand("verify", "randomized verification campaigns");
  std::string suite;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed_flag;
  altperv::OracleOptions oracle_opts;
  verify->add_option("suite", suite, "theorem1 | cases | proposition1 | oracle")
      ->required()
      ->check(CLI::IsMember({"theorem1", "cases", "proposition1", "oracle"}));
  verify->add_option("--trials", trials, "number of random games")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed_flag, "seed (falls back to PERVERSITY_SEED, then 0)");
  verify->add_option("--grid-step", oracle_opts.grid_step, "oracle grid spacing")
      ->capture_default_str();
  verify->add_option("--tol", oracle_opts.tol, "oracle payoff tolerance")->capture_default_str();
  verify->add_option("--out", out_path, "write the JSON report to this file");
  verify->add_option("--format", format, "report format")->check(CLI::IsMember({"json"}));

  auto* dyn =
      app.add_subcommand("dynamics-run", "integrate the projected payoff-difference flow (json)");
  add_common(dyn, nullptr);
  altperv::FlowOptions flow;
  std::optional<double> x_a0;
  std::optional<double> x_s0;
  dyn->add_option("--dt", flow.dt, "step size")->capture_default_str();
  dyn->add_option("--max-steps", flow.max_steps, "step budget")->capture_default_str();
  dyn->add_option("--residual-tol", flow.residual_tol, "convergence threshold")
      ->capture_default_str();
  dyn->add_option("--record-every", flow.record_every, "keep every n-th iterate")
      ->capture_default_str();
  dyn->add_option("--x-a", x_a0, "initial cooperating altruist mass (default p_a / 2)");
  dyn->add_option("--x-s", x_s0, "initial cooperating selfish mass (default p_s / 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*analyze) {
      const auto spec = altperv::load_game_spec(spec_path);
      const auto doc = altperv::analyze(spec);
      if (format == "csv") {
        std::ostringstream os;
        altperv::write_equilibria_csv(os, spec.instance());
        emit(os.str(), out_path);
      } else {
        emit(dump(doc), out_path);
      }
      if (doc["perversity"].contains("error")) {
        std::cerr << "error: " << doc["perversity"]["error"].get<std::string>() << '\n';
        return kExitInput;
      }
    } else if (*sweep) {
      const auto spec = altperv::load_game_spec(spec_path);
      const auto rows = altperv::pi_sweep(spec.matrix, sweep_grid);
      std::ostringstream os;
      if (format == "json")
        os << dump(altperv::sweep_json(rows));
      else
        altperv::write_sweep_csv(os, rows);
      emit(os.str(), out_path);
    } else if (*land) {
      const auto spec = altperv::load_game_spec(spec_path);
      const auto rows = altperv::landscape(spec.matrix, landscape_grid);
      std::ostringstream os;
      if (format == "json")
        os << dump(altperv::landscape_json(rows));
      else
        altperv::write_landscape_csv(os, rows);
      emit(os.str(), out_path);
    } else if (*verify) {
      const std::uint64_t seed = resolve_seed(seed_flag);
      altperv::VerificationSummary summary;
      try {
        if (suite == "theorem1")
          summary = altperv::verify_theorem1(trials.value_or(10'000), seed);
        else if (suite == "cases")
          summary = altperv::verify_proof_cases(trials.value_or(2'000), seed);
        else if (suite == "proposition1")
          summary = altperv::verify_proposition1(trials.value_or(1'000), seed);
        else
          summary = altperv::verify_oracle(trials.value_or(200), seed, oracle_opts);
      } catch (const altperv::VerificationFailure& f) {
        emit(dump(altperv::to_json(f.summary())), out_path);
        std::cerr << f.what() << '\n';
        return kExitViolation;
      }
      emit(dump(altperv::to_json(summary)), out_path);
    } else if (*dyn) {
      const auto spec = altperv::load_game_spec(spec_path);
      const auto g = spec.instance();
      const altperv::PopulationState init{x_a0.value_or(g.p_a() / 2.0),
                                          x_s0.value_or(g.p_s() / 2.0)};
      const auto tr = altperv::integrate(g, init, flow);
      std::ostringstream os;
      if (format == "csv")
        altperv::write_trajectory_csv(os, tr);
      else
        os << dump(altperv::to_json(tr));
      emit(os.str(), out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
