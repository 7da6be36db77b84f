#include "naqtur/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace naqtur;

namespace {

std::optional<std::string> env_seed() {
  const char* v = std::getenv("NAQTUR_SEED");
  if (v && *v) return std::string(v);
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"naqtur: matrix thermodynamic uncertainty bounds for qubit collision models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "naqtur 0.1.0");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the identity and invariant suite");
  VerifyOptions vopt;
  std::optional<std::uint64_t> vseed;
  verify->add_option("--quadrature-order", vopt.quadrature_order, "Gauss-Legendre nodes on [0, 1]")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", vseed, "Master seed (falls back to NAQTUR_SEED, then 0)");
  verify->add_option("--samples", vopt.samples, "Random draws per check")->check(CLI::PositiveNumber);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Sample collisions and write records CSV + summary JSON");
  SimulateOptions sopt;
  std::vector<std::string> sets;
  std::optional<std::string> n, strategy, mode, workers, qorder, axis, bins, rounds, records, summary;
  simulate->add_option("--config", sopt.config_path, "key = value config file")->check(CLI::ExistingFile);
  simulate->add_option("--seed", sopt.seed, "Master seed (overrides config and NAQTUR_SEED)");
  simulate->add_option("--n", n, "n_samples");
  simulate->add_option("--strategy", strategy, "monte-carlo | stratified | saturation-hunt");
  simulate->add_option("--mode", mode, "haar-isospectral | small-isospectral | independent-random | mixed");
  simulate->add_option("--workers", workers, "Worker threads");
  simulate->add_option("--quadrature-order", qorder, "Gauss-Legendre nodes on [0, 1]");
  simulate->add_option("--strat-axis", axis, "s_simple | bound_B");
  simulate->add_option("--n-bins", bins, "Stratification bins");
  simulate->add_option("--hunt-rounds", rounds, "Saturation-hunt rounds");
  simulate->add_option("--records", records, "Records CSV file name");
  simulate->add_option("--summary", summary, "Summary JSON file name");
  simulate->add_option("--set", sets, "Override any config key: --set key=value (repeatable)");
  simulate->add_option("--out-dir", sopt.out_dir, "Output directory");

  // bound
  auto* bound = app.add_subcommand("bound", "Evaluate the bound on an external (dq, V, V') CSV");
  BoundOptions bopt;
  bound->add_option("input", bopt.input, "Input CSV")->required()->check(CLI::ExistingFile);
  bound->add_option("-o,--output", bopt.output, "Output CSV (default <input>.bound.csv)");
  bound->add_option("--quadrature-order", bopt.quadrature_order, "Gauss-Legendre nodes on [0, 1]")
      ->check(CLI::PositiveNumber);

  // report
  auto* report = app.add_subcommand("report", "Write plot-ready TSV files from a records CSV");
  ReportOptions ropt;
  report->add_option("input", ropt.input, "Records CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--out-dir", ropt.out_dir, "Output directory");
  report->add_option("--bins", ropt.n_bins, "Bins of the running average")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  return run_guarded(
      [&]() -> int {
        if (*verify) {
          const SeedChoice seed = resolve_seed(vseed, std::nullopt, env_seed() ? env_seed()->c_str() : nullptr);
          vopt.seed = seed.seed;
          std::cout << "master seed: " << seed.seed << " (" << seed.source << ")\n";
          return cmd_verify(vopt, std::cout, std::cerr);
        }
        if (*simulate) {
          const std::pair<const char*, std::optional<std::string>*> named[] = {
              {"n_samples", &n},          {"strategy", &strategy},   {"system_mode", &mode},
              {"workers", &workers},      {"quadrature_order", &qorder}, {"strat_axis", &axis},
              {"n_bins", &bins},          {"hunt_rounds", &rounds},  {"records_csv", &records},
              {"summary_json", &summary}};
          for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
            sopt.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
          }
          for (const auto& [key, value] : named)
            if (*value) sopt.overrides.emplace_back(key, **value);
          sopt.env_seed = env_seed();
          return cmd_simulate(sopt, std::cout, std::cerr);
        }
        if (*bound) return cmd_bound(bopt, std::cout, std::cerr);
        return cmd_report(ropt, std::cout, std::cerr);
      },
      std::cerr);
}
