#include "naqtur/commands.hpp"

#include "naqtur/csv.hpp"
#include "naqtur/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace naqtur {

namespace fs = std::filesystem;

namespace {

std::string sci(double x, int digits = 3) {
  if (!std::isfinite(x)) return format_double(x);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, x);
  return buf;
}

fs::path resolve_output(const std::string& out_dir, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : fs::path(out_dir) / p;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream&) {
  out << "quadrature order: " << options.quadrature_order << '\n';
  if (options.quadrature_order < 64) {
    out << "reduced order: lambda-integral tolerances relaxed to\n"
        << "  kl_weight_integral  max(1e-8, 1e-6 D, " << sci(5.0 * std::exp(-0.55 * options.quadrature_order))
        << ")\n"
        << "  bures_hellinger     " << sci(bures_hellinger_tolerance(options.quadrature_order)) << '\n'
        << "  closed-form / bound " << sci(closed_form_tolerance(options.quadrature_order)) << '\n';
  }
  const auto results = run_verify_suite(options);
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.module.size() + r.name.size() + 1);
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width) + 2)
        << (r.module + "." + r.name) << std::right << "residual " << std::setw(10) << sci(r.residual)
        << "  tol " << std::setw(10) << sci(r.tolerance);
    if (!r.note.empty()) out << "  " << r.note;
    out << '\n';
    if (!r.passed) ++failed;
  }
  out << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  std::optional<std::uint64_t> file_seed;
  if (options.config_path) {
    const ConfigEntries entries = read_config_file(*options.config_path);
    apply_config_entries(config, entries);
    for (const auto& [k, v] : entries)
      if (k == "seed") file_seed = config.collision.seed;
  }
  std::optional<std::uint64_t> flag_seed = options.seed;
  for (const auto& [k, v] : options.overrides) {
    apply_config_entry(config, k, v);
    if (k == "seed" && !flag_seed) flag_seed = config.collision.seed;
  }
  const SeedChoice seed =
      resolve_seed(flag_seed, file_seed, options.env_seed ? options.env_seed->c_str() : nullptr);
  config.collision.seed = seed.seed;
  config.validate();

  out << "master seed: " << seed.seed << " (" << seed.source << ")\n";
  out << "strategy: " << to_string(config.strategy) << ", mode: " << to_string(config.collision.system_mode)
      << ", n_samples: " << config.n_samples << ", workers: " << config.workers << '\n';

  ensure_dir(options.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = run_experiment(config);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (result.records.empty()) {
    err << "error: no records were produced\n";
    return kExitFailure;
  }

  SummaryStats stats = summarize(result.records, config.summary_bins);
  stats.strat_bins = result.bins;
  const fs::path csv_path = resolve_output(options.out_dir, config.records_csv);
  const fs::path json_path = resolve_output(options.out_dir, config.summary_json);
  write_csv(result.records, csv_path.string());
  write_summary_json(stats, config, json_path.string());

  out << "records: " << stats.n_total << " in " << std::fixed << std::setprecision(2) << secs << " s"
      << std::defaultfloat << '\n';
  out << "flagged: " << stats.n_flagged << '\n';
  out << "violations: " << stats.n_violations << " (D_bath < B - 1e-9), " << stats.n_sigma_violations
      << " (Sigma < D_bath - 1e-12), " << stats.n_split_violations << " (split identity)\n";
  out << "min rel_slack: " << sci(stats.min_rel_slack) << ", fraction below 0.05: "
      << stats.frac_rel_slack_below_0_05 << '\n';
  if (result.bins) {
    const auto unreachable = result.bins->unreachable();
    out << "strat bins: " << result.bins->fill.size() - unreachable.size() << "/" << result.bins->fill.size()
        << " filled to " << result.bins->target << " after " << result.bins->attempts << " attempts\n";
    for (int b : unreachable)
      err << "warning: bin " << b << " [" << sci(result.bins->edges[static_cast<std::size_t>(b)]) << ", "
          << sci(result.bins->edges[static_cast<std::size_t>(b) + 1]) << ") holds "
          << result.bins->fill[static_cast<std::size_t>(b)] << " records\n";
  }
  out << "wrote " << csv_path.string() << " and " << json_path.string() << '\n';
  const bool ok = stats.n_violations == 0 && stats.n_sigma_violations == 0 && stats.n_split_violations == 0;
  return ok ? kExitOk : kExitFailure;
}

int cmd_bound(const BoundOptions& options, std::ostream& out, std::ostream& err) {
  if (options.quadrature_order < 2) throw UsageError("quadrature order must be >= 2");
  CsvTable table = read_csv_table(options.input);

  int m = 0;
  while (m < 9 && table.column("dq_" + std::to_string(m + 1))) ++m;
  if (m == 0) throw IoError("'" + options.input + "' is missing columns: dq_1");
  std::vector<std::string> required;
  for (int i = 1; i <= m; ++i)
    for (int j = i; j <= m; ++j) {
      required.push_back("V_" + std::to_string(i) + std::to_string(j));
      required.push_back("Vp_" + std::to_string(i) + std::to_string(j));
    }
  if (const auto missing = table.missing(required); !missing.empty()) {
    std::string names;
    for (const auto& n : missing) names += (names.empty() ? "" : ", ") + n;
    throw IoError("'" + options.input + "' is missing columns: " + names);
  }

  const QuadratureRule quad = gauss_legendre(options.quadrature_order);
  CsvTable result;
  result.header = table.header;
  for (std::string name : {"bound_B", "s_simple", "F_of_s", "range_residual"}) {
    while (table.column(name)) name += "_post";
    result.header.push_back(name);
  }

  std::size_t skipped = 0, out_of_range = 0;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const auto& fields = table.rows[row];
    const std::size_t line = table.line_numbers[row];
    try {
      if (fields.size() != table.header.size())
        throw std::invalid_argument("expected " + std::to_string(table.header.size()) + " fields, found " +
                                    std::to_string(fields.size()));
      auto num = [&](const std::string& name) {
        const double x = parse_double(fields[*table.column(name)]);
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite " + name);
        return x;
      };
      RVector dq(m);
      RMatrix v(m, m), vp(m, m);
      for (int i = 1; i <= m; ++i) {
        dq(i - 1) = num("dq_" + std::to_string(i));
        for (int j = i; j <= m; ++j) {
          const std::string ij = std::to_string(i) + std::to_string(j);
          v(i - 1, j - 1) = v(j - 1, i - 1) = num("V_" + ij);
          vp(i - 1, j - 1) = vp(j - 1, i - 1) = num("Vp_" + ij);
        }
      }
      const BoundReport rep = bound_B(dq, v, vp, quad);
      if (rep.out_of_range()) ++out_of_range;
      auto fields_out = fields;
      for (double x : {rep.B, rep.s_simple, rep.F_of_s, rep.range_residual}) fields_out.push_back(format_double(x));
      result.rows.push_back(std::move(fields_out));
      result.line_numbers.push_back(line);
    } catch (const std::invalid_argument& e) {
      ++skipped;
      err << "warning: " << options.input << ":" << line << ": " << e.what() << "; row skipped\n";
    }
  }

  std::string output = options.output;
  if (output.empty()) {
    fs::path p(options.input);
    output = (p.parent_path() / (p.stem().string() + ".bound.csv")).string();
  }
  write_csv_table(result, output);
  out << "rows: " << result.rows.size() << " written, " << skipped << " skipped, " << out_of_range
      << " out of range (bound_B = inf)\n";
  out << "m = " << m << ", quadrature order " << options.quadrature_order << '\n';
  out << "wrote " << output << '\n';
  return kExitOk;
}

int cmd_report(const ReportOptions& options, std::ostream& out, std::ostream&) {
  if (options.n_bins < 1) throw UsageError("--bins must be >= 1");
  if (options.inset_points < 2) throw UsageError("inset points must be >= 2");
  const CsvTable table = read_csv_table(options.input);
  const std::vector<std::string> required = {"bound_B", "d_bath", "cov_drift", "dq_1", "rel_slack", "robertson_C"};
  if (const auto missing = table.missing(required); !missing.empty()) {
    std::string names;
    for (const auto& n : missing) names += (names.empty() ? "" : ", ") + n;
    throw IoError("'" + options.input + "' is missing columns: " + names);
  }
  std::vector<std::size_t> dq_cols;
  for (int k = 1; table.column("dq_" + std::to_string(k)); ++k) dq_cols.push_back(*table.column("dq_" + std::to_string(k)));

  ensure_dir(options.out_dir);
  const fs::path fig1 = resolve_output(options.out_dir, "fig1.tsv");
  const fs::path fig2 = resolve_output(options.out_dir, "fig2.tsv");
  const fs::path binned = resolve_output(options.out_dir, "fig2_binned.tsv");
  const fs::path inset = resolve_output(options.out_dir, "inset.tsv");

  std::ofstream f1 = open_out(fig1), f2 = open_out(fig2);
  f1 << "bound_B\td_bath\tcov_drift\n";
  f2 << "dq_norm\trel_slack\trobertson_C\n";
  std::vector<double> norms, slacks;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const auto& fields = table.rows[row];
    auto num = [&](const std::string& name) {
      try {
        if (fields.size() != table.header.size()) throw std::invalid_argument("wrong field count");
        return parse_double(fields[*table.column(name)]);
      } catch (const std::invalid_argument& e) {
        throw IoError(options.input + ":" + std::to_string(table.line_numbers[row]) + ": " + e.what());
      }
    };
    double norm2 = 0.0;
    for (std::size_t c : dq_cols) {
      const double x = num(table.header[c]);
      norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    const double slack = num("rel_slack");
    f1 << format_double(num("bound_B")) << '\t' << format_double(num("d_bath")) << '\t'
       << format_double(num("cov_drift")) << '\n';
    f2 << format_double(norm) << '\t' << format_double(slack) << '\t' << format_double(num("robertson_C")) << '\n';
    norms.push_back(norm);
    slacks.push_back(slack);
  }
  if (!f1 || !f2) throw IoError("write error in '" + options.out_dir + "'");

  std::ofstream fb = open_out(binned);
  fb << "dq_norm_lo\tdq_norm_hi\tdq_norm_center\tcount\tmean_rel_slack\tstd_rel_slack\n";
  for (const auto& b : binned_average(norms, slacks, options.n_bins))
    fb << format_double(b.lo) << '\t' << format_double(b.hi) << '\t' << format_double(std::sqrt(b.lo * b.hi))
       << '\t' << b.count << '\t' << format_double(b.mean) << '\t' << format_double(b.stddev) << '\n';

  std::ofstream fi = open_out(inset);
  fi << "s\tF\tquadratic\n";
  for (int i = 0; i < options.inset_points; ++i) {
    const double s = std::pow(10.0, -4.0 + 6.0 * i / (options.inset_points - 1));
    fi << format_double(s) << '\t' << format_double(F_closed(s)) << '\t' << format_double(s / 2 - s * s / 12) << '\n';
  }
  if (!fb || !fi) throw IoError("write error in '" + options.out_dir + "'");

  out << "records: " << table.rows.size() << '\n';
  out << "wrote " << fig1.string() << ", " << fig2.string() << ", " << binned.string() << ", "
      << inset.string() << '\n';
  return kExitOk;
}

}  // namespace naqtur
