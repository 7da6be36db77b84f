#include "naqtur/commands.hpp"
#include "naqtur/csv.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace naqtur;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("naqtur_cmd_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int simulate(const fs::path& dir, ConfigEntries overrides, std::uint64_t seed = 3) {
  SimulateOptions o;
  o.out_dir = dir.string();
  o.seed = seed;
  o.overrides = std::move(overrides);
  std::ostringstream out, err;
  return run_guarded([&] { return cmd_simulate(o, out, err); }, err);
}

}  // namespace

TEST_SUITE("commands") {
  TEST_CASE("simulate then bound reproduces bound_B") {
    const fs::path dir = scratch("selfcons");
    REQUIRE(simulate(dir, {{"n_samples", "150"}, {"system_mode", "mixed"}}) == kExitOk);
    BoundOptions b;
    b.input = (dir / "records.csv").string();
    std::ostringstream out, err;
    REQUIRE(run_guarded([&] { return cmd_bound(b, out, err); }, err) == kExitOk);
    const CsvTable t = read_csv_table((dir / "records.bound.csv").string());
    REQUIRE(t.rows.size() == 150);
    const auto orig = *t.column("bound_B");
    const auto post = t.column("bound_B_post");
    REQUIRE(post.has_value());
    REQUIRE(t.column("s_simple_post").has_value());
    for (const auto& row : t.rows) {
      const double a = parse_double(row[orig]), c = parse_double(row[*post]);
      CHECK(std::abs(a - c) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
    fs::remove_all(dir);
  }

  TEST_CASE("bound on hand-made rows") {
    const fs::path dir = scratch("bound");
    const fs::path in = dir / "in.csv";
    write_text(in,
               "id,dq_1,dq_2,V_11,V_12,V_22,Vp_11,Vp_12,Vp_22\n"
               "zero,0,0,1,0,1,1,0,1\n"
               "same,0.3,0.4,1,0,1,1,0,1\n"
               "singular,0.3,0.4,1,0,0,1,0,0\n"
               "short,0.3,0.4\n"
               "text,abc,0.4,1,0,1,1,0,1\n"
               "negative,0.1,0.1,-1,0,1,1,0,1\n");
    BoundOptions b;
    b.input = in.string();
    b.output = (dir / "out.csv").string();
    std::ostringstream out, err;
    REQUIRE(run_guarded([&] { return cmd_bound(b, out, err); }, err) == kExitOk);
    CHECK(out.str().find("3 skipped") != std::string::npos);
    CHECK(err.str().find("in.csv:5") != std::string::npos);
    const CsvTable t = read_csv_table(b.output);
    REQUIRE(t.rows.size() == 3);
    const auto B = *t.column("bound_B");
    CHECK(parse_double(t.rows[0][B]) == 0.0);
    const double s = 0.25;
    const double x = std::sqrt(s / (s + 4));
    CHECK(std::abs(parse_double(t.rows[1][B]) - 2 * x * std::atanh(x)) <= 1e-8);
    CHECK(t.rows[2][B] == "inf");
    fs::remove_all(dir);
  }

  TEST_CASE("bound reports missing columns") {
    const fs::path dir = scratch("missing");
    write_text(dir / "in.csv", "dq_1,dq_2,V_11,V_22\n0,0,1,1\n");
    BoundOptions b;
    b.input = (dir / "in.csv").string();
    std::ostringstream out, err;
    CHECK(run_guarded([&] { return cmd_bound(b, out, err); }, err) == kExitIo);
    CHECK(err.str().find("V_12") != std::string::npos);
    CHECK(err.str().find("Vp_11") != std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("report writes plot files") {
    const fs::path dir = scratch("report");
    REQUIRE(simulate(dir, {{"n_samples", "80"}}) == kExitOk);
    ReportOptions r;
    r.input = (dir / "records.csv").string();
    r.out_dir = (dir / "fig").string();
    std::ostringstream out, err;
    REQUIRE(run_guarded([&] { return cmd_report(r, out, err); }, err) == kExitOk);
    const CsvTable recs = read_csv_table(r.input);
    auto lines = [](const fs::path& p) {
      std::ifstream in(p);
      std::string l;
      int n = 0;
      while (std::getline(in, l)) ++n;
      return n;
    };
    CHECK(lines(dir / "fig" / "fig1.tsv") == 81);
    CHECK(lines(dir / "fig" / "fig2.tsv") == 81);
    CHECK(lines(dir / "fig" / "fig2_binned.tsv") == 26);
    CHECK(lines(dir / "fig" / "inset.tsv") == 201);
    CHECK(read_text(dir / "fig" / "fig1.tsv").rfind("bound_B\td_bath\tcov_drift\n", 0) == 0);

    write_text(dir / "bad.csv", "bound_B,d_bath\n1,2\n");
    r.input = (dir / "bad.csv").string();
    std::ostringstream err2;
    CHECK(run_guarded([&] { return cmd_report(r, out, err2); }, err2) == kExitIo);
    CHECK(err2.str().find("cov_drift") != std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("simulate is deterministic and honours config precedence") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(simulate(a, {{"n_samples", "40"}, {"strategy", "stratified"}, {"n_bins", "4"}}) == kExitOk);
    REQUIRE(simulate(b, {{"n_samples", "40"}, {"strategy", "stratified"}, {"n_bins", "4"}, {"workers", "3"}}) ==
            kExitOk);
    CHECK(read_text(a / "records.csv") == read_text(b / "records.csv"));

    write_text(a / "cfg.txt", "seed = 99\nn_samples = 5\n");
    SimulateOptions o;
    o.config_path = (a / "cfg.txt").string();
    o.out_dir = a.string();
    o.env_seed = "7";
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(o, out, err) == kExitOk);
    CHECK(out.str().find("master seed: 99 (config)") != std::string::npos);
    o.seed = 1;
    std::ostringstream out2;
    REQUIRE(cmd_simulate(o, out2, err) == kExitOk);
    CHECK(out2.str().find("master seed: 1 (flag)") != std::string::npos);

    write_text(a / "bad.txt", "n_samples = 5\nbogus = 1\n");
    o.config_path = (a / "bad.txt").string();
    std::ostringstream err3;
    CHECK(run_guarded([&] { return cmd_simulate(o, out, err3); }, err3) == kExitUsage);
    CHECK(err3.str().find("bogus") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("verify passes by default and at reduced order") {
    for (int order : {64, 8}) {
      VerifyOptions v;
      v.quadrature_order = order;
      v.samples = 60;
      std::ostringstream out, err;
      CHECK(cmd_verify(v, out, err) == kExitOk);
      CHECK(out.str().find("FAIL") == std::string::npos);
      if (order < 64) CHECK(out.str().find("relaxed") != std::string::npos);
    }
  }
}
