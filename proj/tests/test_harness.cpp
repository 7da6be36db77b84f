#include "naqtur/harness.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <unordered_set>

using namespace naqtur;

namespace {

ExperimentConfig small_config(Strategy s, int n = 200) {
  ExperimentConfig c;
  c.collision.system_mode = SystemMode::Mixed;
  c.collision.seed = 17;
  c.strategy = s;
  c.n_samples = n;
  return c;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("naqtur_test_" + name)).string();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("derive_seed") {
    CHECK(derive_seed(0, 0) != derive_seed(0, 1));
    CHECK(derive_seed(5, 9) == derive_seed(5, 9));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    std::unordered_set<std::uint64_t> seen;
    constexpr std::uint64_t n = 1'000'000;
    seen.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) seen.insert(derive_seed(42, i));
    CHECK(seen.size() == n);
  }

  TEST_CASE("config validation and enum names") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.n_samples = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = ExperimentConfig{};
    c.strategy = Strategy::Stratified;
    c.n_bins = 1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = ExperimentConfig{};
    c.hunt_keep_fraction = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    for (auto s : {Strategy::MonteCarlo, Strategy::Stratified, Strategy::SaturationHunt})
      CHECK(parse_strategy(to_string(s)) == s);
    CHECK(parse_strat_axis("bound_B") == StratAxis::BoundB);
    CHECK_THROWS_AS(parse_strategy("mc"), ValidationError);
  }

  TEST_CASE("Monte Carlo run") {
    const ExperimentResult r = run_monte_carlo(small_config(Strategy::MonteCarlo));
    REQUIRE(r.records.size() == 200);
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      CHECK(r.records[i].sample_id == i);
      CHECK(r.records[i].collision.sample_seed == derive_seed(17, i));
    }
    const SummaryStats s = summarize(r.records);
    CHECK(s.n_violations == 0);
    CHECK(s.n_sigma_violations == 0);
    CHECK(s.n_split_violations == 0);
    CHECK(records_to_csv(r.records) == records_to_csv(run_monte_carlo(small_config(Strategy::MonteCarlo)).records));
  }

  TEST_CASE("CSV identical across worker counts") {
    for (auto s : {Strategy::MonteCarlo, Strategy::Stratified, Strategy::SaturationHunt}) {
      ExperimentConfig c = small_config(s, 100);
      c.n_bins = 5;
      c.hunt_rounds = 2;
      c.workers = 1;
      const std::string one = records_to_csv(run_experiment(c).records);
      c.workers = 4;
      CHECK(one == records_to_csv(run_experiment(c).records));
    }
  }

  TEST_CASE("stratified bins over s in [1e-4, 10]") {
    ExperimentConfig c = small_config(Strategy::Stratified, 400);
    const ExperimentResult r = run_stratified(c);
    REQUIRE(r.bins);
    const StratBins& b = *r.bins;
    CHECK(b.edges.size() == 21);
    CHECK(b.edges.front() == doctest::Approx(1e-4));
    CHECK(b.edges.back() == doctest::Approx(10.0));
    CHECK(b.target == 20);
    CHECK(b.attempts <= 10ULL * 20 * 20);
    for (int f : b.fill) CHECK(f > 0);
    if (b.unreachable().empty()) CHECK(r.records.size() >= 400);
    const auto [lo, hi] = std::minmax_element(b.fill.begin(), b.fill.end());
    CHECK(*hi <= 2 * *lo);
    // fill counts agree with the records
    std::vector<int> recount(b.fill.size(), 0);
    for (const auto& rec : r.records) {
      const double v = strat_value(rec.collision, c.strat_axis);
      const auto it = std::upper_bound(b.edges.begin(), b.edges.end(), v);
      recount[static_cast<std::size_t>(it - b.edges.begin() - 1)]++;
    }
    CHECK(recount == b.fill);
  }

  TEST_CASE("saturation hunt") {
    ExperimentConfig c = small_config(Strategy::SaturationHunt, 200);
    c.n_bins = 10;
    c.hunt_rounds = 3;
    const ExperimentResult base = run_stratified(c);
    const ExperimentResult hunt = run_saturation_hunt(c);
    double base_min = 1e300, hunt_min = 1e300;
    for (const auto& r : base.records) base_min = std::min(base_min, r.collision.rel_slack);
    std::map<std::uint64_t, const ExperimentRecord*> by_id;
    for (const auto& r : hunt.records) {
      hunt_min = std::min(hunt_min, r.collision.rel_slack);
      by_id[r.sample_id] = &r;
      CHECK(r.strategy == Strategy::SaturationHunt);
    }
    CHECK(hunt_min <= base_min);
    CHECK(by_id.size() == hunt.records.size());
    int children = 0;
    for (const auto& r : hunt.records) {
      if (r.round == 0) {
        CHECK_FALSE(r.parent_id.has_value());
        continue;
      }
      ++children;
      REQUIRE(r.parent_id.has_value());
      REQUIRE(by_id.count(*r.parent_id) == 1);
      const ExperimentRecord& parent = *by_id[*r.parent_id];
      CHECK(parent.round < r.round);
      CHECK(r.collision.rel_slack < parent.collision.rel_slack);
    }
    CHECK(children > 0);
    CHECK(std::is_sorted(hunt.records.begin(), hunt.records.end(),
                         [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; }));
  }

  TEST_CASE("quantile and binned_average") {
    CHECK(quantile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({3, 1, 2, 4}, 0.0) == 1);
    CHECK(quantile({3, 1, 2, 4}, 1.0) == 4);
    CHECK(quantile({5.0, std::nan("")}, 0.5) == 5.0);
    CHECK(std::isnan(quantile({}, 0.5)));

    const std::vector<double> x = {1, 2, 10, 20, 100};
    const std::vector<double> y = {1, 3, 5, 7, 9};
    const auto bins = binned_average(x, y, 2);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].count == 2);
    CHECK(bins[0].mean == doctest::Approx(2.0));
    CHECK(bins[1].count == 3);
    CHECK(bins[1].mean == doctest::Approx(7.0));
    CHECK(bins[1].stddev == doctest::Approx(2.0));
  }

  TEST_CASE("summarize") {
    CHECK_THROWS_AS(summarize({}), std::invalid_argument);
    const auto recs = run_monte_carlo(small_config(Strategy::MonteCarlo, 100)).records;
    const SummaryStats s = summarize(recs, 10);
    CHECK(s.n_total == 100);
    CHECK(s.slack_bins.size() == 10);
    CHECK(s.gap_quantiles.at(0.0) >= -1e-9);
    CHECK(s.rel_slack_quantiles.at(0.5) >= 0.0);
    CHECK(s.min_rel_slack == doctest::Approx(s.rel_slack_quantiles.at(0.0)));
    CHECK(s.corr_rel_slack_robertson_C >= -1.0);
    CHECK(s.corr_rel_slack_robertson_C <= 1.0);
  }

  TEST_CASE("CSV schema and round trip") {
    const auto recs = run_monte_carlo(small_config(Strategy::MonteCarlo, 50)).records;
    const std::string csv = records_to_csv(recs);
    CHECK(csv.rfind(
              "sample_id,strategy,round,mode,r,phi,eps,k,random_frame,sigma,mutual_info,d_bath,bound_B,s_simple,"
              "F_of_s,gap_abs,rel_slack,cov_drift,robertson_C,dq_1,dq_2,V_11,V_12,V_22,Vp_11,Vp_12,Vp_22,"
              "range_residual,flags,sample_seed\n",
              0) == 0);
    const std::string path = temp_path("roundtrip.csv");
    write_csv(recs, path);
    const auto back = read_records_csv(path);
    std::filesystem::remove(path);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& a = recs[i].collision;
      const auto& b = back[i].collision;
      CHECK(back[i].sample_id == recs[i].sample_id);
      CHECK(b.mode == a.mode);
      CHECK(b.sample_seed == a.sample_seed);
      for (auto [x, y] : {std::pair{a.sigma, b.sigma}, {a.mutual_info, b.mutual_info}, {a.d_bath, b.d_bath},
                          {a.bound_B, b.bound_B}, {a.s_simple, b.s_simple}, {a.rel_slack, b.rel_slack},
                          {a.cov_drift, b.cov_drift}, {a.robertson_C, b.robertson_C}, {a.r, b.r}, {a.phi, b.phi},
                          {a.dq(0), b.dq(0)}, {a.Vp(1, 1), b.Vp(1, 1)}, {a.range_residual, b.range_residual}})
        CHECK(std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)));
    }
  }

  TEST_CASE("I/O errors name the path") {
    const auto recs = run_monte_carlo(small_config(Strategy::MonteCarlo, 2)).records;
    try {
      write_csv(recs, "/nonexistent-dir/x.csv");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
    }
    CHECK_THROWS_AS(read_records_csv("/nonexistent-dir/y.csv"), IoError);
  }

  TEST_CASE("summary JSON") {
    const auto r = run_stratified(small_config(Strategy::Stratified, 100));
    SummaryStats s = summarize(r.records);
    s.strat_bins = r.bins;
    const std::string path = temp_path("summary.json");
    write_summary_json(s, small_config(Strategy::Stratified, 100), path);
    std::ifstream in(path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::filesystem::remove(path);
    for (const char* key : {"\"n_total\"", "\"n_flagged\"", "\"n_violations\"", "\"gap_quantiles\"",
                            "\"rel_slack_quantiles\"", "\"rel_slack_vs_dq_norm_bins\"", "\"min_rel_slack\"",
                            "\"corr_rel_slack_robertson_C\"", "\"strat_bins\"", "\"edges\"", "\"config\""})
      CHECK(text.find(key) != std::string::npos);
  }
}
