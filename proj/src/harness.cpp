#include "naqtur/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace naqtur {

namespace {

// Evaluates fn(i) for i in [0, count) on `workers` threads; output order is by index.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, int workers, Fn&& fn) {
  std::vector<std::optional<T>> slots(count);
  const auto nthreads = static_cast<std::size_t>(std::max(1, workers));
  if (nthreads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) slots[i].emplace(fn(i));
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(nthreads, count); ++t) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            slots[i].emplace(fn(i));
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> log_edges(double lo, double hi, int n) {
  std::vector<double> edges(static_cast<std::size_t>(n) + 1);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i <= n; ++i) edges[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / n);
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

// Index of the bin holding x, or -1 when outside [edges.front(), edges.back()).
int find_bin(const std::vector<double>& edges, double x) {
  if (!(x >= edges.front() && x < edges.back())) return -1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  return static_cast<int>(it - edges.begin()) - 1;
}

CollisionRecord simulate_index(const ExperimentConfig& config, const QuadratureRule& quad,
                               std::uint64_t index) {
  return simulate_one(config.collision, derive_seed(config.collision.seed, index), quad);
}

bool usable_for_hunt(const CollisionRecord& rec) {
  return !rec.flagged() && std::isfinite(rec.rel_slack);
}

CollisionParams jitter(const CollisionParams& parent, const ExperimentConfig& config, double scale,
                       Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const CollisionConfig& cc = config.collision;
  CollisionParams child = parent;
  child.r = std::clamp(parent.r + scale * config.hunt_sigma_r * normal(rng), cc.r_min, cc.r_max);
  child.phi = std::clamp(parent.phi + scale * config.hunt_sigma_phi * normal(rng), cc.phi_min, cc.phi_max);
  if (child.system.mode == SystemMode::SmallIsospectral) {
    const double eps = parent.system.eps * std::exp(scale * config.hunt_sigma_log_eps * normal(rng));
    child.system.eps = std::clamp(eps, cc.eps_min, cc.eps_max);
    child.system.rotation = su2_rotation(child.system.axis, child.system.eps);
  }
  if (child.random_frame) {
    const Vec3 axis = random_unit_vector(rng);
    const double angle = scale * config.hunt_sigma_frame * normal(rng);
    child.frame = adjoint_rotation(su2_rotation(axis, angle)) * parent.frame;
  }
  return child;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::MonteCarlo: return "monte-carlo";
    case Strategy::Stratified: return "stratified";
    case Strategy::SaturationHunt: return "saturation-hunt";
  }
  return "unknown";
}

std::string_view to_string(StratAxis a) {
  return a == StratAxis::SSimple ? "s_simple" : "bound_B";
}

Strategy parse_strategy(std::string_view text) {
  for (auto s : {Strategy::MonteCarlo, Strategy::Stratified, Strategy::SaturationHunt})
    if (text == to_string(s)) return s;
  throw ValidationError("unknown strategy '" + std::string(text) +
                        "' (expected monte-carlo, stratified or saturation-hunt)");
}

StratAxis parse_strat_axis(std::string_view text) {
  if (text == "s_simple") return StratAxis::SSimple;
  if (text == "bound_B") return StratAxis::BoundB;
  throw ValidationError("unknown strat_axis '" + std::string(text) + "' (expected s_simple or bound_B)");
}

void ExperimentConfig::validate() const {
  collision.validate();
  auto fail = [](const std::string& msg) { throw ValidationError("experiment config: " + msg); };
  if (n_samples < 1) fail("n_samples must be >= 1");
  if (strategy != Strategy::MonteCarlo && n_bins < 2) fail("n_bins must be >= 2");
  if (!(0.0 < strat_min && strat_min < strat_max)) fail("need 0 < strat_min < strat_max");
  if (hunt_rounds < 0) fail("hunt_rounds must be >= 0");
  if (!(hunt_keep_fraction > 0.0 && hunt_keep_fraction < 1.0)) fail("hunt_keep_fraction must lie in (0, 1)");
  if (!(hunt_sigma_r >= 0 && hunt_sigma_phi >= 0 && hunt_sigma_log_eps >= 0 && hunt_sigma_frame >= 0))
    fail("hunt jitter widths must be >= 0");
  if (quadrature_order < 2) fail("quadrature_order must be >= 2");
  if (summary_bins < 1) fail("summary_bins must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
}

std::vector<int> StratBins::unreachable() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fill.size(); ++i)
    if (fill[i] < target) out.push_back(static_cast<int>(i));
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

double strat_value(const CollisionRecord& rec, StratAxis axis) {
  return axis == StratAxis::SSimple ? rec.s_simple : rec.bound_B;
}

ExperimentResult run_monte_carlo(const ExperimentConfig& config) {
  config.validate();
  const QuadratureRule quad = gauss_legendre(config.quadrature_order);
  const auto n = static_cast<std::size_t>(config.n_samples);
  auto recs = parallel_map<CollisionRecord>(n, config.workers, [&](std::size_t i) {
    return simulate_index(config, quad, i);
  });
  ExperimentResult result;
  result.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ExperimentRecord er;
    er.sample_id = i;
    er.strategy = Strategy::MonteCarlo;
    er.collision = std::move(recs[i]);
    result.records.push_back(std::move(er));
  }
  return result;
}

ExperimentResult run_stratified(const ExperimentConfig& config) {
  config.validate();
  const QuadratureRule quad = gauss_legendre(config.quadrature_order);
  StratBins bins;
  bins.axis = config.strat_axis;
  bins.edges = log_edges(config.strat_min, config.strat_max, config.n_bins);
  bins.fill.assign(static_cast<std::size_t>(config.n_bins), 0);
  bins.target = (config.n_samples + config.n_bins - 1) / config.n_bins;
  const std::uint64_t budget = 10ULL * static_cast<std::uint64_t>(bins.target) *
                               static_cast<std::uint64_t>(config.n_bins);
  const std::uint64_t batch = std::max<std::uint64_t>(256, 64ULL * static_cast<std::uint64_t>(config.workers));

  ExperimentResult result;
  int open_bins = config.n_bins;
  std::uint64_t next = 0;
  while (open_bins > 0 && next < budget) {
    const std::uint64_t count = std::min(batch, budget - next);
    const std::uint64_t base = next;
    auto recs = parallel_map<CollisionRecord>(count, config.workers, [&](std::size_t i) {
      return simulate_index(config, quad, base + i);
    });
    // Acceptance is decided sequentially in index order, so the outcome does not
    // depend on the worker count.
    for (std::uint64_t i = 0; i < count && open_bins > 0; ++i) {
      ++next;
      CollisionRecord& rec = recs[i];
      const int b = find_bin(bins.edges, strat_value(rec, config.strat_axis));
      if (b < 0) continue;
      auto& f = bins.fill[static_cast<std::size_t>(b)];
      if (f >= bins.target) continue;
      ++f;
      if (f == bins.target) --open_bins;
      ExperimentRecord er;
      er.sample_id = base + i;
      er.strategy = Strategy::Stratified;
      er.collision = std::move(rec);
      result.records.push_back(std::move(er));
    }
  }
  bins.attempts = next;
  result.bins = std::move(bins);
  return result;
}

ExperimentResult run_saturation_hunt(const ExperimentConfig& config) {
  ExperimentResult result = run_stratified(config);
  const QuadratureRule quad = gauss_legendre(config.quadrature_order);
  StratBins& bins = *result.bins;
  for (auto& r : result.records) r.strategy = Strategy::SaturationHunt;

  std::uint64_t next_id = bins.attempts;
  const auto n_bins = static_cast<std::size_t>(config.n_bins);
  const int children_per_parent = std::max(1, static_cast<int>(std::lround(1.0 / config.hunt_keep_fraction)));

  for (int round = 1; round <= config.hunt_rounds; ++round) {
    const double scale = std::ldexp(1.0, -(round - 1));

    // Current members of each bin, ordered by slack then id.
    std::vector<std::vector<std::size_t>> members(n_bins);
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      const auto& rec = result.records[i].collision;
      if (!usable_for_hunt(rec)) continue;
      const int b = find_bin(bins.edges, strat_value(rec, config.strat_axis));
      if (b >= 0) members[static_cast<std::size_t>(b)].push_back(i);
    }

    std::vector<std::size_t> parents;
    for (auto& m : members) {
      if (m.empty()) continue;
      std::sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
        const double sa = result.records[a].collision.rel_slack;
        const double sb = result.records[b].collision.rel_slack;
        if (sa != sb) return sa < sb;
        return result.records[a].sample_id < result.records[b].sample_id;
      });
      const auto keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(config.hunt_keep_fraction * static_cast<double>(m.size()))));
      parents.insert(parents.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(std::min(keep, m.size())));
    }

    struct Candidate {
      std::uint64_t id;
      std::size_t parent;
    };
    std::vector<Candidate> candidates;
    for (std::size_t p : parents)
      for (int c = 0; c < children_per_parent; ++c) candidates.push_back({next_id++, p});

    auto children = parallel_map<CollisionRecord>(candidates.size(), config.workers, [&](std::size_t i) {
      const auto& cand = candidates[i];
      const std::uint64_t seed = derive_seed(config.collision.seed, cand.id);
      Rng rng(seed);
      const CollisionParams params =
          jitter(result.records[cand.parent].collision.params, config, scale, rng);
      CollisionRecord rec = evaluate_collision(params, quad, config.collision.floor);
      rec.sample_seed = seed;
      return rec;
    });

    for (std::size_t i = 0; i < candidates.size(); ++i) {
      CollisionRecord& child = children[i];
      const ExperimentRecord& parent = result.records[candidates[i].parent];
      if (!usable_for_hunt(child) || !(child.rel_slack < parent.collision.rel_slack)) continue;
      const int b = find_bin(bins.edges, strat_value(child, config.strat_axis));
      if (b < 0) continue;
      ExperimentRecord er;
      er.sample_id = candidates[i].id;
      er.strategy = Strategy::SaturationHunt;
      er.round = round;
      er.parent_id = parent.sample_id;
      er.collision = std::move(child);
      result.records.push_back(std::move(er));
    }
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) { return a.sample_id < b.sample_id; });
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  switch (config.strategy) {
    case Strategy::MonteCarlo: return run_monte_carlo(config);
    case Strategy::Stratified: return run_stratified(config);
    case Strategy::SaturationHunt: return run_saturation_hunt(config);
  }
  throw ValidationError("unknown strategy");
}

double quantile(std::vector<double> values, double q) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SlackBin> binned_average(const std::vector<double>& x, const std::vector<double>& y,
                                     int n_bins) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
  }
  std::vector<SlackBin> bins;
  if (!(lo <= hi) || n_bins < 1) return bins;
  if (lo == hi) hi = lo * (1.0 + 1e-12);
  const auto edges = log_edges(lo, hi, n_bins);
  bins.resize(static_cast<std::size_t>(n_bins));
  std::vector<double> sum(bins.size(), 0.0), sum2(bins.size(), 0.0);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    bins[b].lo = edges[b];
    bins[b].hi = edges[b + 1];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    int b = x[i] >= hi ? n_bins - 1 : find_bin(edges, x[i]);
    if (b < 0) b = 0;
    const auto bb = static_cast<std::size_t>(b);
    ++bins[bb].count;
    sum[bb] += y[i];
    sum2[bb] += y[i] * y[i];
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const int n = bins[b].count;
    if (n == 0) {
      bins[b].mean = std::numeric_limits<double>::quiet_NaN();
      bins[b].stddev = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    bins[b].mean = sum[b] / n;
    bins[b].stddev = n > 1 ? std::sqrt(std::max(0.0, (sum2[b] - n * bins[b].mean * bins[b].mean) / (n - 1))) : 0.0;
  }
  return bins;
}

SummaryStats summarize(const std::vector<ExperimentRecord>& records, int n_slack_bins) {
  if (records.empty()) throw std::invalid_argument("summarize: empty record list");
  SummaryStats st;
  st.n_total = records.size();
  std::vector<double> gaps, slacks, dq_norms, slack_for_bins, cs;
  std::size_t below = 0, finite_slack = 0;
  st.min_rel_slack = std::numeric_limits<double>::infinity();
  for (const auto& er : records) {
    const auto& r = er.collision;
    if (r.flagged()) ++st.n_flagged;
    if (!r.flagged() && r.d_bath < r.bound_B - kBoundViolationTol) ++st.n_violations;
    if (r.sigma < r.d_bath - kSigmaViolationTol) ++st.n_sigma_violations;
    const double split = std::abs(r.sigma - r.mutual_info - r.d_bath);
    st.max_split_residual = std::max(st.max_split_residual, split);
    if (!(split <= kSplitIdentityTol)) ++st.n_split_violations;
    if (r.flagged()) continue;
    gaps.push_back(r.gap_abs);
    if (std::isfinite(r.rel_slack)) {
      ++finite_slack;
      slacks.push_back(r.rel_slack);
      cs.push_back(r.robertson_C);
      dq_norms.push_back(r.dq.norm());
      slack_for_bins.push_back(r.rel_slack);
      st.min_rel_slack = std::min(st.min_rel_slack, r.rel_slack);
      if (r.rel_slack < 0.05) ++below;
    }
  }
  for (double q : {0.0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1.0}) {
    st.gap_quantiles[q] = quantile(gaps, q);
    st.rel_slack_quantiles[q] = quantile(slacks, q);
  }
  st.slack_bins = binned_average(dq_norms, slack_for_bins, n_slack_bins);
  st.frac_rel_slack_below_0_05 = finite_slack ? static_cast<double>(below) / static_cast<double>(finite_slack) : 0.0;
  if (finite_slack == 0) st.min_rel_slack = std::numeric_limits<double>::quiet_NaN();

  // Pearson correlation of rel_slack with C
  if (slacks.size() >= 2) {
    const double n = static_cast<double>(slacks.size());
    const double mx = std::accumulate(slacks.begin(), slacks.end(), 0.0) / n;
    const double my = std::accumulate(cs.begin(), cs.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < slacks.size(); ++i) {
      sxy += (slacks[i] - mx) * (cs[i] - my);
      sxx += (slacks[i] - mx) * (slacks[i] - mx);
      syy += (cs[i] - my) * (cs[i] - my);
    }
    st.corr_rel_slack_robertson_C = (sxx > 0 && syy > 0) ? sxy / std::sqrt(sxx * syy)
                                                         : std::numeric_limits<double>::quiet_NaN();
  } else {
    st.corr_rel_slack_robertson_C = std::numeric_limits<double>::quiet_NaN();
  }
  return st;
}

const std::vector<std::string>& records_csv_columns() {
  static const std::vector<std::string> cols = {
      "sample_id", "strategy", "round", "mode", "r", "phi", "eps", "k", "random_frame",
      "sigma", "mutual_info", "d_bath", "bound_B", "s_simple", "F_of_s", "gap_abs", "rel_slack",
      "cov_drift", "robertson_C", "dq_1", "dq_2", "V_11", "V_12", "V_22", "Vp_11", "Vp_12",
      "Vp_22", "range_residual", "flags", "sample_seed"};
  return cols;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::vector<const ExperimentRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ExperimentRecord* a, const ExperimentRecord* b) { return a->sample_id < b->sample_id; });

  std::ostringstream os;
  const auto& cols = records_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const ExperimentRecord* er : sorted) {
    const auto& c = er->collision;
    const auto f = [](double x) { return format_double(x); };
    os << er->sample_id << ',' << to_string(er->strategy) << ',' << er->round << ','
       << to_string(c.mode) << ',' << f(c.r) << ',' << f(c.phi) << ',' << f(c.eps) << ','
       << c.params.k << ',' << (c.params.random_frame ? 1 : 0) << ',' << f(c.sigma) << ','
       << f(c.mutual_info) << ',' << f(c.d_bath) << ',' << f(c.bound_B) << ',' << f(c.s_simple)
       << ',' << f(c.F_of_s) << ',' << f(c.gap_abs) << ',' << f(c.rel_slack) << ','
       << f(c.cov_drift) << ',' << f(c.robertson_C) << ',' << f(c.dq(0)) << ',' << f(c.dq(1))
       << ',' << f(c.V(0, 0)) << ',' << f(c.V(0, 1)) << ',' << f(c.V(1, 1)) << ','
       << f(c.Vp(0, 0)) << ',' << f(c.Vp(0, 1)) << ',' << f(c.Vp(1, 1)) << ','
       << f(c.range_residual) << ',' << c.flags << ',' << c.sample_seed << '\n';
  }
  return os.str();
}

void write_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << records_to_csv(records);
  if (!out) throw IoError("write error on '" + path + "'");
}

std::vector<ExperimentRecord> read_records_csv(const std::string& path) {
  const CsvTable table = read_csv_table(path);
  const auto missing = table.missing(records_csv_columns());
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw IoError("'" + path + "' is missing columns: " + names);
  }
  std::vector<ExperimentRecord> out;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const auto& fields = table.rows[row];
    if (fields.size() != table.header.size())
      throw IoError(path + ":" + std::to_string(table.line_numbers[row]) + ": wrong field count");
    auto get = [&](const char* name) -> const std::string& { return fields[*table.column(name)]; };
    auto num = [&](const char* name) { return parse_double(get(name)); };
    ExperimentRecord er;
    er.sample_id = std::stoull(get("sample_id"));
    er.strategy = parse_strategy(get("strategy"));
    er.round = std::stoi(get("round"));
    auto& c = er.collision;
    c.mode = parse_system_mode(get("mode"));
    c.r = num("r");
    c.phi = num("phi");
    c.eps = num("eps");
    c.params.k = std::stoi(get("k"));
    c.params.random_frame = get("random_frame") == "1";
    c.sigma = num("sigma");
    c.mutual_info = num("mutual_info");
    c.d_bath = num("d_bath");
    c.bound_B = num("bound_B");
    c.s_simple = num("s_simple");
    c.F_of_s = num("F_of_s");
    c.gap_abs = num("gap_abs");
    c.rel_slack = num("rel_slack");
    c.cov_drift = num("cov_drift");
    c.robertson_C = num("robertson_C");
    c.dq = RVector(2);
    c.dq << num("dq_1"), num("dq_2");
    c.V = RMatrix(2, 2);
    c.V << num("V_11"), num("V_12"), num("V_12"), num("V_22");
    c.Vp = RMatrix(2, 2);
    c.Vp << num("Vp_11"), num("Vp_12"), num("Vp_12"), num("Vp_22");
    c.range_residual = num("range_residual");
    c.flags = static_cast<unsigned>(std::stoul(get("flags")));
    c.sample_seed = std::stoull(get("sample_seed"));
    out.push_back(std::move(er));
  }
  return out;
}

namespace {

nlohmann::json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

nlohmann::json quantiles_json(const std::map<double, double>& q) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [level, value] : q) {
    char key[32];
    std::snprintf(key, sizeof key, "%g", level);
    j[key] = number_or_null(value);
  }
  return j;
}

}  // namespace

void write_summary_json(const SummaryStats& st, const ExperimentConfig& config, const std::string& path) {
  using nlohmann::json;
  json j;
  j["n_total"] = st.n_total;
  j["n_flagged"] = st.n_flagged;
  j["n_violations"] = st.n_violations;
  j["n_sigma_violations"] = st.n_sigma_violations;
  j["n_split_violations"] = st.n_split_violations;
  j["max_split_residual"] = number_or_null(st.max_split_residual);
  j["gap_quantiles"] = quantiles_json(st.gap_quantiles);
  j["rel_slack_quantiles"] = quantiles_json(st.rel_slack_quantiles);
  j["min_rel_slack"] = number_or_null(st.min_rel_slack);
  j["frac_rel_slack_below_0_05"] = st.frac_rel_slack_below_0_05;
  j["corr_rel_slack_robertson_C"] = number_or_null(st.corr_rel_slack_robertson_C);
  json bins = json::array();
  for (const auto& b : st.slack_bins)
    bins.push_back({{"dq_norm_lo", b.lo}, {"dq_norm_hi", b.hi}, {"count", b.count},
                    {"mean_rel_slack", number_or_null(b.mean)}, {"std_rel_slack", number_or_null(b.stddev)}});
  j["rel_slack_vs_dq_norm_bins"] = bins;
  if (st.strat_bins) {
    const auto& sb = *st.strat_bins;
    j["strat_bins"] = {{"axis", std::string(to_string(sb.axis))},
                       {"edges", sb.edges},
                       {"fill", sb.fill},
                       {"target", sb.target},
                       {"attempts", sb.attempts},
                       {"unreachable", sb.unreachable()}};
  }

  const auto& cc = config.collision;
  j["config"] = {
      {"r_min", cc.r_min}, {"r_max", cc.r_max}, {"phi_min", cc.phi_min}, {"phi_max", cc.phi_max},
      {"system_mode", std::string(to_string(cc.system_mode))}, {"eps_min", cc.eps_min},
      {"eps_max", cc.eps_max}, {"k", cc.k}, {"random_frame", cc.random_frame},
      {"use_fixed_point_unitary", cc.use_fixed_point_unitary}, {"seed", cc.seed},
      {"floor", cc.floor}, {"n_samples", config.n_samples},
      {"strategy", std::string(to_string(config.strategy))},
      {"strat_axis", std::string(to_string(config.strat_axis))}, {"n_bins", config.n_bins},
      {"strat_min", config.strat_min}, {"strat_max", config.strat_max},
      {"hunt_rounds", config.hunt_rounds}, {"hunt_keep_fraction", config.hunt_keep_fraction},
      {"hunt_sigma_r", config.hunt_sigma_r}, {"hunt_sigma_phi", config.hunt_sigma_phi},
      {"hunt_sigma_log_eps", config.hunt_sigma_log_eps}, {"hunt_sigma_frame", config.hunt_sigma_frame},
      {"quadrature_order", config.quadrature_order}, {"summary_bins", config.summary_bins},
      {"workers", config.workers}, {"records_csv", config.records_csv},
      {"summary_json", config.summary_json}};

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write error on '" + path + "'");
}

}  // namespace naqtur
