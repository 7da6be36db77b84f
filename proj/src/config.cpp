#include "naqtur/config.hpp"

#include "naqtur/csv.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace naqtur {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw UsageError("invalid value '" + std::string(value) + "' for '" + std::string(key) + "' (expected " +
                   std::string(expected) + ")");
}

double to_double(std::string_view key, std::string_view value) {
  try {
    return parse_double(value);
  } catch (const std::invalid_argument&) {
    bad_value(key, value, "a number");
  }
}

int to_int(std::string_view key, std::string_view value) {
  int out = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size())
    bad_value(key, value, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "true or false");
}

template <typename Parse>
auto wrap(std::string_view key, std::string_view value, Parse&& parse) {
  try {
    return parse(value);
  } catch (const ValidationError& e) {
    throw UsageError("'" + std::string(key) + "': " + e.what());
  }
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

const std::vector<std::pair<std::string, Field>>& fields() {
  using C = ExperimentConfig;
  auto real = [](double CollisionConfig::*m) {
    return Field{[m](C& c, std::string_view k, std::string_view v) { c.collision.*m = to_double(k, v); },
                 [m](const C& c) { return format_double(c.collision.*m); }};
  };
  auto real_x = [](double C::*m) {
    return Field{[m](C& c, std::string_view k, std::string_view v) { c.*m = to_double(k, v); },
                 [m](const C& c) { return format_double(c.*m); }};
  };
  auto int_x = [](int C::*m) {
    return Field{[m](C& c, std::string_view k, std::string_view v) { c.*m = to_int(k, v); },
                 [m](const C& c) { return std::to_string(c.*m); }};
  };
  auto flag = [](bool CollisionConfig::*m) {
    return Field{[m](C& c, std::string_view k, std::string_view v) { c.collision.*m = to_bool(k, v); },
                 [m](const C& c) { return std::string(c.collision.*m ? "true" : "false"); }};
  };
  auto text = [](std::string C::*m) {
    return Field{[m](C& c, std::string_view, std::string_view v) { c.*m = std::string(v); },
                 [m](const C& c) { return c.*m; }};
  };
  static const std::vector<std::pair<std::string, Field>> table = {
      {"r_min", real(&CollisionConfig::r_min)},
      {"r_max", real(&CollisionConfig::r_max)},
      {"phi_min", real(&CollisionConfig::phi_min)},
      {"phi_max", real(&CollisionConfig::phi_max)},
      {"system_mode",
       {[](C& c, std::string_view k, std::string_view v) {
          c.collision.system_mode = wrap(k, v, [](std::string_view x) { return parse_system_mode(x); });
        },
        [](const C& c) { return std::string(to_string(c.collision.system_mode)); }}},
      {"eps_min", real(&CollisionConfig::eps_min)},
      {"eps_max", real(&CollisionConfig::eps_max)},
      {"k",
       {[](C& c, std::string_view k, std::string_view v) { c.collision.k = to_int(k, v); },
        [](const C& c) { return std::to_string(c.collision.k); }}},
      {"random_frame", flag(&CollisionConfig::random_frame)},
      {"use_fixed_point_unitary", flag(&CollisionConfig::use_fixed_point_unitary)},
      {"seed",
       {[](C& c, std::string_view, std::string_view v) { c.collision.seed = parse_seed(v); },
        [](const C& c) { return std::to_string(c.collision.seed); }}},
      {"floor", real(&CollisionConfig::floor)},
      {"n_samples", int_x(&C::n_samples)},
      {"strategy",
       {[](C& c, std::string_view k, std::string_view v) {
          c.strategy = wrap(k, v, [](std::string_view x) { return parse_strategy(x); });
        },
        [](const C& c) { return std::string(to_string(c.strategy)); }}},
      {"strat_axis",
       {[](C& c, std::string_view k, std::string_view v) {
          c.strat_axis = wrap(k, v, [](std::string_view x) { return parse_strat_axis(x); });
        },
        [](const C& c) { return std::string(to_string(c.strat_axis)); }}},
      {"n_bins", int_x(&C::n_bins)},
      {"strat_min", real_x(&C::strat_min)},
      {"strat_max", real_x(&C::strat_max)},
      {"hunt_rounds", int_x(&C::hunt_rounds)},
      {"hunt_keep_fraction", real_x(&C::hunt_keep_fraction)},
      {"hunt_sigma_r", real_x(&C::hunt_sigma_r)},
      {"hunt_sigma_phi", real_x(&C::hunt_sigma_phi)},
      {"hunt_sigma_log_eps", real_x(&C::hunt_sigma_log_eps)},
      {"hunt_sigma_frame", real_x(&C::hunt_sigma_frame)},
      {"quadrature_order", int_x(&C::quadrature_order)},
      {"summary_bins", int_x(&C::summary_bins)},
      {"workers", int_x(&C::workers)},
      {"records_csv", text(&C::records_csv)},
      {"summary_json", text(&C::summary_json)},
  };
  return table;
}

}  // namespace

ConfigEntries parse_config_text(std::string_view text, std::string_view source) {
  ConfigEntries out;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) throw UsageError(where + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(where + ": empty key");
    if (value.empty()) throw UsageError(where + ": empty value for '" + std::string(key) + "'");
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

ConfigEntries read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, field] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_config_entry(ExperimentConfig& config, std::string_view key, std::string_view value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(config, key, trim(value));
      return;
    }
  }
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

void apply_config_entries(ExperimentConfig& config, const ConfigEntries& entries) {
  for (const auto& [k, v] : entries) apply_config_entry(config, k, v);
}

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [name, field] : fields()) out += name + " = " + field.get(config) + "\n";
  return out;
}

std::uint64_t parse_seed(std::string_view text) {
  text = trim(text);
  std::uint64_t out = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw UsageError("invalid seed '" + std::string(text) + "' (expected an unsigned 64-bit integer)");
  return out;
}

SeedChoice resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_config,
                        const char* env_value) {
  if (flag) return {*flag, "flag"};
  if (from_config) return {*from_config, "config"};
  if (env_value && *env_value) return {parse_seed(env_value), "NAQTUR_SEED"};
  return {0, "default"};
}

}  // namespace naqtur
