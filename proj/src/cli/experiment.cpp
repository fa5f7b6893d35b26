#include "dyadic/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dyadic/io.hpp"
#include "dyadic/opnorm.hpp"
#include "dyadic/random.hpp"
#include "dyadic/shifts.hpp"

namespace dyadic {

namespace {

const std::vector<std::string> kExperiments{"equivalence", "core", "cotlar", "growth", "commutator", "shifts"};
const std::vector<std::string> kKeys{"experiment", "n_params", "depths", "seed", "budget", "ensemble", "samples", "out"};

template <class T>
T field(const nlohmann::json& j, const char* key, const char* expected) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("field '") + key + "': expected " + expected + ", got " + j.at(key).dump());
  }
}

std::uint64_t seed_field(const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("field 'seed': expected a nonnegative integer, got " + v.dump());
}

std::size_t count_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ConfigError(std::string("field '") + key + "': expected a nonnegative integer, got " + v.dump());
  return v.get<std::size_t>();
}

/// Line and column of a byte offset.
std::pair<std::size_t, std::size_t> locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string fmt(double v) { return io::format_double(v); }

class CsvWriter {
 public:
  CsvWriter(const ExperimentConfig& cfg, const std::vector<std::string>& columns)
      : hash_(config_hash(cfg)), seed_(cfg.seed) {
    os_ << "config_hash,seed";
    for (const auto& c : columns) os_ << ',' << c;
    os_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    os_ << hash_ << ',' << seed_;
    for (const auto& c : cells) os_ << ',' << c;
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  std::string hash_;
  std::uint64_t seed_;
};

SuiteConfig suite_config(const ExperimentConfig& cfg) {
  SuiteConfig s;
  s.n_params = cfg.n_params;
  s.depths = cfg.depths;
  s.samples = cfg.samples;
  return s;
}

ExperimentOutput run_equivalence(const ExperimentConfig& cfg, nlohmann::json& summary) {
  CsvWriter csv(cfg, {"symbol_id", "depth", "lmo_norm", "lower_bound", "log_family_bound", "ratio", "lmo_equiv",
                      "witness_family", "evaluations"});
  const EnsembleSpec spec{cfg.n_params, cfg.ensemble, cfg.seed};
  const auto table = equivalence_experiment(spec, cfg.depths, cfg.budget, cfg.seed);
  for (const auto& r : table.records)
    csv.row({r.symbol_id, std::to_string(r.depth), fmt(r.lmo_norm), fmt(r.lower_bound), fmt(r.log_family_bound),
             fmt(r.ratio), fmt(r.lmo_equiv), r.witness_family, std::to_string(r.evaluations)});
  nlohmann::json bands = nlohmann::json::array();
  std::vector<double> lows, highs, nec;
  for (const auto& b : table.bands) {
    bands.push_back({{"depth", b.depth},
                     {"min_ratio", b.min_ratio},
                     {"max_ratio", b.max_ratio},
                     {"necessity_constant", b.necessity_constant}});
    lows.push_back(b.min_ratio);
    highs.push_back(b.max_ratio);
    nec.push_back(b.necessity_constant);
  }
  summary["bands"] = bands;
  summary["min_ratio_spread"] = spread(lows);
  summary["max_ratio_spread"] = spread(highs);
  summary["necessity_spread"] = spread(nec);
  return {csv.str(), {}};
}

ExperimentOutput run_core(const ExperimentConfig& cfg, nlohmann::json& summary) {
  CsvWriter csv(cfg, {"depth", "core2", "core2bis", "core2one"});
  SuiteConfig s = suite_config(cfg);
  s.sigma_depth = cfg.depths.empty() ? 3 : *std::max_element(cfg.depths.begin(), cfg.depths.end());
  const auto rep = core_lemma_suite(s, cfg.seed);
  for (const auto& d : rep.scans)
    csv.row({std::to_string(d.depth), fmt(d.core2.constant), fmt(d.core2bis.constant), fmt(d.core2one.constant)});
  summary["report"] = to_json(rep);
  return {csv.str(), {}};
}

ExperimentOutput run_cotlar(const ExperimentConfig& cfg, nlohmann::json& summary) {
  CsvWriter csv(cfg, {"depth", "blocks", "fitted_constant", "max_cross_product"});
  const auto r = cotlar_decay_suite(suite_config(cfg), cfg.seed);
  std::vector<double> c;
  for (const auto& d : r) {
    csv.row({std::to_string(d.depth), std::to_string(d.blocks), fmt(d.fitted_constant), fmt(d.max_cross_product)});
    c.push_back(d.fitted_constant);
  }
  summary["depths"] = to_json(r);
  summary["fitted_constant_spread"] = spread(c);
  return {csv.str(), {}};
}

ExperimentOutput run_growth(const ExperimentConfig& cfg, nlohmann::json& summary) {
  CsvWriter csv(cfg, {"depth", "mean_bound", "local_l2", "projected"});
  const auto r = growth_lemma_suite(suite_config(cfg), cfg.seed);
  for (const auto& d : r) csv.row({std::to_string(d.depth), fmt(d.mean_bound), fmt(d.local_l2), fmt(d.projected)});
  summary["depths"] = to_json(r);
  return {csv.str(), {}};
}

ExperimentOutput run_commutator(const ExperimentConfig& cfg, nlohmann::json& summary) {
  CsvWriter csv(cfg, {"depth", "max_value", "truncated"});
  const auto r = commutator_bound_scan(suite_config(cfg), cfg.seed);
  for (const auto& d : r) csv.row({std::to_string(d.depth), fmt(d.max_value), d.truncated ? "1" : "0"});
  summary["depths"] = to_json(r);
  return {csv.str(), {}};
}

/// One-parameter shift averages of cos(2 pi x); every sampled grid is logged for replay.
ExperimentOutput run_shifts(const ExperimentConfig& cfg, nlohmann::json& summary) {
  if (cfg.n_params != 1) throw ConfigError("field 'n_params': the shifts experiment is one-parameter");
  CsvWriter csv(cfg, {"depth", "sample", "sample_seed", "alpha", "r_steps", "translation", "dilation"});
  nlohmann::json per_depth = nlohmann::json::array();
  for (int J : cfg.depths) {
    const Shape s({J});
    const std::size_t n = s.size();
    GridSignal f(s), h(s);
    for (std::size_t c = 0; c < n; ++c) {
      // Cell means of cos and sin.
      const double a = 2.0 * M_PI * static_cast<double>(c) / n, b = 2.0 * M_PI * static_cast<double>(c + 1) / n;
      f[c] = (std::sin(b) - std::sin(a)) * n / (2.0 * M_PI);
      h[c] = (std::cos(a) - std::cos(b)) * n / (2.0 * M_PI);
    }
    const std::uint64_t depth_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(J));
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const std::uint64_t ss = derive_seed(depth_seed, i);
      const auto g = sample_grid(s, ss);
      std::string bits;
      for (int x : g.axes[0].alpha) bits += static_cast<char>('0' + x);
      csv.row({std::to_string(J), std::to_string(i), std::to_string(ss), bits, std::to_string(g.axes[0].r_steps),
               fmt(g.axes[0].translation()), fmt(g.axes[0].dilation())});
    }
    nlohmann::json entry{{"depth", J}};
    if (cfg.samples > 0) {
      const auto avg = monte_carlo_shift_average(f, cfg.samples, depth_seed);
      double ah = 0.0, aa = 0.0, hh = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        ah += avg[c] * h[c];
        aa += avg[c] * avg[c];
        hh += h[c] * h[c];
      }
      entry["l2_norm"] = std::sqrt(aa / n);
      entry["hilbert_cosine"] = aa > 0.0 ? ah / std::sqrt(aa * hh) : 0.0;
    }
    per_depth.push_back(entry);
  }
  summary["prefactor"] = shift_average_prefactor();
  summary["depths"] = per_depth;
  return {csv.str(), {}};
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  return {{"experiment", experiment}, {"n_params", n_params}, {"depths", depths}, {"seed", seed},
          {"budget", budget},         {"ensemble", ensemble}, {"samples", samples}, {"out", out}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(kKeys.begin(), kKeys.end(), it.key()) == kKeys.end())
      throw ConfigError("unknown field '" + it.key() + "'");
  ExperimentConfig c;
  if (j.contains("experiment")) c.experiment = field<std::string>(j, "experiment", "a string");
  if (j.contains("n_params")) c.n_params = count_field(j, "n_params");
  if (j.contains("depths")) {
    const auto& d = j.at("depths");
    if (!d.is_array()) throw ConfigError("field 'depths': expected an array of integers, got " + d.dump());
    c.depths.clear();
    for (const auto& x : d) {
      if (!x.is_number_integer()) throw ConfigError("field 'depths': expected integers, got " + x.dump());
      c.depths.push_back(x.get<int>());
    }
  }
  if (j.contains("seed")) c.seed = seed_field(j.at("seed"));
  if (j.contains("budget")) c.budget = count_field(j, "budget");
  if (j.contains("ensemble")) c.ensemble = count_field(j, "ensemble");
  if (j.contains("samples")) c.samples = count_field(j, "samples");
  if (j.contains("out")) c.out = field<std::string>(j, "out", "a string");
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    throw ConfigError("field 'experiment': unknown experiment '" + experiment + "'");
  if (n_params < 1 || n_params > 4) throw ConfigError("field 'n_params': must be in [1, 4]");
  if (depths.empty()) throw ConfigError("field 'depths': at least one depth required");
  for (int d : depths)
    if (d < 1 || d > 10) throw ConfigError("field 'depths': depth " + std::to_string(d) + " outside [1, 10]");
  if (experiment == "equivalence" && budget < 1) throw ConfigError("field 'budget': must be at least 1");
  if (out.empty()) throw ConfigError("field 'out': must be nonempty");
}

ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("config syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  return ExperimentConfig::from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  auto j = cfg.to_json();
  j.erase("out");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  nlohmann::json summary;
  ExperimentOutput out;
  if (cfg.experiment == "equivalence") out = run_equivalence(cfg, summary);
  else if (cfg.experiment == "core") out = run_core(cfg, summary);
  else if (cfg.experiment == "cotlar") out = run_cotlar(cfg, summary);
  else if (cfg.experiment == "growth") out = run_growth(cfg, summary);
  else if (cfg.experiment == "commutator") out = run_commutator(cfg, summary);
  else out = run_shifts(cfg, summary);
  nlohmann::json doc{{"schema_version", kRecordSchemaVersion},
                     {"experiment", cfg.experiment},
                     {"config", cfg.to_json()},
                     {"config_hash", config_hash(cfg)},
                     {"summary", summary}};
  doc["config"].erase("out");
  out.json = doc.dump(2) + "\n";
  return out;
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentOutput& output) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw ConfigError("field 'out': cannot create '" + cfg.out + "': " + ec.message());
  const auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    os << text;
  };
  const fs::path dir(cfg.out);
  write(dir / (cfg.experiment + ".csv"), output.csv);
  write(dir / (cfg.experiment + ".json"), output.json);
  write(dir / "config.json", cfg.to_json().dump(2) + "\n");
}

}  // namespace dyadic
