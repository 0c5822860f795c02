#pragma once

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dicode/bounds.hpp"
#include "dicode/codebook_io.hpp"
#include "dicode/converse.hpp"
#include "dicode/error_analysis.hpp"
#include "dicode/util.hpp"
#include "dicode/version.hpp"

namespace dicode {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitVerification = 2,
  kExitIo = 3,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void expect_keys(const nlohmann::json& j, std::initializer_list<const char*> keys,
                        const std::string& where) {
  if (!j.is_object()) throw UsageError("config: '" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw UsageError("config: unknown key '" + where + it.key() + "'");
  }
}

template <class T>
void get_if(const nlohmann::json& j, const char* key, T& value) {
  if (j.contains(key)) j.at(key).get_to(value);
}

}  // namespace detail

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";

  struct Channel {
    double p = 0.3;
    double T_s = 10.0;
    double P_max = 1.0;
    double P_ave = 1.0;
    bool operator==(const Channel&) const = default;
  } channel;

  struct Packing {
    int n = 8;
    double b = 0.25;
    double a = -1.0;      // <= 0: coupled value 3A/(p T_s)^2
    double c_min = -1.0;  // < 0: 0.05 * A
    long long stop_K = -1;
    std::uint64_t max_M = 100000;
    bool repair = true;
    std::uint64_t saturation_trials = 10000;
    std::uint64_t density_trials = 100000;
    bool operator==(const Packing&) const = default;
  } packing;

  struct Decoder {
    std::string metric_mode = "exact-floor";
    double delta_n = -1.0;  // <= 0: A / n^{(1-b)/2} with the codebook's b
    bool operator==(const Decoder&) const = default;
  } decoder;

  struct Simulate {
    std::string codebook;
    std::uint64_t trials = 10000;
    int type1_codewords = -1;  // < 0: all
    int type2_pairs = 50;
    bool operator==(const Simulate&) const = default;
  } simulate;

  struct Bounds {
    std::vector<double> n_grid = {1e3, 1e4, 1e5, 1e6};
    double b = 1e-3;
    double A = 1.0;
    double a = 1.0;
    double P_max = 1.0;
    bool operator==(const Bounds&) const = default;
  } bounds;

  struct Verify {
    std::uint64_t gamma_pairs = 100000;
    double gamma_max = 100.0;
    int moment_N_max = 60;
    std::string codebook;
    std::uint64_t trials = 20000;
    bool operator==(const Verify&) const = default;
  } verify;

  bool operator==(const ExperimentConfig&) const = default;

  ChannelParams channel_params() const {
    return ChannelParams(channel.p, channel.T_s, channel.P_max, channel.P_ave);
  }

  double amplitude() const { return std::min(channel.P_max, channel.P_ave); }

  PackingConfig packing_config() const {
    PackingConfig pc;
    pc.n = packing.n;
    pc.b = packing.b;
    pc.A = amplitude();
    pc.a = packing.a > 0.0 ? packing.a : coupled_packing_constant(pc.A, channel.p, channel.T_s);
    pc.c_min = packing.c_min >= 0.0 ? packing.c_min : 0.05 * pc.A;
    pc.stop_K = packing.stop_K;
    pc.max_M = packing.max_M;
    pc.seed = seed;
    return pc;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["seed"] = seed;
    j["threads"] = threads;
    j["out_dir"] = out_dir;
    j["channel"] = {{"p", channel.p},
                    {"T_s", channel.T_s},
                    {"P_max", channel.P_max},
                    {"P_ave", channel.P_ave}};
    j["packing"] = {{"n", packing.n},
                    {"b", packing.b},
                    {"a", packing.a},
                    {"c_min", packing.c_min},
                    {"stop_K", packing.stop_K},
                    {"max_M", packing.max_M},
                    {"repair", packing.repair},
                    {"saturation_trials", packing.saturation_trials},
                    {"density_trials", packing.density_trials}};
    j["decoder"] = {{"metric_mode", decoder.metric_mode}, {"delta_n", decoder.delta_n}};
    j["simulate"] = {{"codebook", simulate.codebook},
                     {"trials", simulate.trials},
                     {"type1_codewords", simulate.type1_codewords},
                     {"type2_pairs", simulate.type2_pairs}};
    j["bounds"] = {{"n_grid", bounds.n_grid},
                   {"b", bounds.b},
                   {"A", bounds.A},
                   {"a", bounds.a},
                   {"P_max", bounds.P_max}};
    j["verify"] = {{"gamma_pairs", verify.gamma_pairs},
                   {"gamma_max", verify.gamma_max},
                   {"moment_N_max", verify.moment_N_max},
                   {"codebook", verify.codebook},
                   {"trials", verify.trials}};
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    detail::expect_keys(j,
                        {"schema_version", "seed", "threads", "out_dir", "channel", "packing",
                         "decoder", "simulate", "bounds", "verify"},
                        "");
    detail::get_if(j, "schema_version", c.schema_version);
    if (c.schema_version != kConfigSchemaVersion)
      throw UsageError("config: unsupported schema_version " + std::to_string(c.schema_version));
    detail::get_if(j, "seed", c.seed);
    detail::get_if(j, "threads", c.threads);
    detail::get_if(j, "out_dir", c.out_dir);
    if (j.contains("channel")) {
      const auto& s = j.at("channel");
      detail::expect_keys(s, {"p", "T_s", "P_max", "P_ave"}, "channel.");
      detail::get_if(s, "p", c.channel.p);
      detail::get_if(s, "T_s", c.channel.T_s);
      detail::get_if(s, "P_max", c.channel.P_max);
      detail::get_if(s, "P_ave", c.channel.P_ave);
    }
    if (j.contains("packing")) {
      const auto& s = j.at("packing");
      detail::expect_keys(s,
                          {"n", "b", "a", "c_min", "stop_K", "max_M", "repair",
                           "saturation_trials", "density_trials"},
                          "packing.");
      detail::get_if(s, "n", c.packing.n);
      detail::get_if(s, "b", c.packing.b);
      detail::get_if(s, "a", c.packing.a);
      detail::get_if(s, "c_min", c.packing.c_min);
      detail::get_if(s, "stop_K", c.packing.stop_K);
      detail::get_if(s, "max_M", c.packing.max_M);
      detail::get_if(s, "repair", c.packing.repair);
      detail::get_if(s, "saturation_trials", c.packing.saturation_trials);
      detail::get_if(s, "density_trials", c.packing.density_trials);
    }
    if (j.contains("decoder")) {
      const auto& s = j.at("decoder");
      detail::expect_keys(s, {"metric_mode", "delta_n"}, "decoder.");
      detail::get_if(s, "metric_mode", c.decoder.metric_mode);
      detail::get_if(s, "delta_n", c.decoder.delta_n);
      metric_mode_from_string(c.decoder.metric_mode);  // validate
    }
    if (j.contains("simulate")) {
      const auto& s = j.at("simulate");
      detail::expect_keys(s, {"codebook", "trials", "type1_codewords", "type2_pairs"}, "simulate.");
      detail::get_if(s, "codebook", c.simulate.codebook);
      detail::get_if(s, "trials", c.simulate.trials);
      detail::get_if(s, "type1_codewords", c.simulate.type1_codewords);
      detail::get_if(s, "type2_pairs", c.simulate.type2_pairs);
    }
    if (j.contains("bounds")) {
      const auto& s = j.at("bounds");
      detail::expect_keys(s, {"n_grid", "b", "A", "a", "P_max"}, "bounds.");
      detail::get_if(s, "n_grid", c.bounds.n_grid);
      detail::get_if(s, "b", c.bounds.b);
      detail::get_if(s, "A", c.bounds.A);
      detail::get_if(s, "a", c.bounds.a);
      detail::get_if(s, "P_max", c.bounds.P_max);
    }
    if (j.contains("verify")) {
      const auto& s = j.at("verify");
      detail::expect_keys(s, {"gamma_pairs", "gamma_max", "moment_N_max", "codebook", "trials"},
                          "verify.");
      detail::get_if(s, "gamma_pairs", c.verify.gamma_pairs);
      detail::get_if(s, "gamma_max", c.verify.gamma_max);
      detail::get_if(s, "moment_N_max", c.verify.moment_N_max);
      detail::get_if(s, "codebook", c.verify.codebook);
      detail::get_if(s, "trials", c.verify.trials);
    }
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("config: cannot open: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
      return from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      std::size_t line = 1;
      for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
      throw UsageError("config: parse error at " + path + ":" + std::to_string(line) + ": " +
                       e.what());
    }
  }

  std::string hash() const { return hex64(fnv1a64(to_json().dump())); }
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> trials;
  std::optional<int> n;
  std::optional<double> b;
  std::optional<std::string> codebook;
};

// precedence: explicit flag > config file value > built-in default
inline void apply_overrides(ExperimentConfig& cfg, const CliOverrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.trials) {
    cfg.simulate.trials = *o.trials;
    cfg.verify.trials = *o.trials;
  }
  if (o.n) {
    cfg.packing.n = *o.n;
    cfg.bounds.n_grid = {static_cast<double>(*o.n)};
  }
  if (o.b) {
    cfg.packing.b = *o.b;
    cfg.bounds.b = *o.b;
  }
  if (o.codebook) {
    cfg.simulate.codebook = *o.codebook;
    cfg.verify.codebook = *o.codebook;
  }
}

namespace detail {

inline std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return std::string(buf);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

inline void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                           const std::vector<std::string>& outputs) {
  nlohmann::json m;
  m["artifact_version"] = kVersion;
  m["command"] = command;
  m["config_hash"] = cfg.hash();
  m["created_utc"] = utc_now();
  m["outputs"] = outputs;
  m["config"] = cfg.to_json();
  write_text_file((std::filesystem::path(cfg.out_dir) / "manifest.json").string(),
                  m.dump(2) + "\n");
}

inline void ensure_out_dir(const ExperimentConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg.out_dir);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// construct: build a codebook, certify it, persist both
// ---------------------------------------------------------------------------

inline int run_construct(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  detail::ensure_out_dir(cfg);
  PackingConfig pc = cfg.packing_config();
  if (cfg.packing.a > 0.0) {
    const double coupled = coupled_packing_constant(pc.A, cfg.channel.p, cfg.channel.T_s);
    if (std::fabs(cfg.packing.a - coupled) > 1e-12 * std::max(1.0, coupled))
      log << "warning: manual packing constant a=" << g17(cfg.packing.a)
          << " overrides the coupled value " << g17(coupled) << "\n";
  }
  Codebook cb = construct_saturated(pc);
  SaturationCertificate cert;
  if (cfg.packing.repair) {
    repair_to_saturation(cb, cfg.packing.saturation_trials, mix_key(cfg.seed, 0xC0DE));
    cert = certify_saturated(cb, cfg.packing.saturation_trials, mix_key(cfg.seed, 0x5A7));
  } else {
    cert = saturation_check(cb, cfg.packing.saturation_trials, mix_key(cfg.seed, 0x5A7));
  }
  const DensityEstimate de =
      density_estimate(cb, cfg.packing.density_trials, mix_key(cfg.seed, 0xDE45), cfg.threads);

  const double n = static_cast<double>(cb.n);
  nlohmann::json cj;
  cj["n"] = cb.n;
  cj["M"] = cb.size();
  cj["A"] = cb.A;
  cj["a"] = cb.a;
  cj["b"] = cb.b;
  cj["r0"] = cb.r0;
  cj["c_min"] = cb.c_min;
  cj["seed"] = cb.seed;
  cj["stop_K"] = cb.stop_K;
  cj["method"] = cb.method;
  cj["candidates"] = cb.candidates;
  cj["rejected"] = cb.rejected;
  cj["repaired"] = cb.repaired;
  cj["capped"] = cb.capped;
  cj["min_pairwise_distance"] = min_pairwise_distance(cb);
  cj["saturation"] = {{"trials", cert.trials},
                      {"covered", cert.covered},
                      {"coverage", cert.coverage()},
                      {"witnesses_found", cert.witnesses.size()}};
  cj["density"] = {{"trials", de.trials},
                   {"estimate", de.estimate},
                   {"std_err", de.std_err},
                   {"log2_lower_ref", -n},
                   {"log2_upper_ref", -0.599 * n},
                   {"above_lower", de.estimate >= std::exp2(-n) * (1.0 - 3.0 * de.std_err)},
                   {"below_upper", de.estimate <= std::exp2(-0.599 * n) * (1.0 + 3.0 * de.std_err)}};
  cj["count_lower_bound_log2"] = count_lower_bound_log2(cb.n, cb.A, cb.r0);
  cj["log2_M"] = std::log2(static_cast<double>(cb.size()));

  const auto dir = std::filesystem::path(cfg.out_dir);
  write_codebook(cb, (dir / "codebook.txt").string());
  detail::write_text_file((dir / "certificate.json").string(), cj.dump(2) + "\n");
  detail::write_manifest(cfg, "construct", {"codebook.txt", "certificate.json"});

  log << "constructed codebook: n=" << cb.n << " M=" << cb.size() << " r0=" << g17(cb.r0)
      << " repaired=" << cb.repaired << " coverage=" << cert.coverage()
      << " density=" << de.estimate << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate: Monte Carlo error estimates with analytic-bound columns
// ---------------------------------------------------------------------------

struct SimulationRow {
  ErrorEstimate est;
  double metric_variance = 0.0;
  double var_over_delta2 = 0.0;
  double bound_used = 0.0;
  bool within_bound = false;
};

struct SimulationTable {
  Codebook codebook;
  DecoderConfig decoder;
  AnalyticBounds bounds;
  std::vector<SimulationRow> rows;
};

inline SimulationTable simulate_table(const ExperimentConfig& cfg) {
  if (cfg.simulate.trials == 0) throw UsageError("simulate: trials must be positive");
  if (cfg.simulate.codebook.empty()) throw UsageError("simulate: no codebook path configured");
  SimulationTable table;
  table.codebook = read_codebook(cfg.simulate.codebook);
  const Codebook& cb = table.codebook;
  const ChannelParams params = cfg.channel_params();
  if (std::fabs(cb.A - params.amplitude()) > 1e-9 * std::max(1.0, params.amplitude()))
    throw UsageError("simulate: codebook amplitude " + g17(cb.A) +
                     " does not match channel min(P_max, P_ave) " + g17(params.amplitude()));

  table.decoder.mode = metric_mode_from_string(cfg.decoder.metric_mode);
  table.decoder.b = cb.b;
  table.decoder.delta_n =
      cfg.decoder.delta_n > 0.0 ? cfg.decoder.delta_n : derive_delta_n(cb.A, cb.n, cb.b);

  const double c_ref = min_positive_coordinate(cb);
  if (!std::isfinite(c_ref)) throw UsageError("simulate: codebook has no positive coordinate");
  table.bounds = make_analytic_bounds(params, cb.n, cb.b, c_ref);

  const std::size_t M = cb.size();
  const std::size_t k1 = cfg.simulate.type1_codewords < 0
                             ? M
                             : std::min<std::size_t>(M, static_cast<std::size_t>(
                                                            cfg.simulate.type1_codewords));
  const double d2 = table.decoder.delta_n * table.decoder.delta_n;
  std::uint64_t row_id = 0;
  for (std::size_t i = 0; i < k1; ++i) {
    SimulationRow row;
    row.est = mc_type1(i, cb, table.decoder, params, cfg.simulate.trials,
                       mix_key(cfg.seed, 0x7E571000 + row_id++), cfg.threads);
    row.metric_variance = metric_moments(cb.codewords[i], params, table.decoder.mode).variance;
    row.var_over_delta2 = row.metric_variance / d2;
    row.bound_used = std::min(table.bounds.type1_bound, row.var_over_delta2);
    row.within_bound = row.est.estimate <= row.bound_used + 3.0 * row.est.std_err;
    table.rows.push_back(row);
  }
  if (M >= 2) {
    Rng pair_rng = Rng::substream(cfg.seed, 0x9A125);
    for (int k = 0; k < cfg.simulate.type2_pairs; ++k) {
      const std::size_t i = static_cast<std::size_t>(pair_rng.below(M));
      std::size_t j = static_cast<std::size_t>(pair_rng.below(M - 1));
      if (j >= i) ++j;
      SimulationRow row;
      row.est = mc_type2(i, j, cb, table.decoder, params, cfg.simulate.trials,
                         mix_key(cfg.seed, 0x7E572000 + row_id++), cfg.threads);
      row.metric_variance = metric_moments(cb.codewords[i], params, table.decoder.mode).variance;
      row.var_over_delta2 = row.metric_variance / d2;
      row.bound_used = table.bounds.type2_bound;
      row.within_bound = row.est.estimate <= row.bound_used + 3.0 * row.est.std_err;
      table.rows.push_back(row);
    }
  }
  return table;
}

inline std::string simulation_csv(const ExperimentConfig& cfg, const SimulationTable& t) {
  std::ostringstream os;
  os << "kind,i,j,estimate,std_err,trials,seed,n,M,p,T_s,P_max,P_ave,A,b,delta_n,metric_mode,"
        "c_ref,type1_bound,zeta0,zeta1,type2_bound,metric_variance,var_over_delta2,bound_used,"
        "within_bound\n";
  for (const auto& r : t.rows) {
    os << (r.est.kind == ErrorEstimate::Kind::Type1 ? "type1" : "type2") << ',' << r.est.i << ','
       << r.est.j << ',' << g17(r.est.estimate) << ',' << g17(r.est.std_err) << ','
       << r.est.trials << ',' << r.est.seed << ',' << t.codebook.n << ',' << t.codebook.size()
       << ',' << g17(cfg.channel.p) << ',' << g17(cfg.channel.T_s) << ','
       << g17(cfg.channel.P_max) << ',' << g17(cfg.channel.P_ave) << ',' << g17(t.codebook.A)
       << ',' << g17(t.codebook.b) << ',' << g17(t.decoder.delta_n) << ','
       << to_string(t.decoder.mode) << ',' << g17(t.bounds.c_ref) << ','
       << g17(t.bounds.type1_bound) << ',' << g17(t.bounds.zeta0) << ',' << g17(t.bounds.zeta1)
       << ',' << g17(t.bounds.type2_bound) << ',' << g17(r.metric_variance) << ','
       << g17(r.var_over_delta2) << ',' << g17(r.bound_used) << ',' << (r.within_bound ? 1 : 0)
       << '\n';
  }
  return os.str();
}

inline int run_simulate(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  detail::ensure_out_dir(cfg);
  const SimulationTable t = simulate_table(cfg);

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"kind", r.est.kind == ErrorEstimate::Kind::Type1 ? "type1" : "type2"},
                    {"i", r.est.i},
                    {"j", r.est.j},
                    {"estimate", r.est.estimate},
                    {"std_err", r.est.std_err},
                    {"trials", r.est.trials},
                    {"seed", r.est.seed},
                    {"metric_variance", r.metric_variance},
                    {"var_over_delta2", r.var_over_delta2},
                    {"bound_used", r.bound_used},
                    {"within_bound", r.within_bound}});
  }
  nlohmann::json j;
  j["codebook"] = cfg.simulate.codebook;
  j["delta_n"] = t.decoder.delta_n;
  j["metric_mode"] = to_string(t.decoder.mode);
  j["c_ref"] = t.bounds.c_ref;
  j["type1_bound"] = t.bounds.type1_bound;
  j["zeta0"] = t.bounds.zeta0;
  j["zeta1"] = t.bounds.zeta1;
  j["type2_bound"] = t.bounds.type2_bound;
  j["rows"] = rows;

  const auto dir = std::filesystem::path(cfg.out_dir);
  detail::write_text_file((dir / "estimates.csv").string(), simulation_csv(cfg, t));
  detail::write_text_file((dir / "estimates.json").string(), j.dump(2) + "\n");
  detail::write_manifest(cfg, "simulate", {"estimates.csv", "estimates.json"});

  std::size_t flagged = 0;
  for (const auto& r : t.rows)
    if (!r.within_bound) ++flagged;
  log << "simulated " << t.rows.size() << " rows (" << flagged
      << " above bound+3se) -> estimates.csv\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds: finite-n rate table over an n grid
// ---------------------------------------------------------------------------

inline int run_bounds(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  if (cfg.bounds.n_grid.empty()) throw UsageError("bounds: empty n grid");
  detail::ensure_out_dir(cfg);
  std::ostringstream csv;
  csv << "n,b,A,a,P_max,log2_M_lower,log2_M_upper,rate_lower,rate_upper\n";
  nlohmann::json rows = nlohmann::json::array();
  log << "        n    rate_lower    rate_upper\n";
  for (double n : cfg.bounds.n_grid) {
    const BoundReport r = bound_report(n, cfg.bounds.A, cfg.bounds.a, cfg.bounds.b,
                                       cfg.bounds.P_max);
    csv << g17(r.n) << ',' << g17(r.b) << ',' << g17(r.A) << ',' << g17(r.a) << ','
        << g17(r.P_max) << ',' << g17(r.log2_M_lower) << ',' << g17(r.log2_M_upper) << ','
        << g17(r.rate_lower) << ',' << g17(r.rate_upper) << '\n';
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& [name, value] : r.terms) terms[name] = value;
    rows.push_back({{"n", r.n},
                    {"log2_M_lower", r.log2_M_lower},
                    {"log2_M_upper", r.log2_M_upper},
                    {"rate_lower", r.rate_lower},
                    {"rate_upper", r.rate_upper},
                    {"terms", terms}});
    char line[96];
    std::snprintf(line, sizeof(line), "%9.3g    %10.6f    %10.6f\n", r.n, r.rate_lower,
                  r.rate_upper);
    log << line;
  }
  const auto dir = std::filesystem::path(cfg.out_dir);
  detail::write_text_file((dir / "bounds.csv").string(), csv.str());
  detail::write_text_file((dir / "bounds.json").string(),
                          nlohmann::json{{"rows", rows}}.dump(2) + "\n");
  detail::write_manifest(cfg, "bounds", {"bounds.csv", "bounds.json"});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: property suites; nonzero exit on any failed check
// ---------------------------------------------------------------------------

struct VerifyCheck {
  std::string name;
  bool ok = false;
  nlohmann::json details;
};

inline std::vector<VerifyCheck> verify_checks(const ExperimentConfig& cfg) {
  std::vector<VerifyCheck> checks;
  const ChannelParams params = cfg.channel_params();

  {  // gamma-ratio double inequality over random pairs
    const std::uint64_t pairs = cfg.verify.gamma_pairs;
    const double gmax = cfg.verify.gamma_max;
    const std::uint64_t failures =
        detail::sum_chunked(pairs, cfg.threads, [&](std::uint64_t lo, std::uint64_t hi) {
          std::uint64_t bad = 0;
          for (std::uint64_t t = lo; t < hi; ++t) {
            Rng rng = Rng::substream(mix_key(cfg.seed, 0x6A33A), t);
            const double a = gmax * rng.uniform01();
            const double b = a + (gmax - a) * rng.uniform01();
            if (!(a > 0.0) || !(b > a)) continue;
            const GammaRatioBounds g = gamma_ratio_bounds(a, b);
            const double log_exact = std::log(g.exact);
            const double tol = 1e-10 * std::max(1.0, std::fabs(log_exact));
            const bool lower_ok = g.lower <= 0.0 || std::log(g.lower) <= log_exact + tol;
            const bool upper_ok = log_exact <= std::log(g.upper) + tol;
            if (!lower_ok || !upper_ok) ++bad;
          }
          return bad;
        });
    checks.push_back({"gamma-ratio-sweep", failures == 0,
                      {{"pairs", pairs}, {"failures", failures}}});
  }

  {  // moment bound sweep on the validated grid
    const std::vector<double> ps = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const auto violations = scan_moment_bound(cfg.verify.moment_N_max, ps);
    checks.push_back({"moment-bound-sweep", violations.empty(),
                      {{"N_max", cfg.verify.moment_N_max}, {"violations", violations.size()}}});
  }

  if (!cfg.verify.codebook.empty()) {
    const Codebook cb = read_codebook(cfg.verify.codebook);
    {  // coordinates inside [0, A]
      std::size_t bad = 0;
      for (const auto& c : cb.codewords)
        for (double v : c)
          if (!(v >= 0.0) || v > cb.A * (1.0 + 1e-12)) ++bad;
      checks.push_back({"codebook-coordinate-range", bad == 0, {{"bad_coordinates", bad}}});
    }
    if (cb.size() >= 2) {  // construction separation guarantee
      const double mind = min_pairwise_distance(cb);
      const bool ok = mind >= 2.0 * cb.r0 * (1.0 - 1e-9);
      checks.push_back({"codebook-pairwise-min-distance", ok,
                        {{"min_distance", mind}, {"required", 2.0 * cb.r0}}});
    } else {
      checks.push_back({"codebook-pairwise-min-distance", true, {{"codewords", cb.size()}}});
    }
    {  // peak and average release rate constraints
      std::size_t bad = 0;
      for (const auto& c : cb.codewords)
        if (!satisfies_power_constraints(c, params)) ++bad;
      checks.push_back({"codebook-power-constraints", bad == 0, {{"bad_codewords", bad}}});
    }
    {  // saturation coverage at radius 2 r0
      const SaturationCertificate cert =
          saturation_check(cb, cfg.verify.trials, mix_key(cfg.seed, 0x5A70));
      const double uncovered = 1.0 - cert.coverage();
      checks.push_back({"codebook-saturation", uncovered <= 0.01,
                        {{"trials", cert.trials}, {"uncovered_fraction", uncovered}}});
    }
    if (cb.size() >= 2) {  // minimum-distance property an achievable code must satisfy
      const double eps_prime =
          params.P_max / std::pow(static_cast<double>(cb.n), 1.0 + cb.b);
      const MinDistanceReport rep = min_distance_check(cb, eps_prime);
      checks.push_back({"codebook-min-coordinate-gap", rep.ok(),
                        {{"eps_prime", eps_prime},
                         {"pairs_checked", rep.pairs_checked},
                         {"offending_pairs", rep.offending.size()}}});
      const double eps_r0 = eps_prime;
      const double upper_count =
          -0.599 * cb.n + cb.n * std::log2(params.P_max) -
          log2_sphere_volume(static_cast<double>(cb.n), eps_r0);
      checks.push_back({"converse-upper-count",
                        std::log2(static_cast<double>(cb.size())) <= upper_count,
                        {{"log2_M", std::log2(static_cast<double>(cb.size()))},
                         {"log2_upper", upper_count}}});
    }
  }

  {  // linearization validity of the kappa collapse
    const KappaReport k = converse_kappa(params, cfg.packing.n, cfg.packing.b);
    bool ok = true;
    if (k.bernoulli_valid) {
      const double base = 1.0 + 2.0 * params.amplitude() * params.T_s;
      ok = std::pow(base, k.bernoulli_exponent) <= 1.0 + k.kappa + 1e-12;
    }
    checks.push_back({"kappa-bernoulli-step", ok,
                      {{"kappa", k.kappa},
                       {"exponent", k.bernoulli_exponent},
                       {"linearization_in_range", k.bernoulli_valid}}});
  }

  {  // indistinguishability demo for a pair violating the distance property
    const int n = cfg.packing.n;
    const ConverseConfig conv = ConverseConfig::derive(params.P_max, n, cfg.packing.b);
    const double A = params.amplitude();
    const ReleaseVector c1(static_cast<std::size_t>(n), A / 2.0);
    const ReleaseVector c2(static_cast<std::size_t>(n), A / 2.0 + conv.eps_prime / 2.0);
    const DecoderConfig dec = DecoderConfig::derive(A, n, cfg.packing.b,
                                                    metric_mode_from_string(cfg.decoder.metric_mode));
    const ContradictionReport rep = converse_contradiction_demo(
        c1, c2, params, conv, dec, cfg.verify.trials, mix_key(cfg.seed, 0xDE30), cfg.threads);
    checks.push_back({"converse-contradiction-demo", rep.ok,
                      {{"sum", rep.sum()},
                       {"kappa", rep.kappa},
                       {"threshold", rep.threshold},
                       {"type1", rep.type1},
                       {"type2", rep.type2}}});
  }

  return checks;
}

inline int run_verify(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  detail::ensure_out_dir(cfg);
  const auto checks = verify_checks(cfg);
  nlohmann::json rows = nlohmann::json::array();
  bool all_ok = true;
  for (const auto& c : checks) {
    rows.push_back({{"check", c.name}, {"ok", c.ok}, {"details", c.details}});
    log << (c.ok ? "ok   " : "FAIL ") << c.name << ' ' << c.details.dump() << "\n";
    all_ok = all_ok && c.ok;
  }
  detail::write_text_file((std::filesystem::path(cfg.out_dir) / "verify.json").string(),
                          nlohmann::json{{"checks", rows}, {"ok", all_ok}}.dump(2) + "\n");
  detail::write_manifest(cfg, "verify", {"verify.json"});
  log << (all_ok ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all_ok ? kExitOk : kExitVerification;
}

}  // namespace dicode
