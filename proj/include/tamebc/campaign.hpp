#pragma once

// Experiment configuration, seeded campaigns and report files.
//
// A campaign runs `sample_count` cases of one mode.  Cases are independent:
// case i draws from sampling::case_rng(seed, i), so results do not depend on
// how cases are spread over worker threads, and records are emitted in case
// order.  Wall time is left out of file reports unless asked for, which keeps
// reports byte-identical across runs.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "tamebc/checks.hpp"
#include "tamebc/descent.hpp"
#include "tamebc/errors.hpp"
#include "tamebc/localfield.hpp"
#include "tamebc/matgrp.hpp"
#include "tamebc/orbital.hpp"
#include "tamebc/sampling.hpp"

namespace tamebc {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

enum class Mode { Matching, Descent, Invariants, Orbital };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Matching: return "matching";
    case Mode::Descent: return "descent";
    case Mode::Invariants: return "invariants";
    case Mode::Orbital: return "orbital";
  }
  return "?";
}

struct ExperimentConfig {
  i64 p = 3;
  int e = 2;
  int f = 1;
  int n = 1;
  int m = 1;
  int precision = 16;
  int depth = 6;
  std::uint64_t seed = 1;
  int sample_count = 10;
  Mode mode = Mode::Matching;
  std::string output_path;
};

/// Tame cyclic tower hypotheses and engine limits; throws ConfigInvalid.
inline void validate(const ExperimentConfig& c) {
  auto bad = [](const std::string& why) { throw ConfigInvalid(why); };
  if (c.p < 3 || !modarith::is_prime(c.p)) bad("p must be an odd prime");
  if (c.e < 1 || c.f < 1) bad("e and f must be positive");
  if ((static_cast<i64>(c.e) * c.f) % c.p == 0) bad("p must not divide d = e*f");
  if ((c.p - 1) % c.e != 0) bad("e must divide p-1");
  if (modarith::gcd(c.e, c.f) != 1) bad("gcd(e, f) must be 1");
  if (c.m < 1) bad("m must be at least 1");
  if (c.n < 1) bad("n must be at least 1");
  if (c.precision < 1) bad("precision must be at least 1");
  if (c.depth < 0) bad("depth must be non-negative");
  if (c.sample_count < 0) bad("sample_count must be non-negative");
  if ((c.mode == Mode::Matching || c.mode == Mode::Orbital) && c.n > 2) bad("orbital integrals support n <= 2");
  if (c.mode == Mode::Descent && c.m < std::max(1, c.e)) bad("descent needs m >= max(1, e)");
  try {
    (void)make_tower(c.p, c.e, c.f, c.precision);
  } catch (const UnsupportedExtension& ex) {
    bad(ex.what());
  }
}

inline Mode parse_mode(const std::string& s) {
  if (s == "matching") return Mode::Matching;
  if (s == "descent") return Mode::Descent;
  if (s == "invariants") return Mode::Invariants;
  if (s == "orbital") return Mode::Orbital;
  throw ConfigInvalid("unknown mode: " + s);
}

/// Flat object with ExperimentConfig keys; unknown keys are rejected and
/// missing keys keep their defaults.
inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigInvalid("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, val] : j.items()) {
    try {
      if (key == "p") c.p = val.get<i64>();
      else if (key == "e") c.e = val.get<int>();
      else if (key == "f") c.f = val.get<int>();
      else if (key == "n") c.n = val.get<int>();
      else if (key == "m") c.m = val.get<int>();
      else if (key == "precision") c.precision = val.get<int>();
      else if (key == "depth") c.depth = val.get<int>();
      else if (key == "seed") c.seed = val.get<std::uint64_t>();
      else if (key == "sample_count") c.sample_count = val.get<int>();
      else if (key == "mode") c.mode = parse_mode(val.get<std::string>());
      else if (key == "output_path") c.output_path = val.get<std::string>();
      else throw ConfigInvalid("unknown config key: " + key);
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigInvalid("bad value for " + key + ": " + ex.what());
    }
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigInvalid(std::string("config is not valid JSON: ") + ex.what());
  }
  return config_from_json(j);
}

inline json config_to_json(const ExperimentConfig& c) {
  return json{{"p", c.p},
              {"e", c.e},
              {"f", c.f},
              {"n", c.n},
              {"m", c.m},
              {"precision", c.precision},
              {"depth", c.depth},
              {"seed", c.seed},
              {"sample_count", c.sample_count},
              {"mode", mode_name(c.mode)},
              {"output_path", c.output_path}};
}

inline json matrix_json(const Matrix& M) { return json(M.to_strings()); }

inline json orbital_json(const OrbitalValue& v) {
  return json{{"value", to_string(v.value)},
              {"D", to_string(v.normalizing_factor)},
              {"normalized_squared", to_string(v.normalized_squared())},
              {"depth_used", v.depth_used},
              {"certified", v.certified},
              {"lattices_visited", v.lattices_visited},
              {"admissible_vertices", v.admissible}};
}

inline json report_json(const MatchReport& r, bool timing) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["inputs"] = json{{"p", r.p}, {"e", r.e}, {"f", r.f}, {"n", r.n}, {"m", r.m},
                     {"precision", r.precision}, {"depth", r.depth}, {"gamma", matrix_json(r.gamma)}};
  j["haar"] = HaarNormalization::kConvention;
  j["irregular"] = r.irregular;
  j["norm_status"] = norm_status_name(r.norm_status);
  j["witness"] = r.witness ? matrix_json(*r.witness) : json(nullptr);
  j["lhs"] = orbital_json(r.lhs);
  j["rhs"] = orbital_json(r.rhs);
  j["transfer_factor"] = to_string(r.transfer);
  j["certified"] = r.certified();
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  j["wall_ms"] = timing && r.wall_ms ? json(*r.wall_ms) : json(nullptr);
  return j;
}

struct CaseRecord {
  int case_id = 0;
  bool pass = false;
  bool certified = true;
  std::string lhs;
  std::string rhs;
  std::string D;
  int depth = 0;
  double ms = 0;
  json record;
};

struct RunOptions {
  int threads = 0;  // 0: hardware concurrency
  bool timing = false;
  bool trace = false;
};

struct CampaignReport {
  ExperimentConfig config;
  std::vector<CaseRecord> cases;
  double total_ms = 0;
  bool timing = false;

  long long passed() const {
    return std::count_if(cases.begin(), cases.end(), [](const CaseRecord& c) { return c.pass; });
  }
  long long certified() const {
    return std::count_if(cases.begin(), cases.end(), [](const CaseRecord& c) { return c.certified; });
  }
  int max_depth() const {
    int d = 0;
    for (const auto& c : cases) d = std::max(d, c.depth);
    return d;
  }
  bool all_ok() const {
    return std::all_of(cases.begin(), cases.end(), [](const CaseRecord& c) { return c.pass && c.certified; });
  }

  json summary_json() const {
    return json{{"schema_version", kSchemaVersion},
                {"tool_version", kToolVersion},
                {"config", config_to_json(config)},
                {"generator", "mt19937_64 seeded by seed_seq(seed, case_id)"},
                {"regularity_slack", kDefaultSlack},
                {"cases", cases.size()},
                {"passed", passed()},
                {"failed", static_cast<long long>(cases.size()) - passed()},
                {"certified", certified()},
                {"max_depth_used", max_depth()},
                {"total_ms", timing ? json(total_ms) : json(nullptr)}};
  }
};

namespace campaign_detail {

inline std::string error_text(const Error& ex) { return std::string(ex.kind()) + ": " + ex.what(); }

inline CaseRecord matching_case(const ExperimentConfig& c, const TowerSpec& t, int id, const RunOptions& opt) {
  auto rng = sampling::case_rng(c.seed, static_cast<std::uint64_t>(id));
  CaseRecord rec;
  rec.case_id = id;
  Matrix gamma;
  if (c.n == 1) {
    // a class u p^v with v in [-2, 2], u a unit mod p^2
    const int v = static_cast<int>(sampling::uniform(rng, 5)) - 2;
    i64 u = 0;
    while (u % c.p == 0) u = 1 + sampling::uniform(rng, c.p * c.p - 1);
    gamma = Matrix::diagonal(t, {sampling::rank1_class(t, u, v)});
  } else {
    const auto g = sampling::random_tu_regular_F(t, c.n, rng);
    if (!g) throw IrregularInput("no regular sample after rejection budget");
    gamma = *g;
  }
  const MatchReport r = check_matching(gamma, c.m, HaarNormalization{}, c.depth);
  rec.pass = r.pass;
  rec.certified = r.certified();
  rec.lhs = to_string(r.lhs.value);
  rec.rhs = to_string(r.rhs.value);
  rec.D = to_string(r.lhs.normalizing_factor);
  rec.depth = std::max(r.lhs.depth_used, r.rhs.depth_used);
  rec.ms = r.wall_ms.value_or(0);
  rec.record = report_json(r, opt.timing);
  return rec;
}

inline CaseRecord descent_case(const ExperimentConfig& c, const TowerSpec& t, int id, const RunOptions& opt) {
  auto rng = sampling::case_rng(c.seed, static_cast<std::uint64_t>(id));
  const Matrix I = Matrix::identity(t, c.n);
  const Matrix k = I + sampling::random_matrix(t, c.n, rng, c.m);
  const DescentResult r = descend(k, LatticePair{c.m});
  const bool fixed = r.h.is_theta_fixed();
  const bool rebuilt = (r.g * r.h * r.g.theta().inverse()).equals_at_precision(k);
  CaseRecord rec;
  rec.case_id = id;
  rec.pass = fixed && rebuilt && r.iterations <= t.precision;
  rec.depth = r.iterations;
  rec.record = json{{"schema_version", kSchemaVersion}, {"mode", "descent"}, {"case_id", id},
                    {"k", matrix_json(k)}, {"g", matrix_json(r.g)}, {"h", matrix_json(r.h)},
                    {"iterations", r.iterations}, {"h_theta_fixed", fixed}, {"reconstructs_k", rebuilt},
                    {"verdict", rec.pass ? "PASS" : "FAIL"}};
  if (opt.trace) {
    json tr = json::array();
    for (const auto& s : r.trace)
      tr.push_back(json{{"iteration", s.iteration},
                        {"x2_valuation", s.x2_valuation == kInfVal ? json(nullptr) : json(s.x2_valuation)},
                        {"y_valuation", s.y_valuation == kInfVal ? json(nullptr) : json(s.y_valuation)}});
    rec.record["trace"] = tr;
  }
  return rec;
}

inline CaseRecord invariants_case(const ExperimentConfig& c, const TowerSpec& t, int id, const RunOptions&) {
  const auto seed = c.seed * 1000003ULL + static_cast<std::uint64_t>(id);
  std::vector<checks::Tally> ts;
  ts.push_back(checks::theta_automorphism(t, 4, seed));
  ts.push_back(checks::theta_level_cell(t.p, t.e, c.m, 12, seed));
  ts.push_back(checks::cayley_identities(t, c.n, 2, seed));
  if (c.m >= std::max(1, t.e)) ts.push_back(checks::descent_reconstruction(t, c.n, c.m, 2, seed));
  ts.push_back(checks::dth_root_homeomorphism(t, c.n, 2, seed));
  if (c.n <= 2) ts.push_back(checks::d_factor_coherence(t, c.n, 1, seed));
  CaseRecord rec;
  rec.case_id = id;
  rec.pass = std::all_of(ts.begin(), ts.end(), [](const checks::Tally& x) { return x.ok(); });
  json props = json::array();
  for (const auto& x : ts)
    props.push_back(json{{"property", x.name}, {"passed", x.passed}, {"total", x.total},
                         {"first_failure", x.first_failure.empty() ? json(nullptr) : json(x.first_failure)}});
  rec.record = json{{"schema_version", kSchemaVersion}, {"mode", "invariants"}, {"case_id", id},
                    {"properties", props}, {"verdict", rec.pass ? "PASS" : "FAIL"}};
  return rec;
}

inline CaseRecord orbital_case(const ExperimentConfig& c, const TowerSpec& t, int id, const RunOptions&) {
  auto rng = sampling::case_rng(c.seed, static_cast<std::uint64_t>(id));
  std::optional<Matrix> gamma;
  for (int tries = 0; tries < 64 && !gamma; ++tries) {
    Matrix g = sampling::random_gl_F(t, c.n, rng);
    if (is_regular_semisimple(g)) gamma = g;
  }
  if (!gamma) throw IrregularInput("no regular sample after rejection budget");
  const OrbitalValue v = orbital_integral(TestFunction::h_side(t, c.m), *gamma, HaarNormalization{}, c.depth);
  CaseRecord rec;
  rec.case_id = id;
  rec.pass = v.certified;
  rec.certified = v.certified;
  rec.lhs = to_string(v.value);
  rec.D = to_string(v.normalizing_factor);
  rec.depth = v.depth_used;
  rec.record = json{{"schema_version", kSchemaVersion}, {"mode", "orbital"}, {"case_id", id},
                    {"gamma", matrix_json(*gamma)}, {"torus", torus_kind_name(classify_torus(*gamma).kind)},
                    {"orbital", orbital_json(v)}, {"verdict", rec.pass ? "PASS" : "FAIL"}};
  return rec;
}

}  // namespace campaign_detail

/// Runs every case of the configured mode; engine errors are recorded per case.
inline CampaignReport run_experiment(const ExperimentConfig& config, const RunOptions& opt = {}) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const Tower tower = make_tower(config.p, config.e, config.f, config.precision);
  CampaignReport report;
  report.config = config;
  report.timing = opt.timing;
  report.cases.resize(static_cast<std::size_t>(config.sample_count));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int id = next.fetch_add(1);
      if (id >= config.sample_count) return;
      const auto t0 = std::chrono::steady_clock::now();
      CaseRecord rec;
      try {
        switch (config.mode) {
          case Mode::Matching: rec = campaign_detail::matching_case(config, *tower, id, opt); break;
          case Mode::Descent: rec = campaign_detail::descent_case(config, *tower, id, opt); break;
          case Mode::Invariants: rec = campaign_detail::invariants_case(config, *tower, id, opt); break;
          case Mode::Orbital: rec = campaign_detail::orbital_case(config, *tower, id, opt); break;
        }
      } catch (const Error& ex) {
        rec = CaseRecord{};
        rec.case_id = id;
        rec.pass = false;
        rec.certified = false;
        rec.record = json{{"schema_version", kSchemaVersion}, {"mode", mode_name(config.mode)}, {"case_id", id},
                          {"error", campaign_detail::error_text(ex)}, {"verdict", "FAIL"}};
      }
      rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (!rec.record.contains("case_id")) rec.record["case_id"] = id;
      report.cases[static_cast<std::size_t>(id)] = std::move(rec);
    }
  };
  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  threads = std::max(1, std::min(threads, std::max(1, config.sample_count)));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  report.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline std::string summary_csv(const CampaignReport& r) {
  std::ostringstream os;
  os << "case_id,verdict,lhs,rhs,D,depth,certified,ms\n";
  for (const auto& c : r.cases) {
    os << c.case_id << ',' << (c.pass ? "PASS" : "FAIL") << ',' << c.lhs << ',' << c.rhs << ',' << c.D << ','
       << c.depth << ',' << (c.certified ? "true" : "false") << ',';
    if (r.timing) os << c.ms;
    os << '\n';
  }
  return os.str();
}

inline std::string records_jsonl(const CampaignReport& r) {
  std::ostringstream os;
  os << json{{"summary", r.summary_json()}}.dump() << '\n';
  for (const auto& c : r.cases) os << c.record.dump() << '\n';
  return os.str();
}

/// Writes report.jsonl and summary.csv into `dir`.
inline void write_report(const CampaignReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(std::filesystem::path(dir) / "report.jsonl") << records_jsonl(r);
  std::ofstream(std::filesystem::path(dir) / "summary.csv") << summary_csv(r);
}

// ---------------------------------------------------------------------------
// Self-check

struct SelfcheckOptions {
  bool corrupt_zeta = false;  // fault injection: breaks theta^d = id
};

struct SelfcheckReport {
  std::vector<checks::Tally> suites;
  bool all_ok() const {
    return std::all_of(suites.begin(), suites.end(), [](const checks::Tally& t) { return t.ok(); });
  }
  std::string table() const {
    std::ostringstream os;
    for (const auto& s : suites) {
      os << (s.ok() ? "PASS " : "FAIL ") << s.name << "  " << s.passed << "/" << s.total;
      if (!s.ok() && !s.first_failure.empty()) os << "  (" << s.first_failure << ")";
      os << '\n';
    }
    return os.str();
  }
};

/// The frozen built-in suite.
inline SelfcheckReport selfcheck(const SelfcheckOptions& opt = {}) {
  constexpr std::uint64_t kSeed = 20240611;
  auto tower = [&](i64 p, int e, int f, int prec) {
    Tower t = make_tower(p, e, f, prec);
    if (opt.corrupt_zeta) t = testing::tower_with_corrupted_zeta(*t, t->zeta_e + 1);
    return t;
  };
  SelfcheckReport rep;
  std::vector<Tower> keep;
  const std::vector<std::array<int, 3>> shapes{{3, 2, 1}, {3, 1, 2}, {5, 2, 1}, {7, 3, 1}};
  for (const auto& s : shapes) {
    keep.push_back(tower(s[0], s[1], s[2], 8));
    rep.suites.push_back(checks::theta_automorphism(*keep.back(), 20, kSeed));
  }
  {
    checks::Tally grid{"K_E(m)^theta = K_F(ceil(m/e)) grid"};
    for (const auto& [p, e] : std::vector<std::pair<i64, int>>{{3, 1}, {3, 2}, {7, 1}, {7, 2}, {7, 3}})
      for (int m = 1; m <= 6; ++m) grid.merge(checks::theta_level_cell(p, e, m, 40, kSeed));
    rep.suites.push_back(grid);
  }
  for (const auto& t : keep) rep.suites.push_back(checks::cayley_identities(*t, 2, 10, kSeed));
  for (const auto& s : std::vector<std::array<int, 3>>{{5, 2, 1}, {3, 1, 2}}) {
    keep.push_back(tower(s[0], s[1], s[2], 8));
    rep.suites.push_back(checks::descent_reconstruction(*keep.back(), 2, 2, 10, kSeed));
  }
  for (const auto& s : std::vector<std::array<int, 3>>{{3, 1, 2}, {5, 2, 1}}) {
    keep.push_back(tower(s[0], s[1], s[2], 16));
    rep.suites.push_back(checks::d_factor_coherence(*keep.back(), 2, 5, kSeed));
  }
  for (const auto& s : std::vector<std::array<int, 3>>{{3, 2, 1}, {3, 1, 2}}) {
    keep.push_back(tower(s[0], s[1], s[2], 12));
    for (int m = 1; m <= 2; ++m) rep.suites.push_back(checks::rank1_matching_sweep(*keep.back(), m, 4));
  }
  return rep;
}

}  // namespace tamebc
