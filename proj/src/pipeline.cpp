#include "cubeforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cubeforge/adjacent.hpp"
#include "cubeforge/dyadic.hpp"
#include "cubeforge/error.hpp"
#include "cubeforge/labeling.hpp"
#include "cubeforge/rng.hpp"

namespace cubeforge {

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::ConfigError, path + ": " + msg);
}

template <typename T>
T get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) config_error(path, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.is_number_integer() && j.get<std::int64_t>() < 0) config_error(path, "expected a non-negative integer");
    }
  }
  return j.get<T>();
}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) config_error(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

McConfig parse_mc(const Json& j) {
  McConfig mc;
  if (!j.is_object()) config_error("mc", "expected an object");
  reject_unknown(j, "mc", {"N", "tau_list", "points", "levels", "variant", "chain_samples"});
  if (j.contains("N")) mc.N = get_number<std::size_t>(j["N"], "mc.N");
  if (j.contains("tau_list")) {
    if (!j["tau_list"].is_array()) config_error("mc.tau_list", "expected an array");
    mc.tau_list.clear();
    for (std::size_t i = 0; i < j["tau_list"].size(); ++i) {
      const std::string p = "mc.tau_list[" + std::to_string(i) + "]";
      const double t = get_number<double>(j["tau_list"][i], p);
      if (!(t > 0)) config_error(p, "tau must be positive");
      mc.tau_list.push_back(t);
    }
  }
  if (j.contains("points")) {
    if (!j["points"].is_array()) config_error("mc.points", "expected an array");
    for (std::size_t i = 0; i < j["points"].size(); ++i)
      mc.points.push_back(get_number<PointId>(j["points"][i], "mc.points[" + std::to_string(i) + "]"));
  }
  if (j.contains("levels")) {
    if (!j["levels"].is_array()) config_error("mc.levels", "expected an array");
    for (std::size_t i = 0; i < j["levels"].size(); ++i)
      mc.levels.push_back(get_number<int>(j["levels"][i], "mc.levels[" + std::to_string(i) + "]"));
  }
  if (j.contains("variant")) {
    if (!j["variant"].is_string()) config_error("mc.variant", "expected a string");
    try {
      mc.variant = sampler_variant_from_string(j["variant"].get<std::string>());
    } catch (const Error& e) {
      config_error("mc.variant", e.what());
    }
  }
  if (j.contains("chain_samples")) mc.chain_samples = get_number<std::size_t>(j["chain_samples"], "mc.chain_samples");
  return mc;
}

AnalysisConfig parse_analysis(const Json& j) {
  AnalysisConfig a;
  if (!j.is_object()) config_error("analysis", "expected an object");
  reject_unknown(j, "analysis", {"p_list", "n_random_functions", "mean"});
  if (j.contains("p_list")) {
    if (!j["p_list"].is_array()) config_error("analysis.p_list", "expected an array");
    a.p_list.clear();
    for (std::size_t i = 0; i < j["p_list"].size(); ++i) {
      const std::string path = "analysis.p_list[" + std::to_string(i) + "]";
      const double p = get_number<double>(j["p_list"][i], path);
      if (!(p > 1)) config_error(path, "p must exceed 1");
      a.p_list.push_back(p);
    }
  }
  if (j.contains("n_random_functions"))
    a.n_random_functions = get_number<std::size_t>(j["n_random_functions"], "analysis.n_random_functions");
  if (j.contains("mean")) {
    if (!j["mean"].is_string()) config_error("analysis.mean", "expected a string");
    try {
      a.mean = mean_convention_from_string(j["mean"].get<std::string>());
    } catch (const Error& e) {
      config_error("analysis.mean", e.what());
    }
  }
  return a;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <typename F>
auto stage(RunReport& report, const std::string& name, F&& body) {
  Stopwatch sw;
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      report.timings.push_back({name, sw.seconds()});
    } else {
      auto out = body();
      report.timings.push_back({name, sw.seconds()});
      return out;
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "stage " + name + ": " + e.what());
  }
}

CheckEntry entry(std::string name, VerificationReport rep) {
  CheckEntry e;
  e.name = std::move(name);
  e.passed = rep.passed();
  e.report = std::move(rep);
  return e;
}

// Stream tags for derive_seed(config.seed, {tag}).
constexpr std::uint64_t kTagBoundary = 1;
constexpr std::uint64_t kTagSelection = 2;
constexpr std::uint64_t kTagChain = 3;
constexpr std::uint64_t kTagAnalysis = 4;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

BoundaryEstimate boundary_from_json(const Json& j) {
  BoundaryEstimate e;
  e.x = j.at("x").get<PointId>();
  e.k = j.at("k").get<int>();
  e.tau = j.at("tau").get<double>();
  e.N = j.at("N").get<std::size_t>();
  e.hits = j.at("hits").get<std::size_t>();
  e.p_hat = j.at("p_hat").get<double>();
  e.wilson_upper = j.at("wilson_upper").get<double>();
  e.bound = j.at("bound_C2_tau_eta").get<double>();
  e.pass = j.at("pass").get<bool>();
  return e;
}

}  // namespace

double parse_delta(const Json& j) {
  double d = 0.0;
  if (j.is_number()) {
    d = j.get<double>();
  } else if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        d = std::stod(s, &used);
        if (used != s.size()) config_error("delta", "malformed number '" + s + "'");
      } else {
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        std::size_t ua = 0, ub = 0;
        const double num = std::stod(a, &ua), den = std::stod(b, &ub);
        if (ua != a.size() || ub != b.size()) config_error("delta", "malformed fraction '" + s + "'");
        d = num / den;
      }
    } catch (const std::logic_error&) {
      config_error("delta", "malformed value '" + s + "'");
    }
  } else {
    config_error("delta", "expected a number or a fraction string");
  }
  if (!(d > 0 && d < 1)) config_error("delta", "must lie in (0, 1)");
  return d;
}

PipelineConfig parse_config(const Json& j) {
  if (!j.is_object()) config_error("<root>", "expected an object");
  reject_unknown(j, "", {"space", "delta", "mode", "distinguished", "seed", "checks", "mc", "analysis"});
  PipelineConfig c;
  if (!j.contains("space")) config_error("space", "missing");
  c.space = j["space"];
  if (!c.space.is_object() || !c.space.contains("type") || !c.space["type"].is_string())
    config_error("space.type", "expected a generator object with a string type");
  if (!j.contains("delta")) config_error("delta", "missing");
  c.delta_spec = j["delta"];
  c.delta = parse_delta(j["delta"]);
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) config_error("mode", "expected a string");
    try {
      c.mode = mode_from_string(j["mode"].get<std::string>());
    } catch (const Error& e) {
      config_error("mode", e.what());
    }
  }
  // A_0 >= 1, so strict mode needs at least 144 delta <= 1 before any space exists.
  if (c.mode == Mode::Strict && !satisfies_strict_constraint(1.0, c.delta))
    config_error("delta", "strict mode requires 144 A_0^8 delta <= 1");
  if (j.contains("distinguished") && !j["distinguished"].is_null())
    c.distinguished = get_number<PointId>(j["distinguished"], "distinguished");
  if (j.contains("seed")) c.seed = get_number<std::uint64_t>(j["seed"], "seed");
  if (j.contains("checks")) {
    if (!j["checks"].is_array()) config_error("checks", "expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j["checks"].size(); ++i) {
      const std::string path = "checks[" + std::to_string(i) + "]";
      if (!j["checks"][i].is_string()) config_error(path, "expected a string");
      const std::string name = j["checks"][i].get<std::string>();
      if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
        config_error(path, "unknown check '" + name + "'");
      if (seen.insert(name).second) c.checks.push_back(name);
    }
  } else {
    c.checks = known_checks();
  }
  if (j.contains("mc")) c.mc = parse_mc(j["mc"]);
  if (j.contains("analysis")) c.analysis = parse_analysis(j["analysis"]);
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ConfigError, "<root>: " + std::string(e.what()));
  }
  return parse_config(j);
}

Json to_json(const PipelineConfig& c) {
  Json mc = {{"N", c.mc.N},
             {"tau_list", c.mc.tau_list},
             {"points", c.mc.points},
             {"levels", c.mc.levels},
             {"variant", to_string(c.mc.variant)},
             {"chain_samples", c.mc.chain_samples}};
  Json an = {{"p_list", c.analysis.p_list},
             {"n_random_functions", c.analysis.n_random_functions},
             {"mean", to_string(c.analysis.mean)}};
  Json j = {{"space", c.space}, {"delta", c.delta_spec.is_null() ? Json(c.delta) : c.delta_spec},
            {"mode", to_string(c.mode)}, {"seed", c.seed}, {"checks", c.checks}, {"mc", mc}, {"analysis", an}};
  j["distinguished"] = c.distinguished ? Json(*c.distinguished) : Json(nullptr);
  return j;
}

Json to_json(const RunReport& r) {
  Json checks = Json::array();
  for (const CheckEntry& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"report", c.report}, {"constants", c.constants}});
  Json boundary = Json::array();
  for (const BoundaryEstimate& e : r.boundary) boundary.push_back(to_json(e));
  Json timings = Json::array();
  for (const StageTiming& t : r.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  return {{"format", "cubeforge-report v1"}, {"passed", r.passed()}, {"config", r.config},
          {"space_profile", r.space_profile}, {"checks", checks}, {"boundary", boundary},
          {"timings", timings}, {"artifacts", r.artifacts}};
}

RunReport run_report_from_json(const Json& j) {
  RunReport r;
  r.config = j.at("config");
  r.space_profile = j.at("space_profile");
  for (const Json& c : j.at("checks")) {
    CheckEntry e;
    e.name = c.at("name").get<std::string>();
    e.passed = c.at("passed").get<bool>();
    e.report = c.at("report").get<VerificationReport>();
    e.constants = c.at("constants");
    r.checks.push_back(std::move(e));
  }
  for (const Json& b : j.at("boundary")) r.boundary.push_back(boundary_from_json(b));
  for (const Json& t : j.at("timings")) r.timings.push_back({t.at("stage").get<std::string>(), t.at("seconds").get<double>()});
  r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  return r;
}

Json failure_summary(const RunReport& r) {
  Json failed = Json::array();
  for (const CheckEntry& c : r.checks) {
    if (c.passed) continue;
    Json sub = Json::array();
    for (const CheckResult& cr : c.report.checks)
      if (cr.enforced && !cr.passed()) {
        Json w = Json::array();
        for (const Witness& x : cr.witnesses) w.push_back(x);
        sub.push_back({{"check", cr.name}, {"violations", cr.violations}, {"witnesses", w}});
      }
    failed.push_back({{"name", c.name}, {"failures", sub}});
  }
  return {{"passed", r.passed()}, {"failed", failed}};
}

RunReport run_pipeline(const PipelineConfig& cfg, const std::string& out_dir) {
  RunReport report;
  report.config = to_json(cfg);
  auto wants = [&](const char* name) {
    return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
  };
  const bool strict = cfg.mode == Mode::Strict;

  const QuasiMetricSpace space = stage(report, "generate", [&] { return generate_space(cfg.space); });
  {
    const SpaceProfile& p = space.profile();
    report.space_profile = {{"n", space.size()}, {"a0", p.a0}, {"a0_measured", p.a0_measured},
                            {"diam", p.diam}};
    report.space_profile["a0_declared"] = p.a0_declared ? Json(*p.a0_declared) : Json(nullptr);
    report.space_profile["a1"] = p.a1 ? Json(*p.a1) : Json(nullptr);
    report.space_profile["min_gap"] = p.min_gap ? Json(*p.min_gap) : Json(nullptr);
  }
  if (cfg.distinguished && *cfg.distinguished >= space.size())
    throw Error(ErrorKind::ConfigError, "distinguished: point out of range");

  const NetHierarchy nets = stage(report, "nets", [&] {
    return build_reference_hierarchy(space, cfg.delta, cfg.mode, cfg.distinguished);
  });
  const LabeledHierarchy labeled = stage(report, "labels", [&] { return build_labels(space, nets); });
  const CubeSystem reference = stage(report, "reference_system", [&] { return build_reference_system(space, nets); });
  const AdjacentFamily family =
      stage(report, "adjacent_family", [&] { return build_adjacent_family(space, labeled, cfg.distinguished); });

  if (!out_dir.empty()) {
    stage(report, "artifacts", [&] {
      std::filesystem::create_directories(out_dir);
      const std::pair<const char*, Json> files[] = {{"space.json", to_json(space)},
                                                    {"nets.json", to_json(nets)},
                                                    {"labels.json", to_json(labeled)},
                                                    {"reference_system.json", to_json(reference)},
                                                    {"adjacent_family.json", to_json(family, labeled)}};
      for (const auto& [name, j] : files) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        write_text(path, j.dump() + "\n");
        report.artifacts.push_back(path);
      }
    });
  }

  if (wants("net")) {
    report.checks.push_back(stage(report, "check.net", [&] { return entry("net", verify_net_axioms(space, nets)); }));
  }

  if (wants("cubes")) {
    report.checks.push_back(stage(report, "check.cubes", [&] {
      VerificationReport rep;
      rep.subject = "cube axioms";
      rep.merge(verify_cube_axioms(space, reference), "reference.");
      rep.merge(verify_labels(space, labeled), "labels.");
      for (int t = 1; t <= family.K; ++t) {
        const std::string prefix = "t" + std::to_string(t) + ".";
        rep.merge(verify_new_point_axioms(space, family.selections[static_cast<std::size_t>(t - 1)], labeled.a0,
                                          labeled.delta(), labeled.mode()),
                  prefix);
        rep.merge(verify_cube_axioms(space, family.system(t)), prefix);
      }
      CheckEntry e = entry("cubes", std::move(rep));
      e.constants = {{"L", labeled.L}, {"M", labeled.M}, {"K", labeled.K()},
                     {"near_fallbacks", labeled.near_fallbacks}, {"repaired_parents", reference.parents.repaired}};
      return e;
    }));
  }

  if (wants("covering")) {
    report.checks.push_back(stage(report, "check.covering", [&] {
      CheckEntry e = entry("covering", verify_covering(space, labeled, family));
      e.constants = {{"C", family.C}, {"K", family.K}};
      return e;
    }));
  }

  const OmegaSampler sampler(space, labeled, cfg.mc.variant);
  std::vector<int> window;
  for (int k = labeled.k_min(); k <= labeled.k_max(); ++k) window.push_back(k);

  if (wants("mc_boundary")) {
    report.checks.push_back(stage(report, "check.mc_boundary", [&] {
      std::vector<PointId> xs = cfg.mc.points;
      if (xs.empty())
        for (PointId x = 0; x < space.size(); ++x) xs.push_back(x);
      for (PointId x : xs)
        if (x >= space.size()) throw Error(ErrorKind::ConfigError, "mc.points: point out of range");
      const std::vector<int> ks = cfg.mc.levels.empty() ? window : cfg.mc.levels;
      for (int k : ks)
        if (k < labeled.k_min() || k > labeled.k_max())
          throw Error(ErrorKind::ConfigError, "mc.levels: level outside the window");

      VerificationReport rep;
      rep.subject = "random systems";
      CheckResult& decay = rep.add("boundary_decay", strict);
      report.boundary = boundary_sweep(sampler, xs, ks, cfg.mc.tau_list, cfg.mc.N, derive_seed(cfg.seed, {kTagBoundary}));
      for (const BoundaryEstimate& b : report.boundary) {
        ++decay.checked;
        if (!b.pass) decay.fail({"decay", {b.x, b.k}, b.wilson_upper, b.bound});
      }

      CheckResult& floor = rep.add("selection_floor", strict);
      CheckResult& exact = rep.add("selection_exact_3sigma", false);
      CheckResult& chi = rep.add("selection_chi_square", strict);
      Json sel = Json::array();
      if (labeled.k_max() > labeled.k_min()) {
        const int k = labeled.k_min() + (labeled.k_max() - labeled.k_min() - 1) / 2;
        const LevelLabels& lv = labeled.at(k);
        const std::uint64_t master = derive_seed(cfg.seed, {kTagSelection});
        const double alpha_level = 0.01 / static_cast<double>(std::max<std::size_t>(1, lv.children.size()));
        double min_p = 1.0;
        for (std::uint32_t a = 0; a < lv.children.size(); ++a) {
          const auto counts = sample_selection_counts(sampler, k, a, cfg.mc.N, master);
          const auto probs = exact_selection_marginal(sampler, k, a);
          const double p = chi_square_p_value(counts, probs);
          min_p = std::min(min_p, p);
          ++chi.checked;
          if (p < alpha_level) chi.fail({"chi_square", {k, a}, p, alpha_level});
          const double tau0 = sampler.tau0();
          const double N = static_cast<double>(cfg.mc.N);
          for (std::size_t i = 0; i < counts.size(); ++i) {
            const double freq = static_cast<double>(counts[i]) / N;
            const double thr = tau0 - 3.0 * std::sqrt(tau0 * (1 - tau0) / N);
            ++floor.checked;
            if (freq < thr) floor.fail({"below_tau0", {k, a, lv.children[a][i]}, freq, thr});
            const double sigma = std::sqrt(probs[i] * (1 - probs[i]) / N);
            ++exact.checked;
            if (std::abs(freq - probs[i]) > 3.0 * sigma + 1e-12)
              exact.fail({"off_exact", {k, a, lv.children[a][i]}, freq, probs[i]});
            sel.push_back({{"alpha", a}, {"beta", lv.children[a][i]}, {"frequency", freq}, {"exact", probs[i]}});
          }
        }
        chi.metrics = {{"level", k}, {"min_p_value", min_p}, {"threshold", alpha_level}};
      }
      CheckEntry e = entry("mc_boundary", std::move(rep));
      e.constants = {{"variant", to_string(cfg.mc.variant)}, {"tau0", sampler.tau0()}, {"eta", sampler.eta()},
                     {"C2", sampler.C2()}, {"selection", sel}};
      return e;
    }));
  }

  if (wants("chain")) {
    report.checks.push_back(stage(report, "check.chain", [&] {
      VerificationReport rep;
      rep.subject = "chain separation";
      CheckResult& sep = rep.add("chain_separation", strict);
      std::size_t admissible = 0, pairs = 0;
      const std::uint64_t master = derive_seed(cfg.seed, {kTagChain});
      for (std::size_t s = 0; s < cfg.mc.chain_samples; ++s) {
        const CubeSystem sys = sample_cube_system(sampler, sample_seed(master, s), 1);
        for (const ChainQuery& q : admissible_chains(space, sys)) {
          ++admissible;
          const VerificationReport r = check_chain_separation(space, sys, q.x, q.k, q.tau, q.depth);
          const CheckResult& c = r.checks.front();
          sep.checked += c.checked;
          pairs += c.checked;
          for (const Witness& w : c.witnesses) sep.fail(w);
          for (std::size_t extra = c.witnesses.size(); extra < c.violations; ++extra) ++sep.violations;
        }
      }
      sep.metrics = {{"samples", cfg.mc.chain_samples}, {"admissible_chains", admissible}, {"pairs", pairs}};
      if (admissible == 0) sep.note = "no admissible boundary chains in the sampled systems";
      CheckEntry e = entry("chain", std::move(rep));
      e.constants = {{"admissible_chains", admissible}, {"pairs", pairs}};
      return e;
    }));
  }

  if (wants("analysis")) {
    report.checks.push_back(stage(report, "check.analysis", [&] {
      const std::size_t n = space.size();
      const Measure mu = Measure::counting(n);
      RandomStream rng(derive_seed(cfg.seed, {kTagAnalysis}));
      std::vector<std::vector<double>> fs(cfg.analysis.n_random_functions, std::vector<double>(n));
      for (auto& f : fs)
        for (double& v : f) v = rng.uniform(-1.0, 1.0);
      VerificationReport rep;
      rep.subject = "analysis";
      rep.merge(verify_comparability(space, labeled, family, mu, fs, cfg.analysis.mean));
      Json per_p = Json::array();
      for (double p : cfg.analysis.p_list) {
        VerificationReport agg;
        for (std::size_t i = 0; i < fs.size(); ++i) {
          std::vector<double> omega(n);
          for (double& w : omega) w = std::exp(rng.uniform(-2.0, 2.0));
          VerificationReport r = verify_weighted_bounds(space, family, mu, omega, fs[i], p, cfg.analysis.mean);
          if (agg.checks.empty()) {
            agg = r;
            for (CheckResult& c : agg.checks) c.metrics = Json::object();
            continue;
          }
          for (std::size_t c = 0; c < r.checks.size(); ++c) {
            CheckResult& dst = agg.checks[c];
            dst.checked += r.checks[c].checked;
            for (const Witness& w : r.checks[c].witnesses) dst.fail(w);
            for (std::size_t extra = r.checks[c].witnesses.size(); extra < r.checks[c].violations; ++extra)
              ++dst.violations;
          }
        }
        rep.merge(agg, "p=" + fmt(p) + ".");
        per_p.push_back(p);
      }
      const ComparabilityConstants cc = comparability_constants(space, mu, family);
      CheckEntry e = entry("analysis", std::move(rep));
      e.constants = {{"C_mu", cc.C_mu}, {"c_mu", cc.c_mu}, {"C_a", cc.cube_to_ball}, {"C_a_prime", cc.ball_to_cube},
                     {"p_list", per_p}, {"mean", to_string(cfg.analysis.mean)}};
      return e;
    }));
  }

  return report;
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw Error(ErrorKind::ConfigError, "format: expected json or csv, got '" + s + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

std::string checks_csv(const RunReport& r) {
  std::ostringstream os;
  os << kCsvHeader << "\n" << "group,check,enforced,checked,violations,passed\n";
  for (const CheckEntry& c : r.checks)
    for (const CheckResult& cr : c.report.checks)
      os << c.name << ',' << cr.name << ',' << cr.enforced << ',' << cr.checked << ',' << cr.violations << ','
         << cr.passed() << '\n';
  return os.str();
}

std::string boundary_csv(const std::vector<BoundaryEstimate>& rows) {
  std::ostringstream os;
  os << kCsvHeader << "\n" << "x,k,tau,N,hits,p_hat,wilson_upper_95,bound,pass\n";
  for (const BoundaryEstimate& b : rows)
    os << b.x << ',' << b.k << ',' << fmt(b.tau) << ',' << b.N << ',' << b.hits << ',' << fmt(b.p_hat) << ','
       << fmt(b.wilson_upper) << ',' << fmt(b.bound) << ',' << b.pass << '\n';
  return os.str();
}

std::string timings_csv(const RunReport& r) {
  std::ostringstream os;
  os << kCsvHeader << "\n" << "stage,seconds\n";
  for (const StageTiming& t : r.timings) os << t.stage << ',' << fmt(t.seconds) << '\n';
  return os.str();
}

namespace {

// Numeric metrics of every check, flattened to (group, check, key, value).
std::string constants_csv(const RunReport& r) {
  std::ostringstream os;
  os << kCsvHeader << "\n" << "group,check,key,value\n";
  for (const CheckEntry& c : r.checks) {
    for (auto it = c.constants.begin(); it != c.constants.end(); ++it)
      if (it->is_number()) os << c.name << ",," << it.key() << ',' << fmt(it->get<double>()) << '\n';
    for (const CheckResult& cr : c.report.checks)
      for (auto it = cr.metrics.begin(); it != cr.metrics.end(); ++it)
        if (it->is_number()) os << c.name << ',' << cr.name << ',' << it.key() << ',' << fmt(it->get<double>()) << '\n';
  }
  return os.str();
}

}  // namespace

std::vector<std::string> emit_report(const RunReport& report, ReportFormat format, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir + ": " + ec.message());
  const std::filesystem::path dir(out_dir);
  std::vector<std::string> written;
  auto put = [&](const char* name, const std::string& text) {
    const std::string path = (dir / name).string();
    write_text(path, text);
    written.push_back(path);
  };
  if (format == ReportFormat::Json) {
    put("report.json", to_json(report).dump(2) + "\n");
  } else {
    put("checks.csv", checks_csv(report));
    put("boundary.csv", boundary_csv(report.boundary));
    put("constants.csv", constants_csv(report));
    put("timings.csv", timings_csv(report));
  }
  return written;
}

}  // namespace cubeforge
