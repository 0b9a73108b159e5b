// Command-line driver: one subcommand per pipeline stage plus `run`.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cubeforge/adjacent.hpp"
#include "cubeforge/dyadic.hpp"
#include "cubeforge/error.hpp"
#include "cubeforge/labeling.hpp"
#include "cubeforge/pipeline.hpp"
#include "cubeforge/random_systems.hpp"

namespace cf = cubeforge;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "cubeforge_out";
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "override the config seed");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
}

cf::PipelineConfig load(const Common& c) {
  cf::PipelineConfig cfg = cf::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

void write_json(const std::string& dir, const char* name, const cf::Json& j) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  cf::write_text(path, j.dump() + "\n");
  std::cout << path << "\n";
}

// Runs the pipeline restricted to `checks` (or the config's own list) and reports.
int run_checks(const Common& c, std::optional<std::vector<std::string>> checks) {
  cf::PipelineConfig cfg = load(c);
  if (checks) cfg.checks = *checks;
  const cf::RunReport report = cf::run_pipeline(cfg, c.out);
  for (const std::string& p : cf::emit_report(report, cf::report_format_from_string(c.format), c.out))
    std::cout << p << "\n";
  for (const cf::CheckEntry& e : report.checks) std::cout << (e.passed ? "[PASS] " : "[FAIL] ") << e.name << "\n";
  if (report.passed()) return 0;
  std::cerr << cf::failure_summary(report).dump() << "\n";
  return 1;
}

int gen_space(const Common& c) {
  const cf::PipelineConfig cfg = load(c);
  write_json(c.out, "space.json", cf::to_json(cf::generate_space(cfg.space)));
  return 0;
}

int sample(const Common& c, int t) {
  const cf::PipelineConfig cfg = load(c);
  const cf::QuasiMetricSpace space = cf::generate_space(cfg.space);
  const cf::LabeledHierarchy lab =
      cf::build_labels(space, cf::build_reference_hierarchy(space, cfg.delta, cfg.mode, cfg.distinguished));
  const cf::OmegaSampler sampler(space, lab, cfg.mc.variant);
  const cf::CubeSystem sys = cf::sample_cube_system(sampler, cfg.seed, t);
  cf::Json j = cf::to_json(sys);
  j["sampler"] = sampler.describe(cfg.seed);
  write_json(c.out, "sampled_system.json", j);
  const cf::VerificationReport rep = cf::verify_cube_axioms(space, sys);
  std::cout << (rep.passed() ? "[PASS] " : "[FAIL] ") << "sampled system cube axioms\n";
  if (rep.passed()) return 0;
  std::cerr << cf::Json(rep).dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic cube systems on finite quasi-metric spaces"};
  app.require_subcommand(1);
  Common c;
  int t = 1;

  CLI::App* gen = app.add_subcommand("gen-space", "generate the space and write space.json");
  CLI::App* nets = app.add_subcommand("build-nets", "build reference nets and check their axioms");
  CLI::App* sys = app.add_subcommand("build-system", "build reference and labeled systems and check cube axioms");
  CLI::App* adj = app.add_subcommand("build-adjacent", "build the adjacent family and check covering");
  CLI::App* smp = app.add_subcommand("sample", "sample one random system from --seed");
  CLI::App* ver = app.add_subcommand("verify", "all deterministic checks plus chain separation");
  CLI::App* mc = app.add_subcommand("mc-boundary", "Monte Carlo boundary decay and selection marginals");
  CLI::App* ana = app.add_subcommand("analyze", "maximal function, A_p and BMO checks");
  CLI::App* run = app.add_subcommand("run", "full pipeline with the checks listed in the config");
  for (CLI::App* cmd : {gen, nets, sys, adj, smp, ver, mc, ana, run}) add_common(cmd, c);
  smp->add_option("--system", t, "adjacent system index t for adjacent samplers")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    using V = std::vector<std::string>;
    if (gen->parsed()) return gen_space(c);
    if (nets->parsed()) return run_checks(c, V{"net"});
    if (sys->parsed()) return run_checks(c, V{"cubes"});
    if (adj->parsed()) return run_checks(c, V{"covering"});
    if (smp->parsed()) return sample(c, t);
    if (ver->parsed()) return run_checks(c, V{"net", "cubes", "covering", "chain"});
    if (mc->parsed()) return run_checks(c, V{"mc_boundary"});
    if (ana->parsed()) return run_checks(c, V{"analysis"});
    if (run->parsed()) return run_checks(c, std::nullopt);
  } catch (const cf::Error& e) {
    std::cerr << cf::Json{{"error", cf::to_string(e.kind())}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << cf::Json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 2;
}
