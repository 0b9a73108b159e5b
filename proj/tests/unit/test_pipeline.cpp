#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cubeforge/error.hpp"
#include "cubeforge/pipeline.hpp"

using namespace cubeforge;

namespace {

Json small_config() {
  return Json{{"space", {{"type", "geometric_line"}, {"levels", 2}, {"delta", 1.0 / 144}}},
              {"delta", "1/144"},
              {"mode", "strict"},
              {"seed", 7},
              {"checks", {"net", "cubes", "covering", "mc_boundary", "chain", "analysis"}},
              {"mc", {{"N", 500}, {"tau_list", {0.1, 0.01, 0.001}}, {"points", {0}}, {"chain_samples", 5}}},
              {"analysis", {{"p_list", {2.0}}, {"n_random_functions", 2}}}};
}

std::string config_error_of(const Json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  return {};
}

// Messages read "ConfigError: <field path>: ...".
bool starts_with(const std::string& s, const std::string& p) { return s.rfind("ConfigError: " + p, 0) == 0; }

Json strip_timings(Json j) {
  for (auto& t : j["timings"]) t["seconds"] = 0.0;
  return j;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) n += !l.empty();
  return n;
}

}  // namespace

TEST_CASE("delta parsing") {
  CHECK(parse_delta("1/144") == doctest::Approx(1.0 / 144));
  CHECK(parse_delta(Json(0.25)) == 0.25);
  CHECK(parse_delta("0.5") == 0.5);
  CHECK_THROWS_AS(parse_delta("1/x"), Error);
  CHECK_THROWS_AS(parse_delta(Json(1.5)), Error);
  CHECK_THROWS_AS(parse_delta(Json::array()), Error);
}

TEST_CASE("config errors name the offending field") {
  CHECK(config_error_of(small_config()).empty());
  Json j = small_config();
  j["mode"] = "sloppy";
  CHECK(starts_with(config_error_of(j), "mode:"));
  j = small_config();
  j["mc"]["N"] = "many";
  CHECK(starts_with(config_error_of(j), "mc.N:"));
  j = small_config();
  j["analysis"]["p_list"] = {2.0, 1.0};
  CHECK(starts_with(config_error_of(j), "analysis.p_list[1]:"));
  j = small_config();
  j["checks"] = {"net", "bogus"};
  CHECK(starts_with(config_error_of(j), "checks[1]:"));
  j = small_config();
  j["extra"] = 1;
  CHECK_FALSE(config_error_of(j).empty());
  j = small_config();
  j["delta"] = 0.1;
  CHECK(starts_with(config_error_of(j), "delta:"));
  j = small_config();
  j.erase("space");
  CHECK(starts_with(config_error_of(j), "space:"));
}

TEST_CASE("config json round trip") {
  const PipelineConfig c = parse_config(small_config());
  CHECK(parse_config(to_json(c)) == c);
  CHECK(c.delta == doctest::Approx(1.0 / 144));
  CHECK(c.mc.N == 500);
}

TEST_CASE("no checks runs only the build stages") {
  Json j = small_config();
  j["checks"] = Json::array();
  const RunReport r = run_pipeline(parse_config(j));
  CHECK(r.checks.empty());
  CHECK(r.boundary.empty());
  CHECK(r.passed());
  CHECK_FALSE(r.timings.empty());
}

TEST_CASE("pipeline is deterministic and round trips") {
  const PipelineConfig c = parse_config(small_config());
  const RunReport a = run_pipeline(c);
  const RunReport b = run_pipeline(c);
  CHECK(a.passed());
  CHECK(a.checks.size() == known_checks().size());
  CHECK(strip_timings(to_json(a)) == strip_timings(to_json(b)));
  CHECK(run_report_from_json(Json::parse(to_json(a).dump())) == a);
  CHECK(failure_summary(a)["failed"].empty());
}

TEST_CASE("csv output") {
  const RunReport r = run_pipeline(parse_config(small_config()));
  CHECK(first_line(checks_csv(r)) == kCsvHeader);
  CHECK(first_line(timings_csv(r)) == kCsvHeader);
  const std::string b = boundary_csv(r.boundary);
  CHECK(first_line(b) == kCsvHeader);
  // Version line, column header, one row per tau.
  CHECK(line_count(b) == 2 + r.boundary.size());
  CHECK(r.boundary.size() % 3 == 0);

  std::vector<BoundaryEstimate> three(r.boundary.begin(), r.boundary.begin() + 3);
  CHECK(line_count(boundary_csv(three)) == 5);

  const auto dir = std::filesystem::temp_directory_path() / "cubeforge_csv_test";
  std::filesystem::remove_all(dir);
  const auto files = emit_report(r, ReportFormat::Csv, dir.string());
  CHECK(files.size() == 4);
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string l;
    std::getline(in, l);
    CHECK(l == kCsvHeader);
  }
  std::filesystem::remove_all(dir);
  CHECK(report_format_from_string("json") == ReportFormat::Json);
  CHECK_THROWS_AS(report_format_from_string("xml"), Error);
}

TEST_CASE("pipeline writes artifacts") {
  const auto dir = std::filesystem::temp_directory_path() / "cubeforge_artifact_test";
  std::filesystem::remove_all(dir);
  Json j = small_config();
  j["checks"] = {"net"};
  const RunReport r = run_pipeline(parse_config(j), dir.string());
  CHECK_FALSE(r.artifacts.empty());
  for (const auto& a : r.artifacts) CHECK(std::filesystem::exists(a));
  std::filesystem::remove_all(dir);
}
