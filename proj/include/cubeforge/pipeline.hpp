#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cubeforge/analysis.hpp"
#include "cubeforge/metric_space.hpp"
#include "cubeforge/nets.hpp"
#include "cubeforge/random_systems.hpp"
#include "cubeforge/report.hpp"

namespace cubeforge {

inline constexpr const char* kCsvHeader = "# cubeforge-report v1";

struct McConfig {
  std::size_t N = 10000;
  std::vector<double> tau_list{0.1, 0.01, 0.001};
  /// Points swept for boundary decay; empty means every point.
  std::vector<PointId> points;
  /// Levels swept; empty means every level of the window.
  std::vector<int> levels;
  SamplerVariant variant = SamplerVariant::Single;
  /// Systems sampled for the chain-separation check.
  std::size_t chain_samples = 100;

  bool operator==(const McConfig&) const = default;
};

struct AnalysisConfig {
  std::vector<double> p_list{1.5, 2.0, 3.0};
  std::size_t n_random_functions = 20;
  MeanConvention mean = MeanConvention::Signed;

  bool operator==(const AnalysisConfig&) const = default;
};

struct PipelineConfig {
  Json space;
  double delta = 0.5;
  /// As written in the file ("1/144" or a number), echoed in the report.
  Json delta_spec;
  Mode mode = Mode::Strict;
  std::optional<PointId> distinguished;
  std::uint64_t seed = 0;
  std::vector<std::string> checks;
  McConfig mc;
  AnalysisConfig analysis;

  bool operator==(const PipelineConfig&) const = default;
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> all{"net", "cubes", "covering", "mc_boundary", "chain", "analysis"};
  return all;
}

/// Parses and validates a config; ConfigError messages start with the field path.
PipelineConfig parse_config(const Json& j);
PipelineConfig load_config(const std::string& path);
Json to_json(const PipelineConfig& c);
/// "1/144", "0.25" or a JSON number.
double parse_delta(const Json& j);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;

  bool operator==(const StageTiming&) const = default;
};

struct CheckEntry {
  std::string name;
  bool passed = true;
  VerificationReport report;
  /// Empirical versus theoretical constants and other summary numbers.
  Json constants = Json::object();

  bool operator==(const CheckEntry&) const = default;
};

struct RunReport {
  Json config = Json::object();
  Json space_profile = Json::object();
  std::vector<CheckEntry> checks;
  std::vector<BoundaryEstimate> boundary;
  std::vector<StageTiming> timings;
  std::vector<std::string> artifacts;

  bool passed() const noexcept {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  bool operator==(const RunReport&) const = default;
};

Json to_json(const RunReport& r);
RunReport run_report_from_json(const Json& j);
/// Failing checks with their first witnesses.
Json failure_summary(const RunReport& r);

/// Builds, verifies and estimates in dependency order. Check failures are
/// recorded, not thrown. With a non-empty `out_dir` the serialized space, nets,
/// systems and report are written there.
RunReport run_pipeline(const PipelineConfig& config, const std::string& out_dir = {});

enum class ReportFormat { Json, Csv };
ReportFormat report_format_from_string(const std::string& s);

/// json: report.json. csv: checks.csv, boundary.csv, constants.csv, timings.csv. Returns the paths written.
std::vector<std::string> emit_report(const RunReport& report, ReportFormat format, const std::string& out_dir);

/// Flat CSV tables, each starting with the version header line.
std::string checks_csv(const RunReport& r);
std::string boundary_csv(const std::vector<BoundaryEstimate>& rows);
std::string timings_csv(const RunReport& r);

void write_text(const std::string& path, const std::string& text);

}  // namespace cubeforge
