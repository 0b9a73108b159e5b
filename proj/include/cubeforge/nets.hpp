#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubeforge/metric_space.hpp"
#include "cubeforge/report.hpp"

namespace cubeforge {

/// Strict: delta satisfies the strongest constant constraint of the theory and
/// every guaranteed property is asserted. Exploratory: any delta in (0,1);
/// those properties are reported only.
enum class Mode { Strict, Exploratory };

const char* to_string(Mode mode) noexcept;
Mode mode_from_string(const std::string& s);

/// delta^k for integer k (k may be negative).
double scale(double delta, int k) noexcept;

/// 144 A_0^8 delta <= 1, the constraint strict mode enforces at net construction.
bool satisfies_strict_constraint(double a0, double delta) noexcept;

/// Per-level maximal delta^k-separated point sets over the finite window
/// [k_min, k_max]. Coarser levels repeat the k_min singleton and finer levels
/// repeat the k_max net (all of X), so the window loses nothing.
struct NetHierarchy {
  double delta = 0.5;
  int k_min = 0;
  int k_max = 0;
  Mode mode = Mode::Exploratory;
  std::optional<PointId> distinguished;
  std::vector<std::vector<PointId>> levels;

  std::size_t level_count() const noexcept { return levels.size(); }
  const std::vector<PointId>& at(int k) const { return levels.at(static_cast<std::size_t>(k - k_min)); }
  double scale(int k) const noexcept { return cubeforge::scale(delta, k); }
};

/// Greedy nets, inserting the distinguished point (if any) first and then
/// ascending ids; a point is accepted iff it is at distance >= delta^k from
/// every accepted point.
NetHierarchy build_reference_hierarchy(const QuasiMetricSpace& space, double delta, Mode mode,
                                       std::optional<PointId> distinguished = std::nullopt);

/// Separation >= delta^k and covering < delta^k on every level, exhaustively.
VerificationReport verify_net_axioms(const QuasiMetricSpace& space, const NetHierarchy& nets);

Json to_json(const NetHierarchy& nets);
NetHierarchy nets_from_json(const Json& j);

}  // namespace cubeforge
