#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cubeforge/dyadic.hpp"
#include "cubeforge/labeling.hpp"

namespace cubeforge {

struct AdjacentFamily {
  int K = 1;
  int L = 0;
  int M = 1;
  std::optional<PointId> distinguished;
  /// 8 A_0^3 delta^{-2}, or 8 A_0^3 delta^{-3} with a distinguished point.
  double C = 1.0;
  std::vector<SelectionOutcome> selections;
  std::vector<CubeSystem> systems;
  /// center_owner[k - k_min][beta]: some t with tz_{parent(beta)}^k = x_beta^{k+1}, 0 if none (k < k_max).
  std::vector<std::vector<int>> center_owner;

  const CubeSystem& system(int t) const { return systems.at(static_cast<std::size_t>(t - 1)); }
};

double covering_constant(double a0, double delta, bool distinguished) noexcept;

/// One system per duplex label t = phi(l, m) via the specific rule (with x0 if given).
AdjacentFamily build_adjacent_family(const QuasiMetricSpace& space, const LabeledHierarchy& labeled,
                                     std::optional<PointId> distinguished = std::nullopt);

/// Builds the systems for given per-t selections and indexes which t realizes each center.
AdjacentFamily assemble_family(const QuasiMetricSpace& space, const LabeledHierarchy& labeled,
                               std::vector<SelectionOutcome> selections, std::optional<PointId> distinguished);

struct ContainingCube {
  int t = 1;
  int k = 0;
  std::uint32_t cube = 0;
  /// Radius above the window: the coarsest cube, which is X.
  bool clamped_top = false;
  /// Radius below the finest scale: the singleton cube of x.
  bool underflow = false;
};

/// Generation-k cube (k-1 in the distinguished case) for delta^{k+2} < r <= delta^{k+1}.
ContainingCube find_containing_cube(const QuasiMetricSpace& space, const LabeledHierarchy& labeled,
                                    const AdjacentFamily& family, PointId x, double r);

/// Exhaustive ball-in-cube covering over every center and every realized
/// radius, plus center coverage, locality and distinguished centering.
VerificationReport verify_covering(const QuasiMetricSpace& space, const LabeledHierarchy& labeled,
                                   const AdjacentFamily& family);

Json to_json(const AdjacentFamily& family, const LabeledHierarchy& labeled);

}  // namespace cubeforge
