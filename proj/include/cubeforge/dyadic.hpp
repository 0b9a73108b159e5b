#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cubeforge/metric_space.hpp"
#include "cubeforge/nets.hpp"
#include "cubeforge/report.hpp"

namespace cubeforge {

using LevelPoints = std::vector<std::vector<PointId>>;

struct ParentLink {
  std::uint32_t parent = 0;
  bool tight = false;

  bool operator==(const ParentLink&) const = default;
};

/// links[i][beta] is the parent (index into level k_min+i) of child beta at
/// level k_min+i+1.
struct ParentMaps {
  int k_min = 0;
  std::vector<std::vector<ParentLink>> links;
  /// Exploratory-mode repairs: children with no parent within C_0 delta^k or
  /// with two tight candidates. Always empty in strict mode (those throw).
  std::size_t repaired = 0;

  /// children(k)[alpha] lists the children at level k+1, ascending.
  std::vector<std::vector<std::uint32_t>> children(int k) const;
  std::uint32_t parent(int child_level, std::uint32_t beta) const {
    return links.at(static_cast<std::size_t>(child_level - 1 - k_min)).at(beta).parent;
  }

  bool operator==(const ParentMaps&) const = default;
};

struct CubeConstants {
  double c0 = 1.0;
  double C0 = 1.0;
  double c1 = 1.0;
  double C1 = 1.0;

  /// c_1 = (3A_0^2)^{-1} c_0, C_1 = 2 A_0 C_0.
  static CubeConstants from(double c0, double C0, double a0) noexcept;
  bool operator==(const CubeConstants&) const = default;
};

/// 12 A_0^3 C_0 delta <= c_0, with rounding slack.
bool satisfies_order_constraint(double a0, double delta, double c0, double C0) noexcept;

/// Parents of every level-(k+1) center among the level-k centers: the unique
/// point within (2A_0)^{-1} c_0 delta^k if there is one, else the smallest
/// index within C_0 delta^k.
ParentMaps build_partial_order(const QuasiMetricSpace& space, const LevelPoints& levels, int k_min, double delta,
                               double a0, double c0, double C0, Mode mode);

struct Cube {
  PointId center = 0;
  std::vector<PointId> members;

  bool operator==(const Cube&) const = default;
};

struct CubeLevel {
  int k = 0;
  std::vector<Cube> cubes;
  /// cube_of[x] is the index of the cube containing point x.
  std::vector<std::uint32_t> cube_of;

  bool operator==(const CubeLevel&) const = default;
};

struct CubeSystem {
  double delta = 0.5;
  double a0 = 1.0;
  Mode mode = Mode::Exploratory;
  CubeConstants constants;
  int k_min = 0;
  std::vector<CubeLevel> levels;
  ParentMaps parents;

  int k_max() const noexcept { return k_min + static_cast<int>(levels.size()) - 1; }
  const CubeLevel& level(int k) const { return levels.at(static_cast<std::size_t>(k - k_min)); }
  double scale(int k) const noexcept { return cubeforge::scale(delta, k); }
  const Cube& cube_containing(PointId x, int k) const {
    const CubeLevel& l = level(k);
    return l.cubes[l.cube_of[x]];
  }

  bool operator==(const CubeSystem&) const = default;
};

/// Cubes as descendant sets of the finest level, which must be a permutation of X.
CubeSystem build_cube_system(const QuasiMetricSpace& space, const LevelPoints& levels, ParentMaps order,
                             double delta, double a0, CubeConstants constants, Mode mode);

/// build_partial_order followed by build_cube_system.
CubeSystem build_dyadic_system(const QuasiMetricSpace& space, const LevelPoints& levels, int k_min, double delta,
                               double a0, double c0, double C0, Mode mode);

/// The system over the reference nets themselves, c_0 = C_0 = 1.
CubeSystem build_reference_system(const QuasiMetricSpace& space, const NetHierarchy& nets);

/// Nesting, partition, ball sandwich, containing-ball nesting and center
/// distances, checked from the member lists. Ball checks are enforced only in
/// strict mode.
VerificationReport verify_cube_axioms(const QuasiMetricSpace& space, const CubeSystem& system);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// min over y outside the cube of rho(x, y); +inf when the cube is X.
double distance_to_complement(const QuasiMetricSpace& space, const CubeLevel& level, std::uint32_t cube, PointId x);

/// {x in cube : rho(x, complement) <= eps}, ascending ids.
std::vector<PointId> boundary_zone(const QuasiMetricSpace& space, const CubeSystem& system, int k,
                                   std::uint32_t cube, double eps);

Json to_json(const CubeSystem& system);
CubeSystem cube_system_from_json(const Json& j);

}  // namespace cubeforge
