#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cubeforge/dyadic.hpp"
#include "cubeforge/nets.hpp"
#include "cubeforge/report.hpp"

namespace cubeforge {

struct DuplexLabel {
  int primary = 0;
  int ordinal = 1;

  bool operator==(const DuplexLabel&) const = default;
};

/// Labels of one selection level k (k_min <= k < k_max). Child indices refer
/// to the reference points of level k+1.
struct LevelLabels {
  int k = 0;
  std::vector<std::vector<std::uint32_t>> children;
  /// parent[beta] for every level-(k+1) point.
  std::vector<std::uint32_t> parent;
  /// ordinal[beta] in {1..#children(parent)}, ascending child index.
  std::vector<int> ordinal;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> conflicts;
  std::vector<std::vector<std::uint32_t>> neighbours;
  std::vector<int> primary;
  std::vector<std::uint32_t> near_child;
  /// Children within delta^{k+1} of their parent, ascending.
  std::vector<std::vector<std::uint32_t>> near_children;

  DuplexLabel duplex(std::uint32_t beta) const { return {primary[parent[beta]], ordinal[beta]}; }
};

struct LabeledHierarchy {
  NetHierarchy nets;
  ParentMaps reference_order;
  double a0 = 1.0;
  int L = 0;
  int M = 1;
  std::vector<LevelLabels> levels;
  /// Exploratory mode only: parents without a child within delta^{k+1}.
  std::size_t near_fallbacks = 0;

  int K() const noexcept { return (L + 1) * M; }
  int k_min() const noexcept { return nets.k_min; }
  int k_max() const noexcept { return nets.k_max; }
  double delta() const noexcept { return nets.delta; }
  Mode mode() const noexcept { return nets.mode; }
  /// c_0 = (4A_0^2)^{-1} for conflicts and new-point systems.
  double c0() const noexcept { return 1.0 / (4.0 * a0 * a0); }
  /// C_0 = 2A_0 for new-point systems.
  double C0() const noexcept { return 2.0 * a0; }
  const LevelLabels& at(int k) const { return levels.at(static_cast<std::size_t>(k - nets.k_min)); }

  /// Lexicographic bijection (l, m) -> t in {1..K}.
  int phi(DuplexLabel d) const noexcept { return d.primary * M + d.ordinal; }
  DuplexLabel phi_inv(int t) const noexcept { return {(t - 1) / M, (t - 1) % M + 1}; }
};

/// 96 A_0^8 delta <= 1, with rounding slack.
bool satisfies_label_constraint(double a0, double delta) noexcept;

/// Conflicts, neighbours, greedy primary labels and duplex labels over the
/// reference order (c_0 = C_0 = 1).
LabeledHierarchy build_labels(const QuasiMetricSpace& space, NetHierarchy nets);

/// Equal primary labels are never neighbours, siblings carry distinct
/// ordinals, equally labeled parents have no conflicting children, and every
/// parent has a near child.
VerificationReport verify_labels(const QuasiMetricSpace& space, const LabeledHierarchy& labeled);

using Chooser = std::function<std::uint32_t(int k, std::uint32_t alpha, const std::vector<std::uint32_t>& children)>;

struct SelectionRule {
  enum class Kind { General, Specific, SpecificDistinguished };

  Kind kind = Kind::Specific;
  /// General: master label per selection level, indexed by k - k_min.
  std::vector<int> master;
  Chooser chooser;
  DuplexLabel label;
  PointId x0 = 0;

  static SelectionRule general(std::vector<int> master, Chooser chooser);
  static SelectionRule specific(DuplexLabel label);
  static SelectionRule specific_distinguished(DuplexLabel label, PointId x0);
  std::string describe() const;
};

struct SelectionOutcome {
  std::string rule;
  int k_min = 0;
  /// chosen[k - k_min][alpha]: child index at level k+1, for k < k_max.
  std::vector<std::vector<std::uint32_t>> chosen;
  /// centers[k - k_min][alpha] = z_alpha^k for k in [k_min, k_max]; the finest level is X.
  LevelPoints centers;

  bool operator==(const SelectionOutcome&) const = default;
};

/// The specific rule at one level: the child labeled (l, m) if present, else the near child.
std::uint32_t specific_choice(const LevelLabels& level, std::uint32_t alpha, DuplexLabel label);

/// Turns per-level child choices into new center lists.
LevelPoints centers_from_choices(const LabeledHierarchy& labeled, const std::vector<std::vector<std::uint32_t>>& chosen);

SelectionOutcome select_points(const LabeledHierarchy& labeled, const SelectionRule& rule);

/// Separation >= (4A_0^2)^{-1} delta^k and covering < 2A_0 delta^k at every level.
VerificationReport verify_new_point_axioms(const QuasiMetricSpace& space, const SelectionOutcome& outcome, double a0,
                                           double delta, Mode mode);

/// Cube system over new centers with c_0 = (4A_0^2)^{-1}, C_0 = 2A_0.
CubeSystem build_new_point_system(const QuasiMetricSpace& space, const LabeledHierarchy& labeled,
                                  const LevelPoints& centers);

Json to_json(const LabeledHierarchy& labeled);

}  // namespace cubeforge
