#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace cubeforge {

using PointId = std::uint32_t;
using Json = nlohmann::json;

inline constexpr std::size_t kDefaultTableCap = 2048;
inline constexpr std::size_t kExhaustiveTripleCap = 512;
inline constexpr std::size_t kSampledTriples = 1'000'000;

/// Summary constants of a finite quasi-metric space.
struct SpaceProfile {
  /// Quasi-triangle constant used by all downstream constructions. Equals the
  /// generator's analytic constant when one is declared, else `a0_measured`.
  double a0 = 1.0;
  double a0_measured = 1.0;
  std::optional<double> a0_declared;
  bool a0_exhaustive = true;
  std::optional<int> a1;
  double diam = 0.0;
  std::optional<double> min_gap;

  double log2_a1() const;
};

/// Finite set {0, ..., n-1} with a symmetric positive distance.
///
/// Distances come either from a dense row-major table or from stored
/// coordinates via rho(x, y) = |x - y|_2^exponent. Coordinate spaces with
/// n <= table_cap are materialized into a table at construction.
class QuasiMetricSpace {
 public:
  static QuasiMetricSpace from_table(std::size_t n, std::vector<double> table, Json generator);
  static QuasiMetricSpace from_coords(std::size_t dim, std::vector<double> coords, double exponent,
                                      Json generator, std::size_t table_cap = kDefaultTableCap);

  std::size_t size() const noexcept { return n_; }
  double distance(PointId a, PointId b) const noexcept {
    if (!table_.empty()) return table_[static_cast<std::size_t>(a) * n_ + b];
    return oracle(a, b);
  }

  bool has_table() const noexcept { return !table_.empty(); }
  bool has_coords() const noexcept { return dim_ > 0; }
  std::size_t dim() const noexcept { return dim_; }
  double exponent() const noexcept { return exponent_; }
  std::span<const double> coords() const noexcept { return coords_; }
  std::span<const double> point(PointId p) const noexcept {
    return std::span<const double>(coords_).subspan(static_cast<std::size_t>(p) * dim_, dim_);
  }

  const Json& generator() const noexcept { return generator_; }
  const SpaceProfile& profile() const noexcept { return profile_; }
  void set_profile(SpaceProfile profile) { profile_ = std::move(profile); }

 private:
  double oracle(PointId a, PointId b) const noexcept;

  std::size_t n_ = 0;
  std::vector<double> table_;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  double exponent_ = 1.0;
  Json generator_;
  SpaceProfile profile_;
};

struct ValidateOptions {
  std::size_t exhaustive_cap = kExhaustiveTripleCap;
  std::size_t sampled_triples = kSampledTriples;
  std::uint64_t sample_seed = 0x5eed;
};

using DistanceFn = std::function<double(PointId, PointId)>;

/// Checks positivity and symmetry on every pair and returns the smallest
/// quasi-triangle constant: exact triple scan up to `exhaustive_cap` points,
/// random triples above it.
SpaceProfile validate_quasi_metric(std::size_t n, const DistanceFn& distance,
                                   const ValidateOptions& options = {});
SpaceProfile validate_quasi_metric(const QuasiMetricSpace& space,
                                   const ValidateOptions& options = {});

/// {y : rho(y, center) < r}, ascending ids.
std::vector<PointId> ball(const QuasiMetricSpace& space, PointId center, double r);

/// Upper estimate of the geometric doubling constant from greedy covers of
/// every realized ball B(x, r) by balls of radius r/2.
int doubling_estimate(const QuasiMetricSpace& space);

/// Greedy cover count of B(x, r) by balls B(c, r/2), c in B(x, r), taken in id order.
int greedy_half_cover(const QuasiMetricSpace& space, PointId x, double r);

/// Sorted distinct pairwise distances followed by one value above the diameter.
std::vector<double> realized_radii(const QuasiMetricSpace& space);

/// Every distinct ball of a finite space, as prefixes of per-center distance orders.
class BallIndex {
 public:
  explicit BallIndex(const QuasiMetricSpace& space);

  std::size_t size() const noexcept { return n_; }
  /// Points sorted by distance from `center` (ties by id); `center` first.
  std::span<const PointId> order(PointId center) const noexcept {
    return {order_.data() + static_cast<std::size_t>(center) * n_, n_};
  }
  std::span<const double> distances(PointId center) const noexcept {
    return {dist_.data() + static_cast<std::size_t>(center) * n_, n_};
  }
  /// Sizes of the distinct balls around `center`, ascending; the last equals n.
  std::span<const std::size_t> ball_sizes(PointId center) const noexcept {
    return {sizes_.data() + offsets_[center], offsets_[center + 1] - offsets_[center]};
  }
  /// Size of B(center, r) with strict inequality.
  std::size_t ball_size(PointId center, double r) const noexcept;

 private:
  std::size_t n_;
  std::vector<PointId> order_;
  std::vector<double> dist_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
};

struct GenerateOptions {
  std::size_t table_cap = kDefaultTableCap;
  /// Estimate A_1 when n does not exceed this bound.
  std::size_t doubling_cap = 256;
  ValidateOptions validate;
};

/// Builds a space from a generator descriptor:
///   {"type":"euclidean_cloud","n":..,"dim":..,"box":..,"seed":..}
///   {"type":"power_snowflake","base":{...},"exponent":s}
///   {"type":"geometric_line","levels":..,"delta":..,"digits":3}
///   {"type":"line","points":[...]}
///   {"type":"table","n":..,"distances":[row-major]}
QuasiMetricSpace generate_space(const Json& descriptor, const GenerateOptions& options = {});

Json to_json(const QuasiMetricSpace& space);
QuasiMetricSpace space_from_json(const Json& j);

}  // namespace cubeforge
