#include "cubeforge/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cubeforge/error.hpp"
#include "cubeforge/rng.hpp"

namespace cubeforge {

double SpaceProfile::log2_a1() const { return a1 ? std::log2(static_cast<double>(*a1)) : 0.0; }

QuasiMetricSpace QuasiMetricSpace::from_table(std::size_t n, std::vector<double> table, Json generator) {
  if (n == 0) throw Error(ErrorKind::BadSpec, "space must contain at least one point");
  if (table.size() != n * n) throw Error(ErrorKind::BadSpec, "distance table must have n*n entries");
  QuasiMetricSpace s;
  s.n_ = n;
  s.table_ = std::move(table);
  s.generator_ = std::move(generator);
  return s;
}

QuasiMetricSpace QuasiMetricSpace::from_coords(std::size_t dim, std::vector<double> coords, double exponent,
                                               Json generator, std::size_t table_cap) {
  if (dim == 0 || coords.empty() || coords.size() % dim != 0)
    throw Error(ErrorKind::BadSpec, "coordinates must be a non-empty multiple of dim");
  if (!(exponent > 0.0)) throw Error(ErrorKind::BadSpec, "exponent must be positive");
  QuasiMetricSpace s;
  s.n_ = coords.size() / dim;
  s.dim_ = dim;
  s.coords_ = std::move(coords);
  s.exponent_ = exponent;
  s.generator_ = std::move(generator);
  if (s.n_ <= table_cap) {
    s.table_.resize(s.n_ * s.n_);
    for (std::size_t a = 0; a < s.n_; ++a)
      for (std::size_t b = 0; b < s.n_; ++b)
        s.table_[a * s.n_ + b] = s.oracle(static_cast<PointId>(a), static_cast<PointId>(b));
  }
  return s;
}

double QuasiMetricSpace::oracle(PointId a, PointId b) const noexcept {
  if (a == b) return 0.0;
  const double* pa = coords_.data() + static_cast<std::size_t>(a) * dim_;
  const double* pb = coords_.data() + static_cast<std::size_t>(b) * dim_;
  double sq = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double d = pa[i] - pb[i];
    sq += d * d;
  }
  const double e = std::sqrt(sq);
  return exponent_ == 1.0 ? e : std::pow(e, exponent_);
}

namespace {

std::string pair_text(PointId x, PointId y) {
  std::ostringstream os;
  os << "(" << x << ", " << y << ")";
  return os.str();
}

double triple_ratio(const DistanceFn& d, PointId x, PointId y, PointId z) {
  const double denom = d(x, z) + d(z, y);
  return d(x, y) / denom;
}

}  // namespace

SpaceProfile validate_quasi_metric(std::size_t n, const DistanceFn& distance, const ValidateOptions& options) {
  if (n == 0) throw Error(ErrorKind::BadSpec, "space must contain at least one point");
  SpaceProfile profile;
  double diam = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  for (PointId x = 0; x < n; ++x) {
    if (distance(x, x) != 0.0) throw Error(ErrorKind::ZeroDistance, "rho(x, x) must vanish at " + pair_text(x, x));
    for (PointId y = x + 1; y < n; ++y) {
      const double dxy = distance(x, y);
      if (dxy < 0.0 || std::isnan(dxy)) throw Error(ErrorKind::NegativeDistance, pair_text(x, y));
      if (dxy == 0.0) throw Error(ErrorKind::ZeroDistance, pair_text(x, y));
      if (distance(y, x) != dxy) throw Error(ErrorKind::SymmetryViolation, pair_text(x, y));
      diam = std::max(diam, dxy);
      gap = std::min(gap, dxy);
    }
  }
  profile.diam = diam;
  if (n >= 2) profile.min_gap = gap;

  double a0 = 1.0;
  if (n <= options.exhaustive_cap) {
    for (PointId x = 0; x < n; ++x)
      for (PointId y = x + 1; y < n; ++y)
        for (PointId z = 0; z < n; ++z) {
          if (z == x || z == y) continue;
          a0 = std::max(a0, triple_ratio(distance, x, y, z));
        }
    profile.a0_exhaustive = true;
  } else {
    RandomStream rng(options.sample_seed);
    for (std::size_t i = 0; i < options.sampled_triples; ++i) {
      const auto x = static_cast<PointId>(rng.below(n));
      const auto y = static_cast<PointId>(rng.below(n));
      const auto z = static_cast<PointId>(rng.below(n));
      if (x == y || z == x || z == y) continue;
      a0 = std::max(a0, triple_ratio(distance, x, y, z));
    }
    profile.a0_exhaustive = false;
  }
  profile.a0_measured = a0;
  profile.a0 = a0;
  return profile;
}

SpaceProfile validate_quasi_metric(const QuasiMetricSpace& space, const ValidateOptions& options) {
  return validate_quasi_metric(
      space.size(), [&space](PointId a, PointId b) { return space.distance(a, b); }, options);
}

std::vector<PointId> ball(const QuasiMetricSpace& space, PointId center, double r) {
  std::vector<PointId> out;
  for (PointId y = 0; y < space.size(); ++y)
    if (space.distance(y, center) < r) out.push_back(y);
  return out;
}

int greedy_half_cover(const QuasiMetricSpace& space, PointId x, double r) {
  const std::vector<PointId> members = ball(space, x, r);
  std::vector<char> covered(members.size(), 0);
  int count = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (covered[i]) continue;
    ++count;
    for (std::size_t j = i; j < members.size(); ++j)
      if (!covered[j] && space.distance(members[i], members[j]) < r / 2) covered[j] = 1;
  }
  return count;
}

int doubling_estimate(const QuasiMetricSpace& space) {
  const std::size_t n = space.size();
  int best = 1;
  std::vector<double> radii;
  for (PointId x = 0; x < n; ++x) {
    radii.clear();
    for (PointId y = 0; y < n; ++y)
      if (y != x) radii.push_back(space.distance(x, y));
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    for (double r : radii) best = std::max(best, greedy_half_cover(space, x, r));
    if (!radii.empty()) best = std::max(best, greedy_half_cover(space, x, 2 * radii.back()));
  }
  return best;
}

std::vector<double> realized_radii(const QuasiMetricSpace& space) {
  std::vector<double> radii;
  const std::size_t n = space.size();
  radii.reserve(n * (n - 1) / 2 + 1);
  for (PointId x = 0; x < n; ++x)
    for (PointId y = x + 1; y < n; ++y) radii.push_back(space.distance(x, y));
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  const double top = radii.empty() ? 1.0 : 2.0 * radii.back();
  radii.push_back(top);
  return radii;
}

BallIndex::BallIndex(const QuasiMetricSpace& space) : n_(space.size()) {
  order_.resize(n_ * n_);
  dist_.resize(n_ * n_);
  offsets_.assign(n_ + 1, 0);
  for (PointId c = 0; c < n_; ++c) {
    PointId* ord = order_.data() + static_cast<std::size_t>(c) * n_;
    std::iota(ord, ord + n_, PointId{0});
    std::stable_sort(ord, ord + n_, [&](PointId a, PointId b) {
      return space.distance(c, a) < space.distance(c, b);
    });
    double* ds = dist_.data() + static_cast<std::size_t>(c) * n_;
    for (std::size_t i = 0; i < n_; ++i) ds[i] = space.distance(c, ord[i]);
    for (std::size_t i = 0; i < n_; ++i)
      if (i + 1 == n_ || ds[i] < ds[i + 1]) sizes_.push_back(i + 1);
    offsets_[c + 1] = sizes_.size();
  }
}

std::size_t BallIndex::ball_size(PointId center, double r) const noexcept {
  const auto ds = distances(center);
  return static_cast<std::size_t>(std::lower_bound(ds.begin(), ds.end(), r) - ds.begin());
}

namespace {

QuasiMetricSpace generate_raw(const Json& d, const GenerateOptions& options, std::optional<double>& declared_a0) {
  if (!d.is_object() || !d.contains("type")) throw Error(ErrorKind::BadSpec, "generator descriptor needs a type");
  const std::string type = d.at("type").get<std::string>();
  try {
    if (type == "euclidean_cloud") {
      const auto n = d.at("n").get<std::size_t>();
      const auto dim = d.value("dim", std::size_t{2});
      const double box = d.value("box", 1.0);
      const auto seed = d.value("seed", std::uint64_t{0});
      if (n == 0 || dim == 0 || !(box > 0)) throw Error(ErrorKind::BadSpec, "euclidean_cloud needs n, dim >= 1, box > 0");
      RandomStream rng(derive_seed(seed, {0xc10d}));
      std::vector<double> coords(n * dim);
      for (double& c : coords) c = rng.uniform(0.0, box);
      declared_a0 = 1.0;
      return QuasiMetricSpace::from_coords(dim, std::move(coords), 1.0, d, options.table_cap);
    }
    if (type == "geometric_line") {
      const int levels = d.at("levels").get<int>();
      const double delta = d.at("delta").get<double>();
      const int digits = d.value("digits", 3);
      if (levels < 1 || !(delta > 0 && delta < 1)) throw Error(ErrorKind::BadSpec, "geometric_line needs levels >= 1, delta in (0,1)");
      if (digits < 2 || digits > static_cast<int>(std::floor(1.0 / delta + 1e-9)))
        throw Error(ErrorKind::BadSpec, "geometric_line needs 2 <= digits <= 1/delta");
      std::vector<double> gaps(levels);
      for (int j = 0; j < levels; ++j) gaps[j] = std::pow(1.0 / delta, j);
      std::size_t count = 1;
      for (int j = 0; j < levels; ++j) count *= static_cast<std::size_t>(digits);
      std::vector<double> coords(count);
      for (std::size_t i = 0; i < count; ++i) {
        std::size_t rest = i;
        double x = 0.0;
        for (int j = 0; j < levels; ++j) {
          x += static_cast<double>(rest % digits) * gaps[j];
          rest /= digits;
        }
        coords[i] = x;
      }
      std::sort(coords.begin(), coords.end());
      declared_a0 = 1.0;
      return QuasiMetricSpace::from_coords(1, std::move(coords), 1.0, d, options.table_cap);
    }
    if (type == "line") {
      auto pts = d.at("points").get<std::vector<double>>();
      declared_a0 = 1.0;
      return QuasiMetricSpace::from_coords(1, std::move(pts), 1.0, d, options.table_cap);
    }
    if (type == "table") {
      const auto n = d.at("n").get<std::size_t>();
      auto table = d.at("distances").get<std::vector<double>>();
      return QuasiMetricSpace::from_table(n, std::move(table), d);
    }
    if (type == "power_snowflake") {
      const double s = d.at("exponent").get<double>();
      if (!(s > 0)) throw Error(ErrorKind::BadSpec, "power_snowflake exponent must be positive");
      std::optional<double> base_a0;
      QuasiMetricSpace base = generate_raw(d.at("base"), options, base_a0);
      if (base_a0) {
        const double scaled = std::pow(*base_a0, s);
        declared_a0 = s > 1 ? std::pow(2.0, s - 1) * scaled : scaled;
      }
      if (base.has_coords())
        return QuasiMetricSpace::from_coords(base.dim(), std::vector<double>(base.coords().begin(), base.coords().end()),
                                             base.exponent() * s, d, options.table_cap);
      const std::size_t n = base.size();
      std::vector<double> table(n * n);
      for (PointId a = 0; a < n; ++a)
        for (PointId b = 0; b < n; ++b) table[a * n + b] = std::pow(base.distance(a, b), s);
      return QuasiMetricSpace::from_table(n, std::move(table), d);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadSpec, std::string("malformed ") + type + " descriptor: " + e.what());
  }
  throw Error(ErrorKind::BadSpec, "unknown generator type '" + type + "'");
}

}  // namespace

QuasiMetricSpace generate_space(const Json& descriptor, const GenerateOptions& options) {
  std::optional<double> declared;
  QuasiMetricSpace space = generate_raw(descriptor, options, declared);
  SpaceProfile profile = validate_quasi_metric(space, options.validate);
  if (declared) {
    // Rounding in |x - y| can push a collinear triple a few ulps past the analytic bound.
    if (profile.a0_measured > *declared * (1 + 1e-9))
      throw Error(ErrorKind::BadSpec, "measured quasi-triangle constant exceeds the declared one");
    profile.a0_declared = declared;
    profile.a0 = *declared;
  }
  if (space.size() <= options.doubling_cap) profile.a1 = doubling_estimate(space);
  space.set_profile(profile);
  return space;
}

Json to_json(const QuasiMetricSpace& space) {
  const SpaceProfile& p = space.profile();
  Json profile = {{"A_0", p.a0}, {"A_0_measured", p.a0_measured}, {"A_0_exhaustive", p.a0_exhaustive},
                  {"diam", p.diam}};
  profile["A_1"] = p.a1 ? Json(*p.a1) : Json(nullptr);
  profile["min_gap"] = p.min_gap ? Json(*p.min_gap) : Json(nullptr);
  profile["A_0_declared"] = p.a0_declared ? Json(*p.a0_declared) : Json(nullptr);
  Json j = {{"n", space.size()}, {"generator", space.generator()}, {"profile", profile}};
  if (space.has_coords()) {
    j["dim"] = space.dim();
    j["exponent"] = space.exponent();
    j["coords"] = std::vector<double>(space.coords().begin(), space.coords().end());
  }
  if (space.has_table()) {
    std::vector<double> rows;
    rows.reserve(space.size() * space.size());
    for (PointId a = 0; a < space.size(); ++a)
      for (PointId b = 0; b < space.size(); ++b) rows.push_back(space.distance(a, b));
    j["distances"] = std::move(rows);
  }
  return j;
}

QuasiMetricSpace space_from_json(const Json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    QuasiMetricSpace space = j.contains("coords")
        ? QuasiMetricSpace::from_coords(j.at("dim").get<std::size_t>(), j.at("coords").get<std::vector<double>>(),
                                        j.value("exponent", 1.0), j.value("generator", Json::object()))
        : QuasiMetricSpace::from_table(n, j.at("distances").get<std::vector<double>>(),
                                       j.value("generator", Json::object()));
    if (space.size() != n) throw Error(ErrorKind::BadSpec, "point count does not match coordinates");
    SpaceProfile p;
    const Json& pj = j.at("profile");
    p.a0 = pj.at("A_0").get<double>();
    p.a0_measured = pj.value("A_0_measured", p.a0);
    p.a0_exhaustive = pj.value("A_0_exhaustive", true);
    p.diam = pj.at("diam").get<double>();
    if (pj.contains("A_1") && !pj["A_1"].is_null()) p.a1 = pj["A_1"].get<int>();
    if (pj.contains("min_gap") && !pj["min_gap"].is_null()) p.min_gap = pj["min_gap"].get<double>();
    if (pj.contains("A_0_declared") && !pj["A_0_declared"].is_null()) p.a0_declared = pj["A_0_declared"].get<double>();
    space.set_profile(p);
    return space;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadSpec, std::string("malformed space document: ") + e.what());
  }
}

}  // namespace cubeforge
