#include "cubeforge/nets.hpp"

#include <cmath>
#include <limits>

#include "cubeforge/error.hpp"

namespace cubeforge {

const char* to_string(Mode mode) noexcept { return mode == Mode::Strict ? "strict" : "exploratory"; }

Mode mode_from_string(const std::string& s) {
  if (s == "strict") return Mode::Strict;
  if (s == "exploratory") return Mode::Exploratory;
  throw Error(ErrorKind::ConfigError, "mode must be 'strict' or 'exploratory', got '" + s + "'");
}

double scale(double delta, int k) noexcept { return std::pow(delta, k); }

bool satisfies_strict_constraint(double a0, double delta) noexcept {
  // 1/144 is not representable; allow the rounding of the product.
  return 144.0 * std::pow(a0, 8) * delta <= 1.0 + 1e-9;
}

namespace {

// Largest k with delta^k > v.
int last_level_above(double delta, double v) {
  int k = static_cast<int>(std::floor(std::log(v) / std::log(delta)));
  while (scale(delta, k) <= v) --k;
  while (scale(delta, k + 1) > v) ++k;
  return k;
}

// Smallest k with delta^k < v.
int first_level_below(double delta, double v) {
  int k = static_cast<int>(std::ceil(std::log(v) / std::log(delta)));
  while (scale(delta, k) >= v) ++k;
  while (scale(delta, k - 1) < v) --k;
  return k;
}

std::vector<PointId> greedy_net(const QuasiMetricSpace& space, const std::vector<PointId>& order, double r) {
  std::vector<PointId> net;
  for (PointId p : order) {
    bool ok = true;
    for (PointId q : net)
      if (space.distance(p, q) < r) {
        ok = false;
        break;
      }
    if (ok) net.push_back(p);
  }
  return net;
}

}  // namespace

NetHierarchy build_reference_hierarchy(const QuasiMetricSpace& space, double delta, Mode mode,
                                       std::optional<PointId> distinguished) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::ModeViolation, "delta must lie in (0, 1)");
  const double a0 = space.profile().a0;
  if (mode == Mode::Strict && !satisfies_strict_constraint(a0, delta))
    throw Error(ErrorKind::ModeViolation, "strict mode requires 144 A_0^8 delta <= 1 (A_0 = " + std::to_string(a0) +
                                              ", delta = " + std::to_string(delta) + ")");
  if (distinguished && *distinguished >= space.size())
    throw Error(ErrorKind::BadSpec, "distinguished point out of range");

  NetHierarchy h;
  h.delta = delta;
  h.mode = mode;
  h.distinguished = distinguished;
  const SpaceProfile& p = space.profile();
  if (space.size() == 1 || !p.min_gap) {
    h.k_min = h.k_max = 0;
  } else {
    h.k_min = last_level_above(delta, p.diam);
    h.k_max = first_level_below(delta, *p.min_gap);
  }
  if (h.k_min > h.k_max) throw Error(ErrorKind::DegenerateWindow, "level window is empty");

  std::vector<PointId> order;
  order.reserve(space.size());
  if (distinguished) order.push_back(*distinguished);
  for (PointId x = 0; x < space.size(); ++x)
    if (!distinguished || x != *distinguished) order.push_back(x);

  for (int k = h.k_min; k <= h.k_max; ++k) h.levels.push_back(greedy_net(space, order, h.scale(k)));
  return h;
}

VerificationReport verify_net_axioms(const QuasiMetricSpace& space, const NetHierarchy& nets) {
  VerificationReport report;
  report.subject = "reference nets";
  CheckResult& sep = report.add("net_separation");
  CheckResult& cov = report.add("net_covering");
  CheckResult& maximal = report.add("net_maximality");
  CheckResult& refine = report.add("net_refinement");
  CheckResult& ends = report.add("net_window_ends");
  CheckResult& pinned = report.add("net_distinguished");

  for (int k = nets.k_min; k <= nets.k_max; ++k) {
    const auto& level = nets.at(k);
    const double r = nets.scale(k);
    for (std::size_t a = 0; a < level.size(); ++a)
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        ++sep.checked;
        const double d = space.distance(level[a], level[b]);
        if (!(d >= r)) sep.fail({"separation", {k, level[a], level[b]}, d, r});
      }
    std::vector<char> in_net(space.size(), 0);
    for (PointId z : level) in_net[z] = 1;
    for (PointId x = 0; x < space.size(); ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (PointId z : level) best = std::min(best, space.distance(x, z));
      ++cov.checked;
      if (!(best < r)) cov.fail({"covering", {k, x}, best, r});
      if (!in_net[x]) {
        ++maximal.checked;
        if (best >= r) maximal.fail({"appendable", {k, x}, best, r});
      }
    }
    if (k < nets.k_max) {
      const auto& finer = nets.at(k + 1);
      const double rf = nets.scale(k + 1);
      for (PointId z : level) {
        double best = std::numeric_limits<double>::infinity();
        for (PointId w : finer) best = std::min(best, space.distance(z, w));
        ++refine.checked;
        if (!(best < rf)) refine.fail({"refinement", {k, z}, best, rf});
      }
    }
    if (nets.distinguished) {
      ++pinned.checked;
      if (level.empty() || level.front() != *nets.distinguished)
        pinned.fail({"distinguished_not_first", {k, static_cast<std::int64_t>(*nets.distinguished)}, 0, 0});
    }
  }
  ends.checked = 2;
  if (nets.levels.empty() || nets.levels.front().size() != 1)
    ends.fail({"coarsest_not_singleton", {nets.k_min}, nets.levels.empty() ? 0.0 : double(nets.levels.front().size()), 1});
  if (nets.levels.empty() || nets.levels.back().size() != space.size())
    ends.fail({"finest_not_all", {nets.k_max}, nets.levels.empty() ? 0.0 : double(nets.levels.back().size()),
               double(space.size())});
  return report;
}

Json to_json(const NetHierarchy& nets) {
  Json j = {{"delta", nets.delta}, {"k_min", nets.k_min}, {"k_max", nets.k_max},
            {"mode", to_string(nets.mode)}, {"levels", nets.levels}};
  j["distinguished"] = nets.distinguished ? Json(*nets.distinguished) : Json(nullptr);
  return j;
}

NetHierarchy nets_from_json(const Json& j) {
  try {
    NetHierarchy h;
    h.delta = j.at("delta").get<double>();
    h.k_min = j.at("k_min").get<int>();
    h.k_max = j.at("k_max").get<int>();
    h.mode = mode_from_string(j.at("mode").get<std::string>());
    h.levels = j.at("levels").get<std::vector<std::vector<PointId>>>();
    if (j.contains("distinguished") && !j["distinguished"].is_null()) h.distinguished = j["distinguished"].get<PointId>();
    if (h.levels.size() != static_cast<std::size_t>(h.k_max - h.k_min + 1))
      throw Error(ErrorKind::BadSpec, "level count does not match window");
    return h;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadSpec, std::string("malformed nets document: ") + e.what());
  }
}

}  // namespace cubeforge
