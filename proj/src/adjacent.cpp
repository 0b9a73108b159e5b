#include "cubeforge/adjacent.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cubeforge/error.hpp"

namespace cubeforge {

double covering_constant(double a0, double delta, bool distinguished) noexcept {
  return 8.0 * a0 * a0 * a0 * std::pow(delta, distinguished ? -3 : -2);
}

AdjacentFamily assemble_family(const QuasiMetricSpace& space, const LabeledHierarchy& lab,
                               std::vector<SelectionOutcome> selections, std::optional<PointId> distinguished) {
  AdjacentFamily fam;
  fam.K = static_cast<int>(selections.size());
  fam.L = lab.L;
  fam.M = lab.M;
  fam.distinguished = distinguished;
  fam.C = covering_constant(lab.a0, lab.delta(), distinguished.has_value());
  for (const SelectionOutcome& s : selections) fam.systems.push_back(build_new_point_system(space, lab, s.centers));
  for (const LevelLabels& lv : lab.levels) {
    std::vector<int> owner(lv.parent.size(), 0);
    const std::size_t i = static_cast<std::size_t>(lv.k - lab.k_min());
    for (int t = fam.K; t >= 1; --t) {
      const auto& chosen = selections[static_cast<std::size_t>(t - 1)].chosen[i];
      for (std::uint32_t a = 0; a < chosen.size(); ++a) owner[chosen[a]] = t;
    }
    fam.center_owner.push_back(std::move(owner));
  }
  fam.selections = std::move(selections);
  return fam;
}

AdjacentFamily build_adjacent_family(const QuasiMetricSpace& space, const LabeledHierarchy& lab,
                                     std::optional<PointId> distinguished) {
  if (distinguished && (!lab.nets.distinguished || *lab.nets.distinguished != *distinguished))
    throw Error(ErrorKind::PreconditionFail, "distinguished family needs a hierarchy pinned at the same point");
  std::vector<SelectionOutcome> sel;
  for (int t = 1; t <= lab.K(); ++t) {
    const DuplexLabel d = lab.phi_inv(t);
    sel.push_back(select_points(lab, distinguished ? SelectionRule::specific_distinguished(d, *distinguished)
                                                   : SelectionRule::specific(d)));
  }
  return assemble_family(space, lab, std::move(sel), distinguished);
}

namespace {

// Largest j with delta^j >= r.
int level_at_or_above(double delta, double r) {
  int j = static_cast<int>(std::floor(std::log(r) / std::log(delta)));
  while (scale(delta, j) < r) --j;
  while (scale(delta, j + 1) >= r) ++j;
  return j;
}

std::uint32_t nearest_index(const QuasiMetricSpace& space, const std::vector<PointId>& pts, PointId x) {
  std::uint32_t best = 0;
  double best_d = kInfinity;
  for (std::uint32_t b = 0; b < pts.size(); ++b) {
    const double d = space.distance(x, pts[b]);
    if (d < best_d) {
      best_d = d;
      best = b;
    }
  }
  return best;
}

ContainingCube locate(const LabeledHierarchy& lab, const AdjacentFamily& fam, PointId x, double r,
                      const std::function<std::uint32_t(int)>& nearest_at) {
  ContainingCube out;
  out.k = lab.k_min();
  if (lab.nets.levels.size() == 1) return out;
  const int k = level_at_or_above(lab.delta(), r) - 1;
  const int k_low = fam.distinguished ? lab.k_min() + 1 : lab.k_min();
  if (k < k_low) {
    out.clamped_top = true;
    return out;
  }
  if (k + 1 > lab.k_max()) {
    out.underflow = true;
    out.k = lab.k_max();
    out.cube = fam.systems.front().level(out.k).cube_of[x];
    return out;
  }
  const std::uint32_t beta = nearest_at(k + 1);
  const LevelLabels& lv = lab.at(k);
  const std::uint32_t alpha = lv.parent[beta];
  if (fam.distinguished && alpha == 0) {
    out.k = k - 1;
    out.cube = 0;
    return out;
  }
  out.k = k;
  out.t = fam.center_owner[static_cast<std::size_t>(k - lab.k_min())][beta];
  if (out.t == 0) throw Error(ErrorKind::BuildError, "no system realizes the center of a containing cube");
  out.cube = alpha;
  return out;
}

}  // namespace

ContainingCube find_containing_cube(const QuasiMetricSpace& space, const LabeledHierarchy& lab,
                                    const AdjacentFamily& fam, PointId x, double r) {
  if (!(r > 0)) throw Error(ErrorKind::PreconditionFail, "radius must be positive");
  return locate(lab, fam, x, r, [&](int j) { return nearest_index(space, lab.nets.at(j), x); });
}

VerificationReport verify_covering(const QuasiMetricSpace& space, const LabeledHierarchy& lab,
                                   const AdjacentFamily& fam) {
  const bool strict = lab.mode() == Mode::Strict;
  const std::size_t n = space.size();
  VerificationReport report;
  report.subject = fam.distinguished ? "adjacent covering (distinguished)" : "adjacent covering";
  CheckResult& contain = report.add("ball_in_cube", strict);
  CheckResult& diam = report.add("cube_diameter", strict);
  CheckResult& local = report.add("center_locality", strict);
  CheckResult& owners = report.add("center_coverage", strict);
  CheckResult& pinned = report.add("distinguished_centered", strict);
  CheckResult& sys_size = report.add("system_count");

  ++sys_size.checked;
  if (fam.K != lab.K() || fam.systems.size() != static_cast<std::size_t>(fam.K))
    sys_size.fail({"K", {fam.K}, double(fam.systems.size()), double(lab.K())});

  // With x0, the parent at index 0 always picks x0; its other children are
  // covered through the coarser cube at x0 instead.
  std::size_t exempt = 0;
  for (std::size_t i = 0; i < fam.center_owner.size(); ++i)
    for (std::uint32_t b = 0; b < fam.center_owner[i].size(); ++b) {
      if (fam.distinguished && lab.levels[i].parent[b] == 0) {
        ++exempt;
        continue;
      }
      ++owners.checked;
      if (fam.center_owner[i][b] == 0)
        owners.fail({"unrealized_center", {lab.k_min() + static_cast<std::int64_t>(i) + 1, b}, 0, 0});
    }
  owners.metrics["distinguished_exempt"] = exempt;

  if (fam.distinguished)
    for (int t = 1; t <= fam.K; ++t) {
      const CubeSystem& s = fam.system(t);
      for (const CubeLevel& l : s.levels) {
        ++pinned.checked;
        bool found = false;
        for (const Cube& q : l.cubes) found = found || q.center == *fam.distinguished;
        if (!found) pinned.fail({"x0_not_a_center", {t, l.k}, 0, 0});
      }
    }

  // nearest[j][x], dist-to-complement and diameter caches.
  std::vector<std::vector<std::uint32_t>> nearest(lab.nets.levels.size());
  for (std::size_t j = 0; j < nearest.size(); ++j) {
    nearest[j].resize(n);
    for (PointId x = 0; x < n; ++x) nearest[j][x] = nearest_index(space, lab.nets.levels[j], x);
  }
  std::unordered_map<std::uint64_t, double> comp_cache, diam_cache;
  auto key = [](std::uint64_t t, std::uint64_t li, std::uint64_t v) { return (t << 44) | (li << 32) | v; };
  auto level_index = [&](int k) { return static_cast<std::uint64_t>(k - lab.k_min()); };

  const std::vector<double> radii = realized_radii(space);
  double worst = 0.0;
  for (PointId x = 0; x < n; ++x) {
    for (double r : radii) {
      const ContainingCube cc =
          locate(lab, fam, x, r, [&](int j) { return nearest[static_cast<std::size_t>(j - lab.k_min())][x]; });
      const CubeSystem& s = fam.system(cc.t);
      const CubeLevel& lvl = s.level(cc.k);
      const std::uint64_t li = level_index(cc.k);
      auto [cit, cnew] = comp_cache.try_emplace(key(cc.t, li, x), 0.0);
      if (cnew) cit->second = distance_to_complement(space, lvl, cc.cube, x);
      auto [dit, dnew] = diam_cache.try_emplace(key(cc.t, li, cc.cube), 0.0);
      if (dnew) {
        double d = 0.0;
        const auto& mem = lvl.cubes[cc.cube].members;
        for (std::size_t a = 0; a < mem.size(); ++a)
          for (std::size_t b = a + 1; b < mem.size(); ++b) d = std::max(d, space.distance(mem[a], mem[b]));
        dit->second = d;
      }
      ++contain.checked;
      if (lvl.cube_of[x] != cc.cube || !(r <= cit->second))
        contain.fail({"ball_escapes", {x, cc.t, cc.k, cc.cube}, r, cit->second});
      ++diam.checked;
      worst = std::max(worst, dit->second / r);
      if (!(dit->second <= fam.C * r)) diam.fail({"diameter", {x, cc.t, cc.k, cc.cube}, dit->second, fam.C * r});
      if (!cc.clamped_top && !cc.underflow) {
        const PointId z = lvl.cubes[cc.cube].center;
        const double d = space.distance(x, z);
        const bool pinned_case = fam.distinguished && cc.k + 1 == level_at_or_above(lab.delta(), r) - 1;
        const double bound = pinned_case ? 2.0 * lab.a0 * lab.nets.scale(cc.k + 1) : lab.nets.scale(cc.k + 1);
        ++local.checked;
        if (!(d < bound)) local.fail({"center_far", {x, cc.t, cc.k}, d, bound});
      }
    }
  }
  diam.metrics = {{"worst_ratio", worst}, {"C", fam.C}};
  return report;
}

Json to_json(const AdjacentFamily& fam, const LabeledHierarchy& lab) {
  Json phi = Json::array();
  for (int t = 1; t <= fam.K; ++t) {
    const DuplexLabel d = lab.phi_inv(t);
    phi.push_back({d.primary, d.ordinal, t});
  }
  Json systems = Json::array();
  for (const CubeSystem& s : fam.systems) systems.push_back(to_json(s));
  Json j = {{"K", fam.K}, {"L", fam.L}, {"M", fam.M}, {"C", fam.C}, {"phi", std::move(phi)},
            {"systems", std::move(systems)}};
  j["distinguished"] = fam.distinguished ? Json(*fam.distinguished) : Json(nullptr);
  return j;
}

}  // namespace cubeforge
