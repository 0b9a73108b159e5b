#include "cubeforge/dyadic.hpp"

#include <algorithm>
#include <cmath>

#include "cubeforge/error.hpp"

namespace cubeforge {

std::vector<std::vector<std::uint32_t>> ParentMaps::children(int k) const {
  const auto& l = links.at(static_cast<std::size_t>(k - k_min));
  std::uint32_t parents = 0;
  for (const ParentLink& p : l) parents = std::max(parents, p.parent + 1);
  std::vector<std::vector<std::uint32_t>> out(parents);
  for (std::uint32_t b = 0; b < l.size(); ++b) out[l[b].parent].push_back(b);
  return out;
}

CubeConstants CubeConstants::from(double c0, double C0, double a0) noexcept {
  return {c0, C0, c0 / (3.0 * a0 * a0), 2.0 * a0 * C0};
}

bool satisfies_order_constraint(double a0, double delta, double c0, double C0) noexcept {
  return 12.0 * a0 * a0 * a0 * C0 * delta <= c0 * (1.0 + 1e-9);
}

ParentMaps build_partial_order(const QuasiMetricSpace& space, const LevelPoints& levels, int k_min, double delta,
                               double a0, double c0, double C0, Mode mode) {
  if (mode == Mode::Strict && !satisfies_order_constraint(a0, delta, c0, C0))
    throw Error(ErrorKind::ModeViolation, "strict mode requires 12 A_0^3 C_0 delta <= c_0");
  ParentMaps maps;
  maps.k_min = k_min;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const int k = k_min + static_cast<int>(i);
    const auto& coarse = levels[i];
    const auto& fine = levels[i + 1];
    const double tight_r = c0 * scale(delta, k) / (2.0 * a0);
    const double loose_r = C0 * scale(delta, k);
    std::vector<ParentLink> link(fine.size());
    for (std::uint32_t b = 0; b < fine.size(); ++b) {
      std::optional<std::uint32_t> tight, loose;
      std::uint32_t nearest = 0;
      double nearest_d = kInfinity;
      bool ambiguous = false;
      for (std::uint32_t a = 0; a < coarse.size(); ++a) {
        const double d = space.distance(coarse[a], fine[b]);
        if (d < tight_r) {
          if (tight) ambiguous = true;
          else tight = a;
        }
        if (!loose && d < loose_r) loose = a;
        if (d < nearest_d) {
          nearest_d = d;
          nearest = a;
        }
      }
      if (ambiguous) {
        if (mode == Mode::Strict)
          throw Error(ErrorKind::TightAmbiguity, "level " + std::to_string(k + 1) + " child " + std::to_string(b) +
                                                     " has two tight parents");
        ++maps.repaired;
      }
      if (tight) {
        link[b] = {*tight, true};
      } else if (loose) {
        link[b] = {*loose, false};
      } else {
        if (mode == Mode::Strict)
          throw Error(ErrorKind::NoParent, "level " + std::to_string(k + 1) + " child " + std::to_string(b) +
                                               " has no parent within C_0 delta^k");
        ++maps.repaired;
        link[b] = {nearest, false};
      }
    }
    maps.links.push_back(std::move(link));
  }
  return maps;
}

CubeSystem build_cube_system(const QuasiMetricSpace& space, const LevelPoints& levels, ParentMaps order,
                             double delta, double a0, CubeConstants constants, Mode mode) {
  const std::size_t n = space.size();
  if (levels.empty()) throw Error(ErrorKind::BuildError, "no levels");
  if (order.links.size() + 1 != levels.size()) throw Error(ErrorKind::BuildError, "parent maps do not match levels");
  const auto& finest = levels.back();
  if (finest.size() != n) throw Error(ErrorKind::BuildError, "finest level must contain every point");

  CubeSystem sys;
  sys.delta = delta;
  sys.a0 = a0;
  sys.mode = mode;
  sys.constants = constants;
  sys.k_min = order.k_min;
  sys.levels.resize(levels.size());

  std::vector<std::uint32_t> cube_of(n, UINT32_MAX);
  for (std::uint32_t b = 0; b < n; ++b) {
    if (finest[b] >= n || cube_of[finest[b]] != UINT32_MAX)
      throw Error(ErrorKind::BuildError, "finest level is not a permutation of the points");
    cube_of[finest[b]] = b;
  }
  for (std::size_t i = levels.size(); i-- > 0;) {
    CubeLevel& lvl = sys.levels[i];
    lvl.k = sys.k_min + static_cast<int>(i);
    if (i + 1 < levels.size()) {
      const auto& link = order.links[i];
      for (auto& c : cube_of) c = link[c].parent;
    }
    lvl.cube_of = cube_of;
    lvl.cubes.resize(levels[i].size());
    for (std::uint32_t a = 0; a < levels[i].size(); ++a) lvl.cubes[a].center = levels[i][a];
    for (PointId x = 0; x < n; ++x) lvl.cubes[cube_of[x]].members.push_back(x);
  }
  sys.parents = std::move(order);
  return sys;
}

CubeSystem build_dyadic_system(const QuasiMetricSpace& space, const LevelPoints& levels, int k_min, double delta,
                               double a0, double c0, double C0, Mode mode) {
  ParentMaps order = build_partial_order(space, levels, k_min, delta, a0, c0, C0, mode);
  return build_cube_system(space, levels, std::move(order), delta, a0, CubeConstants::from(c0, C0, a0), mode);
}

CubeSystem build_reference_system(const QuasiMetricSpace& space, const NetHierarchy& nets) {
  return build_dyadic_system(space, nets.levels, nets.k_min, nets.delta, space.profile().a0, 1.0, 1.0, nets.mode);
}

VerificationReport verify_cube_axioms(const QuasiMetricSpace& space, const CubeSystem& sys) {
  const std::size_t n = space.size();
  const bool strict = sys.mode == Mode::Strict;
  const CubeConstants& cc = sys.constants;
  VerificationReport report;
  report.subject = "cube system";

  CheckResult& open = report.add("open_closed");
  open.note = "closure and interior coincide on a finite space; vacuous";

  CheckResult& partition = report.add("partition");
  CheckResult& nesting = report.add("nesting");
  CheckResult& unions = report.add("children_union");
  CheckResult& sandwich = report.add("ball_sandwich", strict);
  CheckResult& ball_nest = report.add("ball_nesting", strict);
  CheckResult& radius = report.add("radius_inequality", false);
  radius.note = "A_0 (rho(z, z') + C_1 delta^l) <= C_1 delta^k; informational";
  CheckResult& centers = report.add("descendant_center_distance", strict);

  constexpr std::int64_t kNone = -1;
  const std::size_t L = sys.levels.size();
  // owner[i][x]: first cube at level i whose member list names x.
  std::vector<std::vector<std::int64_t>> owner(L, std::vector<std::int64_t>(n, kNone));
  for (std::size_t i = 0; i < L; ++i) {
    const CubeLevel& lvl = sys.levels[i];
    std::vector<int> count(n, 0);
    for (std::uint32_t a = 0; a < lvl.cubes.size(); ++a)
      for (PointId x : lvl.cubes[a].members) {
        if (x >= n) {
          partition.fail({"member_out_of_range", {lvl.k, a, x}, 0, 0});
          continue;
        }
        if (++count[x] == 1) owner[i][x] = a;
      }
    for (PointId x = 0; x < n; ++x) {
      ++partition.checked;
      if (count[x] == 0) partition.fail({"orphan", {lvl.k, x}, 0, 1});
      else if (count[x] > 1) partition.fail({"duplicate", {lvl.k, x, owner[i][x]}, double(count[x]), 1});
      else if (lvl.cube_of.size() == n && lvl.cube_of[x] != owner[i][x])
        partition.fail({"index_mismatch", {lvl.k, x, owner[i][x], lvl.cube_of[x]}, 0, 0});
    }
  }

  for (std::size_t j = 1; j < L; ++j) {
    const CubeLevel& fine = sys.levels[j];
    for (std::uint32_t b = 0; b < fine.cubes.size(); ++b) {
      const auto& mem = fine.cubes[b].members;
      if (mem.empty()) continue;
      for (std::size_t i = 0; i < j; ++i) {
        ++nesting.checked;
        const std::int64_t anc = owner[i][mem.front()];
        for (PointId x : mem)
          if (owner[i][x] != anc) {
            nesting.fail({"straddles", {fine.k, b, sys.levels[i].k, anc, owner[i][x]}, 0, 0});
            break;
          }
      }
    }
  }

  for (std::size_t i = 0; i + 1 < L && i < sys.parents.links.size(); ++i) {
    const CubeLevel& coarse = sys.levels[i];
    const CubeLevel& fine = sys.levels[i + 1];
    const auto& link = sys.parents.links[i];
    std::vector<std::size_t> total(coarse.cubes.size(), 0);
    for (std::uint32_t b = 0; b < fine.cubes.size() && b < link.size(); ++b) {
      total[link[b].parent] += fine.cubes[b].members.size();
      for (PointId x : fine.cubes[b].members)
        if (owner[i][x] != link[b].parent) {
          unions.fail({"child_outside_parent", {fine.k, b, link[b].parent, x}, 0, 0});
          break;
        }
    }
    for (std::uint32_t a = 0; a < coarse.cubes.size(); ++a) {
      ++unions.checked;
      if (total[a] != coarse.cubes[a].members.size())
        unions.fail({"size_mismatch", {coarse.k, a}, double(total[a]), double(coarse.cubes[a].members.size())});
    }
  }

  // Realized outer balls B(z, C_1 delta^k) per cube.
  std::vector<std::vector<std::vector<PointId>>> outer(L);
  for (std::size_t i = 0; i < L; ++i) {
    const CubeLevel& lvl = sys.levels[i];
    const double rin = cc.c1 * sys.scale(lvl.k);
    const double rout = cc.C1 * sys.scale(lvl.k);
    outer[i].resize(lvl.cubes.size());
    for (std::uint32_t a = 0; a < lvl.cubes.size(); ++a) {
      const Cube& q = lvl.cubes[a];
      for (PointId x = 0; x < n; ++x) {
        const double d = space.distance(x, q.center);
        if (d < rout) outer[i][a].push_back(x);
        if (d < rin) {
          ++sandwich.checked;
          if (owner[i][x] != a) sandwich.fail({"inner_ball_escapes", {lvl.k, a, x}, d, rin});
        }
      }
      for (PointId x : q.members) {
        ++sandwich.checked;
        const double d = space.distance(x, q.center);
        if (!(d < rout)) sandwich.fail({"member_outside_outer_ball", {lvl.k, a, x}, d, rout});
      }
    }
  }

  for (std::size_t j = 1; j < L; ++j) {
    const CubeLevel& fine = sys.levels[j];
    const double rl = cc.C1 * sys.scale(fine.k);
    for (std::uint32_t b = 0; b < fine.cubes.size(); ++b) {
      const auto& mem = fine.cubes[b].members;
      if (mem.empty()) continue;
      const PointId zb = fine.cubes[b].center;
      for (std::size_t i = 0; i < j; ++i) {
        const std::int64_t anc = owner[i][mem.front()];
        if (anc == kNone) continue;
        const CubeLevel& coarse = sys.levels[i];
        const PointId za = coarse.cubes[anc].center;
        const double rk = cc.C1 * sys.scale(coarse.k);
        const double d = space.distance(za, zb);
        ++centers.checked;
        if (!(d < rk)) centers.fail({"center_far", {coarse.k, anc, fine.k, b}, d, rk});
        ++radius.checked;
        if (!(sys.a0 * (d + rl) <= rk)) radius.fail({"radius", {coarse.k, anc, fine.k, b}, sys.a0 * (d + rl), rk});
        ++ball_nest.checked;
        for (PointId y : outer[j][b]) {
          const double dy = space.distance(y, za);
          if (!(dy < rk)) {
            ball_nest.fail({"ball_escapes", {coarse.k, anc, fine.k, b, y}, dy, rk});
            break;
          }
        }
      }
    }
  }
  return report;
}

double distance_to_complement(const QuasiMetricSpace& space, const CubeLevel& level, std::uint32_t cube, PointId x) {
  double best = kInfinity;
  for (PointId y = 0; y < space.size(); ++y)
    if (level.cube_of[y] != cube) best = std::min(best, space.distance(x, y));
  return best;
}

std::vector<PointId> boundary_zone(const QuasiMetricSpace& space, const CubeSystem& system, int k,
                                   std::uint32_t cube, double eps) {
  const CubeLevel& lvl = system.level(k);
  std::vector<PointId> out;
  for (PointId x : lvl.cubes.at(cube).members)
    if (distance_to_complement(space, lvl, cube, x) <= eps) out.push_back(x);
  return out;
}

Json to_json(const CubeSystem& s) {
  Json levels = Json::array();
  for (const CubeLevel& l : s.levels) {
    Json cubes = Json::array();
    for (const Cube& c : l.cubes) cubes.push_back({{"center", c.center}, {"members", c.members}});
    levels.push_back({{"k", l.k}, {"cubes", std::move(cubes)}});
  }
  Json parents = Json::array();
  for (std::size_t i = 0; i < s.parents.links.size(); ++i) {
    Json map = Json::array(), tight = Json::array();
    for (const ParentLink& p : s.parents.links[i]) {
      map.push_back(p.parent);
      tight.push_back(p.tight);
    }
    parents.push_back({{"k", s.k_min + static_cast<int>(i)}, {"map", std::move(map)}, {"tight", std::move(tight)}});
  }
  return {{"delta", s.delta},
          {"A_0", s.a0},
          {"mode", to_string(s.mode)},
          {"k_min", s.k_min},
          {"constants", {{"c0", s.constants.c0}, {"C0", s.constants.C0}, {"c1", s.constants.c1}, {"C1", s.constants.C1}}},
          {"levels", std::move(levels)},
          {"parents", std::move(parents)},
          {"repaired", s.parents.repaired}};
}

CubeSystem cube_system_from_json(const Json& j) {
  try {
    CubeSystem s;
    s.delta = j.at("delta").get<double>();
    s.a0 = j.at("A_0").get<double>();
    s.mode = mode_from_string(j.at("mode").get<std::string>());
    s.k_min = j.at("k_min").get<int>();
    const Json& c = j.at("constants");
    s.constants = {c.at("c0").get<double>(), c.at("C0").get<double>(), c.at("c1").get<double>(),
                   c.at("C1").get<double>()};
    std::size_t n = 0;
    for (const Json& lj : j.at("levels")) {
      CubeLevel l;
      l.k = lj.at("k").get<int>();
      for (const Json& cj : lj.at("cubes"))
        l.cubes.push_back({cj.at("center").get<PointId>(), cj.at("members").get<std::vector<PointId>>()});
      for (const Cube& q : l.cubes) n += q.members.size();
      s.levels.push_back(std::move(l));
    }
    n = s.levels.empty() ? 0 : n / s.levels.size();
    for (CubeLevel& l : s.levels) {
      l.cube_of.assign(n, 0);
      for (std::uint32_t a = 0; a < l.cubes.size(); ++a)
        for (PointId x : l.cubes[a].members)
          if (x < n) l.cube_of[x] = a;
    }
    s.parents.k_min = s.k_min;
    s.parents.repaired = j.value("repaired", std::size_t{0});
    for (const Json& pj : j.at("parents")) {
      const auto map = pj.at("map").get<std::vector<std::uint32_t>>();
      const auto tight = pj.at("tight").get<std::vector<bool>>();
      std::vector<ParentLink> link(map.size());
      for (std::size_t b = 0; b < map.size(); ++b) link[b] = {map[b], b < tight.size() && tight[b]};
      s.parents.links.push_back(std::move(link));
    }
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadSpec, std::string("malformed cube system document: ") + e.what());
  }
}

}  // namespace cubeforge
