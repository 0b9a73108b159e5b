#include <doctest.h>

#include "cubeforge/dyadic.hpp"
#include "cubeforge/error.hpp"
#include "support/oracles.hpp"

using namespace cubeforge;

namespace {

QuasiMetricSpace line_space(const std::vector<double>& pts) { return generate_space(Json{{"type", "line"}, {"points", pts}}); }

std::vector<int> ids(const std::vector<PointId>& v) { return {v.begin(), v.end()}; }

// Oracle cubes for every level of a reference system, built from scratch.
std::vector<std::vector<oracle::Set>> oracle_cubes(const QuasiMetricSpace& s, const NetHierarchy& nets, double c0,
                                                   double C0) {
  const auto d = [&](int a, int b) { return s.distance(a, b); };
  std::vector<oracle::Set> levels;
  for (const auto& lv : nets.levels) levels.push_back(ids(lv));
  std::vector<std::vector<int>> maps;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const double sc = nets.scale(nets.k_min + static_cast<int>(i));
    maps.push_back(oracle::parents(levels[i], levels[i + 1], d, c0 * sc / (2 * s.profile().a0), C0 * sc));
  }
  std::vector<std::vector<oracle::Set>> out;
  for (std::size_t i = 0; i < levels.size(); ++i) out.push_back(oracle::cubes_at(levels, maps, i));
  return out;
}

}  // namespace

TEST_CASE("line 0 1 3 7 parents and cubes") {
  const std::vector<double> pts{0, 1, 3, 7};
  const auto s = line_space(pts);
  const auto nets = build_reference_hierarchy(s, 0.25, Mode::Exploratory);
  const CubeSystem sys = build_reference_system(s, nets);
  // Scale 4 level {0, 7} to scale 1 level {0, 1, 3, 7}.
  const auto kids = sys.parents.children(-1);
  REQUIRE(kids.size() == 2);
  CHECK(kids[0] == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(kids[1] == std::vector<std::uint32_t>{3});
  CHECK(sys.parents.parent(0, 2) == 0);
  CHECK_FALSE(sys.parents.links[1][2].tight);
  CHECK(sys.parents.links[1][1].tight);

  const auto brute = oracle::parents({0, 3}, {0, 1, 2, 3}, oracle::line(pts), 2.0, 4.0);
  CHECK(brute == std::vector<int>{0, 0, 0, 1});

  const CubeLevel& l = sys.level(-1);
  REQUIRE(l.cubes.size() == 2);
  CHECK(ids(l.cubes[0].members) == std::vector<int>{0, 1, 2});
  CHECK(ids(l.cubes[1].members) == std::vector<int>{3});
  CHECK(sys.level(-2).cubes.size() == 1);
  CHECK(sys.level(-2).cubes[0].members.size() == 4);
}

TEST_CASE("boundary zones on the line example") {
  const auto s = line_space({0, 1, 3, 7});
  const CubeSystem sys = build_reference_system(s, build_reference_hierarchy(s, 0.25, Mode::Exploratory));
  const auto d = oracle::line({0, 1, 3, 7});
  CHECK(ids(boundary_zone(s, sys, -1, 0, 4.0)) == oracle::boundary_zone(4, d, {0, 1, 2}, 4.0));
  CHECK(ids(boundary_zone(s, sys, -1, 0, 4.0)) == std::vector<int>{2});
  CHECK(boundary_zone(s, sys, -1, 0, 3.0).empty());
  CHECK(boundary_zone(s, sys, -2, 0, 1e9).empty());
  CHECK(distance_to_complement(s, sys.level(-2), 0, 0) == kInfinity);
}

TEST_CASE("single level system has singleton cubes") {
  const auto s = line_space({3.0});
  const CubeSystem sys = build_reference_system(s, build_reference_hierarchy(s, 0.25, Mode::Exploratory));
  REQUIRE(sys.levels.size() == 1);
  CHECK(sys.levels[0].cubes.size() == 1);
  CHECK(verify_cube_axioms(s, sys).passed());
}

TEST_CASE("exploratory systems always nest and partition") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = generate_space(Json{{"type", "euclidean_cloud"}, {"n", 80}, {"dim", 2}, {"box", 1.0}, {"seed", seed}});
    const auto nets = build_reference_hierarchy(s, 0.25, Mode::Exploratory);
    const CubeSystem sys = build_reference_system(s, nets);
    const auto rep = verify_cube_axioms(s, sys);
    CHECK(rep.find("nesting")->passed());
    CHECK(rep.find("partition")->passed());
    CHECK(rep.find("children_union")->passed());
    const auto brute = oracle_cubes(s, nets, 1.0, 1.0);
    for (std::size_t i = 0; i < sys.levels.size(); ++i) {
      std::vector<oracle::Set> mine;
      for (const Cube& q : sys.levels[i].cubes) mine.push_back(ids(q.members));
      CHECK(mine == brute[i]);
    }
  }
}

TEST_CASE("strict reference system on the geometric line passes every axiom") {
  const auto s = generate_space(Json{{"type", "geometric_line"}, {"levels", 3}, {"delta", 1.0 / 144}});
  const auto nets = build_reference_hierarchy(s, 1.0 / 144, Mode::Strict);
  const CubeSystem sys = build_reference_system(s, nets);
  const auto rep = verify_cube_axioms(s, sys);
  CHECK(rep.passed());
  for (const char* name : {"nesting", "partition", "ball_sandwich", "ball_nesting"}) {
    REQUIRE(rep.find(name) != nullptr);
    CHECK(rep.find(name)->enforced);
    CHECK(rep.find(name)->checked > 0);
  }
  const auto brute = oracle_cubes(s, nets, 1.0, 1.0);
  for (std::size_t i = 0; i < sys.levels.size(); ++i) {
    std::vector<oracle::Set> mine;
    for (const Cube& q : sys.levels[i].cubes) mine.push_back(ids(q.members));
    CHECK(mine == brute[i]);
  }
}

TEST_CASE("corrupted membership reports the orphan") {
  const auto s = generate_space(Json{{"type", "geometric_line"}, {"levels", 2}, {"delta", 1.0 / 144}});
  CubeSystem sys = build_reference_system(s, build_reference_hierarchy(s, 1.0 / 144, Mode::Strict));
  CubeLevel& l = sys.levels[1];
  REQUIRE(l.cubes.front().members.size() > 1);
  const PointId lost = l.cubes.front().members.back();
  l.cubes.front().members.pop_back();
  const auto rep = verify_cube_axioms(s, sys);
  const CheckResult* part = rep.find("partition");
  REQUIRE(part != nullptr);
  CHECK_FALSE(part->passed());
  bool found = false;
  for (const Witness& w : part->witnesses) found = found || (w.what == "orphan" && w.ids.back() == lost);
  CHECK(found);
}

TEST_CASE("order constraint and constants") {
  const CubeConstants c = CubeConstants::from(0.25, 2.0, 1.0);
  CHECK(c.c1 == doctest::Approx(0.25 / 3));
  CHECK(c.C1 == doctest::Approx(4.0));
  CHECK(satisfies_order_constraint(1.0, 1.0 / 96, 0.25, 2.0));
  CHECK_FALSE(satisfies_order_constraint(1.0, 1.0 / 95, 0.25, 2.0));
}

TEST_CASE("cube system json round trip") {
  const auto s = generate_space(Json{{"type", "geometric_line"}, {"levels", 3}, {"delta", 1.0 / 144}});
  const CubeSystem sys = build_reference_system(s, build_reference_hierarchy(s, 1.0 / 144, Mode::Strict));
  CHECK(cube_system_from_json(Json::parse(to_json(sys).dump())) == sys);
}
