#include <doctest.h>

#include "cubeforge/error.hpp"
#include "cubeforge/nets.hpp"
#include "support/oracles.hpp"

using namespace cubeforge;

namespace {

QuasiMetricSpace line_space(const std::vector<double>& pts) { return generate_space(Json{{"type", "line"}, {"points", pts}}); }

std::vector<int> ids(const std::vector<PointId>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("line 0 1 3 7 at delta 1/4") {
  const std::vector<double> pts{0, 1, 3, 7};
  const auto s = line_space(pts);
  const auto nets = build_reference_hierarchy(s, 0.25, Mode::Exploratory);
  CHECK(nets.k_min == -2);
  CHECK(nets.k_max == 1);
  CHECK(ids(nets.at(-2)) == std::vector<int>{0});
  CHECK(ids(nets.at(-1)) == std::vector<int>{0, 3});
  CHECK(ids(nets.at(0)) == std::vector<int>{0, 1, 2, 3});
  const auto d = oracle::line(pts);
  for (int k = nets.k_min; k <= nets.k_max; ++k)
    CHECK(ids(nets.at(k)) == oracle::greedy_net({0, 1, 2, 3}, d, nets.scale(k)));
  CHECK(verify_net_axioms(s, nets).passed());
}

TEST_CASE("single point space has one level") {
  const auto nets = build_reference_hierarchy(line_space({5.0}), 0.25, Mode::Exploratory);
  CHECK(nets.level_count() == 1);
  CHECK(ids(nets.levels.front()) == std::vector<int>{0});
}

TEST_CASE("distinguished point is inserted first") {
  const std::vector<double> pts{0, 1, 3, 7};
  const auto nets = build_reference_hierarchy(line_space(pts), 0.25, Mode::Exploratory, PointId{2});
  for (const auto& lv : nets.levels) CHECK(lv.front() == 2);
  CHECK(ids(nets.at(-1)) == oracle::greedy_net({2, 0, 1, 3}, oracle::line(pts), 4.0));
}

TEST_CASE("strict mode rejects a large delta") {
  const auto s = line_space({0, 1, 3, 7});
  CHECK_THROWS_AS(build_reference_hierarchy(s, 0.25, Mode::Strict), Error);
  try {
    build_reference_hierarchy(s, 0.25, Mode::Strict);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ModeViolation);
  }
  CHECK_NOTHROW(build_reference_hierarchy(s, 1.0 / 144, Mode::Strict));
  CHECK(satisfies_strict_constraint(1.0, 1.0 / 144));
  CHECK_FALSE(satisfies_strict_constraint(1.0, 1.0 / 143));
}

TEST_CASE("greedy nets match the oracle on random clouds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = generate_space(Json{{"type", "euclidean_cloud"}, {"n", 60}, {"dim", 2}, {"box", 1.0}, {"seed", seed}});
    const auto nets = build_reference_hierarchy(s, 0.25, Mode::Exploratory);
    const auto d = [&](int a, int b) { return s.distance(a, b); };
    std::vector<int> order(60);
    for (int i = 0; i < 60; ++i) order[i] = i;
    for (int k = nets.k_min; k <= nets.k_max; ++k) CHECK(ids(nets.at(k)) == oracle::greedy_net(order, d, nets.scale(k)));
    CHECK(verify_net_axioms(s, nets).passed());
    CHECK(nets.at(nets.k_min).size() == 1);
    CHECK(nets.at(nets.k_max).size() == 60);
  }
}

TEST_CASE("deleting a net point breaks covering, duplicating breaks separation") {
  const auto s = generate_space(Json{{"type", "euclidean_cloud"}, {"n", 40}, {"dim", 2}, {"box", 1.0}, {"seed", 2}});
  const auto nets = build_reference_hierarchy(s, 0.25, Mode::Exploratory);
  int k = nets.k_min + 1;
  while (nets.at(k).size() < 2) ++k;

  auto cut = nets;
  auto& lv = cut.levels[static_cast<std::size_t>(k - cut.k_min)];
  lv.erase(lv.begin() + 1);
  const auto r1 = verify_net_axioms(s, cut);
  CHECK_FALSE(r1.passed());
  REQUIRE(r1.find("net_covering") != nullptr);
  CHECK(r1.find("net_covering")->violations > 0);
  CHECK_FALSE(r1.find("net_covering")->witnesses.empty());

  auto dup = nets;
  auto& lv2 = dup.levels[static_cast<std::size_t>(k - dup.k_min)];
  lv2.push_back(lv2.front());
  const auto r2 = verify_net_axioms(s, dup);
  REQUIRE(r2.find("net_separation") != nullptr);
  CHECK(r2.find("net_separation")->violations > 0);
  CHECK(r2.find("net_separation")->witnesses.front().value == 0.0);
}

TEST_CASE("net json round trip") {
  const auto s = generate_space(Json{{"type", "geometric_line"}, {"levels", 3}, {"delta", 1.0 / 144}});
  const auto nets = build_reference_hierarchy(s, 1.0 / 144, Mode::Strict);
  const auto back = nets_from_json(Json::parse(to_json(nets).dump()));
  CHECK(back.levels == nets.levels);
  CHECK(back.k_min == nets.k_min);
  CHECK(back.k_max == nets.k_max);
  CHECK(back.mode == nets.mode);
}
