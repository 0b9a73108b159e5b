#include <doctest.h>

#include <set>

#include "cubeforge/error.hpp"
#include "cubeforge/labeling.hpp"
#include "cubeforge/rng.hpp"
#include "support/oracles.hpp"

using namespace cubeforge;

namespace {

QuasiMetricSpace line_space(const std::vector<double>& pts) { return generate_space(Json{{"type", "line"}, {"points", pts}}); }

QuasiMetricSpace strict_line() {
  return generate_space(Json{{"type", "geometric_line"}, {"levels", 3}, {"delta", 1.0 / 144}});
}

QuasiMetricSpace cloud(std::uint64_t seed, std::size_t n = 80) {
  return generate_space(Json{{"type", "euclidean_cloud"}, {"n", n}, {"dim", 2}, {"box", 1.0}, {"seed", seed}});
}

// Conflict pairs, neighbour lists and labels recomputed from the definitions.
void check_against_oracle(const QuasiMetricSpace& s, const LabeledHierarchy& lab) {
  const double c0 = lab.c0();
  for (const LevelLabels& lv : lab.levels) {
    const auto& pts = lab.nets.at(lv.k);
    const auto& next = lab.nets.at(lv.k + 1);
    std::set<std::pair<std::uint32_t, std::uint32_t>> conf;
    for (std::uint32_t a = 0; a < pts.size(); ++a)
      for (std::uint32_t b = a + 1; b < pts.size(); ++b)
        if (s.distance(pts[a], pts[b]) < c0 * lab.nets.scale(lv.k - 1)) conf.insert({a, b});
    CHECK(std::set<std::pair<std::uint32_t, std::uint32_t>>(lv.conflicts.begin(), lv.conflicts.end()) == conf);

    std::vector<std::vector<int>> adj(pts.size());
    for (std::uint32_t a = 0; a < pts.size(); ++a)
      for (std::uint32_t b = 0; b < pts.size(); ++b) {
        if (a == b) continue;
        bool nb = false;
        for (std::uint32_t g : lv.children[a])
          for (std::uint32_t h : lv.children[b]) nb = nb || s.distance(next[g], next[h]) < c0 * lab.nets.scale(lv.k);
        if (nb) adj[a].push_back(static_cast<int>(b));
      }
    for (std::uint32_t a = 0; a < pts.size(); ++a)
      CHECK(std::vector<int>(lv.neighbours[a].begin(), lv.neighbours[a].end()) == adj[a]);
    CHECK(lv.primary == oracle::greedy_colors(adj));
  }
}

}  // namespace

TEST_CASE("greedy coloring of a path") {
  CHECK(oracle::greedy_colors({{1}, {0, 2}, {1}}) == std::vector<int>{0, 1, 0});
  CHECK(oracle::greedy_colors({{}, {}, {}}) == std::vector<int>{0, 0, 0});
}

TEST_CASE("line example near child and duplex labels") {
  const auto s = line_space({0, 1, 3, 7});
  const auto lab = build_labels(s, build_reference_hierarchy(s, 0.25, Mode::Exploratory));
  const LevelLabels& lv = lab.at(-1);
  CHECK(lv.children[0] == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(lv.near_child[0] == 0);
  CHECK(lv.near_children[0] == std::vector<std::uint32_t>{0});
  for (int m = 1; m <= 3; ++m) CHECK(lv.duplex(static_cast<std::uint32_t>(m - 1)) == DuplexLabel{lv.primary[0], m});
  CHECK(lab.M == 3);
  check_against_oracle(s, lab);
}

TEST_CASE("labels agree with brute force") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto s = cloud(seed);
    const auto lab = build_labels(s, build_reference_hierarchy(s, 0.25, Mode::Exploratory));
    check_against_oracle(s, lab);
    const auto rep = verify_labels(s, lab);
    CHECK(rep.find("primary_not_neighbours")->passed());
    CHECK(rep.find("sibling_duplex_distinct")->passed());
    CHECK(rep.find("label_bounds")->passed());
  }
  const auto s = strict_line();
  const auto lab = build_labels(s, build_reference_hierarchy(s, 1.0 / 144, Mode::Strict));
  check_against_oracle(s, lab);
  CHECK(verify_labels(s, lab).passed());
  CHECK(lab.L == 0);
  CHECK(lab.M == 3);
  CHECK(lab.K() == 3);
}

TEST_CASE("phi is the lexicographic bijection") {
  LabeledHierarchy lab;
  lab.L = 1;
  lab.M = 2;
  CHECK(lab.K() == 4);
  CHECK(lab.phi({0, 1}) == 1);
  CHECK(lab.phi({0, 2}) == 2);
  CHECK(lab.phi({1, 1}) == 3);
  CHECK(lab.phi({1, 2}) == 4);
  for (int t = 1; t <= 4; ++t) CHECK(lab.phi(lab.phi_inv(t)) == t);
}

TEST_CASE("specific rule picks the labeled child or the near child") {
  const auto s = cloud(5);
  const auto lab = build_labels(s, build_reference_hierarchy(s, 0.25, Mode::Exploratory));
  for (const LevelLabels& lv : lab.levels)
    for (std::uint32_t a = 0; a < lv.children.size(); ++a) {
      // A label no parent carries always falls back to the near child.
      CHECK(specific_choice(lv, a, {lab.L + 1, 1}) == lv.near_child[a]);
      for (std::uint32_t b : lv.children[a]) CHECK(specific_choice(lv, a, lv.duplex(b)) == b);
    }
}

TEST_CASE("every rule yields separated covering centers in strict mode") {
  const auto s = strict_line();
  const auto lab = build_labels(s, build_reference_hierarchy(s, 1.0 / 144, Mode::Strict));
  for (int t = 1; t <= lab.K(); ++t) {
    const auto out = select_points(lab, SelectionRule::specific(lab.phi_inv(t)));
    CHECK(verify_new_point_axioms(s, out, lab.a0, lab.delta(), lab.mode()).passed());
  }
  RandomStream rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> master;
    for (int k = lab.k_min(); k < lab.k_max(); ++k) master.push_back(static_cast<int>(rng.below(lab.L + 1)));
    const auto out = select_points(lab, SelectionRule::general(master, [&](int, std::uint32_t, const auto& ch) {
                                     return ch[rng.below(ch.size())];
                                   }));
    CHECK(verify_new_point_axioms(s, out, lab.a0, lab.delta(), lab.mode()).passed());
  }
}

TEST_CASE("distinguished rule keeps x0 as a center") {
  const auto s = strict_line();
  const PointId x0 = 13;
  const auto lab = build_labels(s, build_reference_hierarchy(s, 1.0 / 144, Mode::Strict, x0));
  for (int t = 1; t <= lab.K(); ++t) {
    const auto out = select_points(lab, SelectionRule::specific_distinguished(lab.phi_inv(t), x0));
    for (const auto& lv : out.centers) CHECK(lv.front() == x0);
    CHECK(verify_new_point_axioms(s, out, lab.a0, lab.delta(), lab.mode()).passed());
  }
  const auto plain = build_labels(s, build_reference_hierarchy(s, 1.0 / 144, Mode::Strict));
  CHECK_THROWS_AS(select_points(plain, SelectionRule::specific_distinguished({0, 1}, x0)), Error);
}

TEST_CASE("general rule rejects a chooser that returns a non-child") {
  const auto s = strict_line();
  const auto lab = build_labels(s, build_reference_hierarchy(s, 1.0 / 144, Mode::Strict));
  std::vector<int> master(static_cast<std::size_t>(lab.k_max() - lab.k_min()), 0);
  CHECK_THROWS_AS(select_points(lab, SelectionRule::general(master, [](int, std::uint32_t, const auto&) {
                                  return std::uint32_t{100000};
                                })),
                  Error);
}

TEST_CASE("label constraint") {
  CHECK(satisfies_label_constraint(1.0, 1.0 / 96));
  CHECK_FALSE(satisfies_label_constraint(1.0, 1.0 / 95));
}
