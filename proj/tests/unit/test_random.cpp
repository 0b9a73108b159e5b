#include <doctest.h>

#include <map>

#include "cubeforge/error.hpp"
#include "cubeforge/random_systems.hpp"

using namespace cubeforge;

namespace {

QuasiMetricSpace strict_line() {
  return generate_space(Json{{"type", "geometric_line"}, {"levels", 3}, {"delta", 1.0 / 144}});
}

struct Fixture {
  QuasiMetricSpace space = strict_line();
  LabeledHierarchy lab = build_labels(space, build_reference_hierarchy(space, 1.0 / 144, Mode::Strict));
};

// Exact single-variant law of z_alpha^k by enumerating the master label and
// the per-parent uniform choice.
std::map<std::uint32_t, double> enumerate_single(const LabeledHierarchy& lab, int k, std::uint32_t a) {
  const LevelLabels& lv = lab.at(k);
  std::map<std::uint32_t, double> p;
  for (int master = 0; master <= lab.L; ++master) {
    const auto& pool = lv.primary[a] == master ? lv.children[a] : lv.near_children[a];
    for (std::uint32_t b : pool) p[b] += 1.0 / (lab.L + 1) / static_cast<double>(pool.size());
  }
  return p;
}

// Exact adjacent law for system t by enumerating T (and the ordinal shift).
std::map<std::uint32_t, double> enumerate_adjacent(const LabeledHierarchy& lab, int k, std::uint32_t a, int t,
                                                   bool refined) {
  const LevelLabels& lv = lab.at(k);
  std::map<std::uint32_t, double> p;
  const int shifts = refined ? static_cast<int>(lv.children[a].size()) : 1;
  for (int T = 1; T <= lab.K(); ++T)
    for (int m = 1; m <= shifts; ++m) {
      AdjacentLevelDraw d;
      d.T = T;
      if (refined) d.shift.assign(lv.children.size(), m);
      p[adjacent_choice(lab, k, a, t, d, refined)] += 1.0 / lab.K() / shifts;
    }
  return p;
}

}  // namespace

TEST_CASE("sampler constants") {
  Fixture f;
  const OmegaSampler s(f.space, f.lab, SamplerVariant::Single);
  CHECK(s.tau0() == doctest::Approx(1.0 / 3));
  CHECK(s.C2() == doctest::Approx(48.0 * 144.0));
  CHECK(s.eta() == doctest::Approx(std::log(2.0 / 3) / std::log(1.0 / 144)));
}

TEST_CASE("sampling is seed deterministic") {
  Fixture f;
  for (auto v : {SamplerVariant::Single, SamplerVariant::Adjacent, SamplerVariant::AdjacentRefined}) {
    const OmegaSampler s(f.space, f.lab, v);
    CHECK(sample_cube_system(s, 42, 2) == sample_cube_system(s, 42, 2));
  }
  CHECK(draw_single_omega(f.lab, 9) == draw_single_omega(f.lab, 9));
}

TEST_CASE("sampled systems satisfy the axioms") {
  Fixture f;
  for (auto v : {SamplerVariant::Single, SamplerVariant::Adjacent, SamplerVariant::AdjacentRefined}) {
    const OmegaSampler s(f.space, f.lab, v);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const CubeSystem sys = sample_cube_system(s, seed, 1);
      CHECK(verify_cube_axioms(f.space, sys).passed());
    }
  }
  const OmegaSampler s(f.space, f.lab, SamplerVariant::Single);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = realize_single(f.lab, draw_single_omega(f.lab, seed));
    CHECK(verify_new_point_axioms(f.space, out, f.lab.a0, f.lab.delta(), f.lab.mode()).passed());
  }
}

TEST_CASE("sampled adjacent families cover") {
  Fixture f;
  for (auto v : {SamplerVariant::Adjacent, SamplerVariant::AdjacentRefined}) {
    const OmegaSampler s(f.space, f.lab, v);
    for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(verify_covering(f.space, f.lab, sample_adjacent_family(s, seed)).passed());
  }
}

TEST_CASE("K = 1 adjacent sampler equals the deterministic family") {
  const auto space = generate_space(Json{{"type", "line"}, {"points", {5.0}}});
  const auto lab = build_labels(space, build_reference_hierarchy(space, 1.0 / 144, Mode::Strict));
  REQUIRE(lab.K() == 1);
  const OmegaSampler s(space, lab, SamplerVariant::Adjacent);
  const auto fam = build_adjacent_family(space, lab);
  for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(sample_adjacent_family(s, seed).systems == fam.systems);
}

TEST_CASE("exact marginals match branch enumeration") {
  Fixture f;
  for (auto v : {SamplerVariant::Single, SamplerVariant::Adjacent, SamplerVariant::AdjacentRefined}) {
    const OmegaSampler s(f.space, f.lab, v);
    for (const LevelLabels& lv : f.lab.levels)
      for (std::uint32_t a = 0; a < lv.children.size(); ++a)
        for (int t = 1; t <= f.lab.K(); ++t) {
          const auto exact = exact_selection_marginal(s, lv.k, a, t);
          const auto brute = v == SamplerVariant::Single
                                 ? enumerate_single(f.lab, lv.k, a)
                                 : enumerate_adjacent(f.lab, lv.k, a, t, v == SamplerVariant::AdjacentRefined);
          double total = 0;
          for (std::size_t i = 0; i < exact.size(); ++i) {
            const auto it = brute.find(lv.children[a][i]);
            CHECK(exact[i] == doctest::Approx(it == brute.end() ? 0.0 : it->second));
            CHECK(exact[i] >= s.tau0() - 1e-12);
            total += exact[i];
          }
          CHECK(total == doctest::Approx(1.0));
        }
  }
}

TEST_CASE("selection estimates pass across master seeds") {
  Fixture f;
  const OmegaSampler s(f.space, f.lab, SamplerVariant::Single);
  const int k = f.lab.k_min() + 1;
  const LevelLabels& lv = f.lab.at(k);
  for (std::uint64_t master = 0; master < 20; ++master) {
    const auto e = estimate_selection_probability(s, k, 0, lv.children[0].front(), 10000, master);
    CHECK(e.pass);
  }
  CHECK_THROWS_AS(estimate_selection_probability(s, k, 0, 999, 1000, 0), Error);
}

TEST_CASE("chi square p-value") {
  CHECK(chi_square_p_value({50, 50}, {0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(chi_square_p_value({100, 0}, {0.5, 0.5}) < 1e-10);
  CHECK(chi_square_p_value({0, 10}, {0.0, 1.0}) == 1.0);
  CHECK(chi_square_p_value({1, 9}, {0.0, 1.0}) == 0.0);
}

TEST_CASE("wilson bound") {
  CHECK(wilson_upper_95(0, 10000) > 0.0);
  CHECK(wilson_upper_95(0, 10000) < 3.0 / 10000);
  CHECK(wilson_upper_95(10000, 10000) == doctest::Approx(1.0));
  for (std::size_t h : {1u, 10u, 500u, 9999u}) CHECK(wilson_upper_95(h, 10000) >= static_cast<double>(h) / 10000);
}

TEST_CASE("boundary estimates") {
  Fixture f;
  const OmegaSampler s(f.space, f.lab, SamplerVariant::Single);
  const auto rows = boundary_sweep(s, {0, 13}, {f.lab.k_min() + 1}, {0.1, 0.01, 0.001}, 2000, 5);
  CHECK(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.p_hat <= r.wilson_upper);
    CHECK(r.pass);
  }
  CHECK(estimate_boundary_probability(s, 0, f.lab.k_min(), 0.5, 1000, 1).hits == 0);
}

TEST_CASE("distinguished point at the top level is never in a boundary zone") {
  const auto space = strict_line();
  const auto lab = build_labels(space, build_reference_hierarchy(space, 1.0 / 144, Mode::Strict, PointId{7}));
  const OmegaSampler s(space, lab, SamplerVariant::Single);
  CHECK(estimate_boundary_probability(s, 7, lab.k_min(), 10.0, 1000, 3).hits == 0);
}

TEST_CASE("chain separation contract") {
  Fixture f;
  const OmegaSampler s(f.space, f.lab, SamplerVariant::Single);
  const CubeSystem sys = sample_cube_system(s, 1);
  // The center of a finest-level singleton is deep inside every cube.
  CHECK_THROWS_AS(check_chain_separation(f.space, sys, 0, sys.k_min + 1, 1e-6, 0), Error);
  for (const ChainQuery& q : admissible_chains(f.space, sys))
    CHECK(check_chain_separation(f.space, sys, q.x, q.k, q.tau, q.depth).passed());
}

TEST_CASE("resampling one level changes only that level's centers") {
  Fixture f;
  auto omega = draw_single_omega(f.lab, 11);
  const auto base = realize_single(f.lab, omega);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    auto changed = omega;
    RandomStream rng(12345 + i);
    changed[i] = draw_single_level(f.lab, f.lab.levels[i].k, rng);
    const auto out = realize_single(f.lab, changed);
    for (std::size_t j = 0; j < out.centers.size(); ++j)
      if (j != i) CHECK(out.centers[j] == base.centers[j]);
  }
}
