#include "cubeforge/random_systems.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "cubeforge/error.hpp"

namespace cubeforge {

const char* to_string(SamplerVariant v) noexcept {
  switch (v) {
    case SamplerVariant::Single:
      return "single";
    case SamplerVariant::Adjacent:
      return "adjacent";
    case SamplerVariant::AdjacentRefined:
      return "adjacent_refined";
  }
  return "single";
}

SamplerVariant sampler_variant_from_string(const std::string& s) {
  if (s == "single") return SamplerVariant::Single;
  if (s == "adjacent") return SamplerVariant::Adjacent;
  if (s == "adjacent_refined") return SamplerVariant::AdjacentRefined;
  throw Error(ErrorKind::ConfigError, "unknown sampler variant '" + s + "'");
}

bool satisfies_random_constraint(double a0, double delta) noexcept {
  return 96.0 * std::pow(a0, 6) * delta <= 1.0 + 1e-9;
}

OmegaSampler::OmegaSampler(const QuasiMetricSpace& space, const LabeledHierarchy& labeled, SamplerVariant variant)
    : space_(&space), labeled_(&labeled), variant_(variant) {
  if (labeled.mode() == Mode::Strict && !satisfies_random_constraint(labeled.a0, labeled.delta()))
    throw Error(ErrorKind::ModeViolation, "strict sampling requires 96 A_0^6 delta <= 1");
}

// ((L+1)M)^{-1} and 1/K coincide because K = (L+1)M.
double OmegaSampler::tau0() const noexcept { return 1.0 / labeled_->K(); }

double OmegaSampler::eta() const noexcept { return std::log(1.0 - tau0()) / std::log(labeled_->delta()); }

double OmegaSampler::C2() const noexcept {
  const double a0 = labeled_->a0;
  const double c1 = labeled_->c0() / (3.0 * a0 * a0);
  return 4.0 * a0 * a0 / (c1 * labeled_->delta());
}

Json OmegaSampler::describe(std::uint64_t seed) const {
  return {{"variant", to_string(variant_)}, {"seed", seed}, {"tau_0", tau0()}, {"eta", eta()}, {"C_2", C2()},
          {"L", labeled_->L}, {"M", labeled_->M}, {"K", labeled_->K()}};
}

SingleLevelDraw draw_single_level(const LabeledHierarchy& lab, int k, RandomStream& rng) {
  const LevelLabels& lv = lab.at(k);
  SingleLevelDraw d;
  d.master = static_cast<int>(rng.below(static_cast<std::uint64_t>(lab.L) + 1));
  d.choice.resize(lv.primary.size());
  for (std::uint32_t a = 0; a < d.choice.size(); ++a) {
    const auto& pool = lv.primary[a] == d.master ? lv.children[a] : lv.near_children[a];
    d.choice[a] = pool[rng.below(pool.size())];
  }
  return d;
}

SingleOmega draw_single_omega(const LabeledHierarchy& lab, std::uint64_t seed) {
  SingleOmega omega;
  for (std::size_t i = 0; i < lab.levels.size(); ++i) {
    RandomStream rng(level_seed(seed, static_cast<int>(i)));
    omega.push_back(draw_single_level(lab, lab.levels[i].k, rng));
  }
  return omega;
}

SelectionOutcome realize_single(const LabeledHierarchy& lab, const SingleOmega& omega) {
  if (omega.size() != lab.levels.size()) throw Error(ErrorKind::PreconditionFail, "omega does not match the levels");
  SelectionOutcome out;
  out.rule = "random_single";
  out.k_min = lab.k_min();
  for (const SingleLevelDraw& d : omega) out.chosen.push_back(d.choice);
  out.centers = centers_from_choices(lab, out.chosen);
  return out;
}

AdjacentLevelDraw draw_adjacent_level(const LabeledHierarchy& lab, int k, bool refined, RandomStream& rng) {
  AdjacentLevelDraw d;
  d.T = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(lab.K())));
  if (refined) {
    const LevelLabels& lv = lab.at(k);
    d.shift.resize(lv.children.size());
    for (std::size_t a = 0; a < d.shift.size(); ++a) d.shift[a] = 1 + static_cast<int>(rng.below(lv.children[a].size()));
  }
  return d;
}

AdjacentOmega draw_adjacent_omega(const LabeledHierarchy& lab, bool refined, std::uint64_t seed) {
  AdjacentOmega omega;
  for (std::size_t i = 0; i < lab.levels.size(); ++i) {
    RandomStream rng(level_seed(seed, static_cast<int>(i)));
    omega.push_back(draw_adjacent_level(lab, lab.levels[i].k, refined, rng));
  }
  return omega;
}

std::uint32_t adjacent_choice(const LabeledHierarchy& lab, int k, std::uint32_t alpha, int t,
                              const AdjacentLevelDraw& draw, bool refined) {
  const LevelLabels& lv = lab.at(k);
  const int K = lab.K();
  const int s = (t + draw.T - 1) % K + 1;
  DuplexLabel label = lab.phi_inv(s);
  if (refined && lv.primary[alpha] == label.primary) {
    const int Ma = static_cast<int>(lv.children[alpha].size());
    label.ordinal = (label.ordinal + draw.shift[alpha] - 1) % Ma + 1;
  }
  return specific_choice(lv, alpha, label);
}

SelectionOutcome realize_adjacent(const LabeledHierarchy& lab, const AdjacentOmega& omega, int t, bool refined) {
  if (omega.size() != lab.levels.size()) throw Error(ErrorKind::PreconditionFail, "omega does not match the levels");
  SelectionOutcome out;
  out.rule = std::string(refined ? "random_adjacent_refined" : "random_adjacent") + "(t=" + std::to_string(t) + ")";
  out.k_min = lab.k_min();
  for (std::size_t i = 0; i < lab.levels.size(); ++i) {
    const LevelLabels& lv = lab.levels[i];
    std::vector<std::uint32_t> pick(lv.primary.size());
    for (std::uint32_t a = 0; a < pick.size(); ++a) pick[a] = adjacent_choice(lab, lv.k, a, t, omega[i], refined);
    out.chosen.push_back(std::move(pick));
  }
  out.centers = centers_from_choices(lab, out.chosen);
  return out;
}

CubeSystem sample_system(const OmegaSampler& sampler, std::uint64_t seed) {
  if (sampler.variant() != SamplerVariant::Single)
    throw Error(ErrorKind::PreconditionFail, "sample_system needs the single variant");
  const LabeledHierarchy& lab = sampler.labeled();
  return build_new_point_system(sampler.space(), lab, realize_single(lab, draw_single_omega(lab, seed)).centers);
}

CubeSystem sample_cube_system(const OmegaSampler& sampler, std::uint64_t seed, int t) {
  if (sampler.variant() == SamplerVariant::Single) return sample_system(sampler, seed);
  const LabeledHierarchy& lab = sampler.labeled();
  const bool refined = sampler.variant() == SamplerVariant::AdjacentRefined;
  const AdjacentOmega omega = draw_adjacent_omega(lab, refined, seed);
  return build_new_point_system(sampler.space(), lab, realize_adjacent(lab, omega, t, refined).centers);
}

AdjacentFamily sample_adjacent_family(const OmegaSampler& sampler, std::uint64_t seed) {
  if (sampler.variant() == SamplerVariant::Single)
    throw Error(ErrorKind::PreconditionFail, "sample_adjacent_family needs an adjacent variant");
  const LabeledHierarchy& lab = sampler.labeled();
  const bool refined = sampler.variant() == SamplerVariant::AdjacentRefined;
  const AdjacentOmega omega = draw_adjacent_omega(lab, refined, seed);
  std::vector<SelectionOutcome> sel;
  for (int t = 1; t <= lab.K(); ++t) sel.push_back(realize_adjacent(lab, omega, t, refined));
  return assemble_family(sampler.space(), lab, std::move(sel), std::nullopt);
}

std::vector<double> exact_selection_marginal(const OmegaSampler& sampler, int k, std::uint32_t alpha, int) {
  const LabeledHierarchy& lab = sampler.labeled();
  const LevelLabels& lv = lab.at(k);
  const auto& ch = lv.children.at(alpha);
  const double nc = static_cast<double>(ch.size());
  const double K = lab.K();
  std::vector<double> p(ch.size(), 0.0);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const bool is_near_child = ch[i] == lv.near_child[alpha];
    switch (sampler.variant()) {
      case SamplerVariant::Single: {
        const auto& nr = lv.near_children[alpha];
        const bool in_near = std::find(nr.begin(), nr.end(), ch[i]) != nr.end();
        p[i] = 1.0 / ((lab.L + 1) * nc) + (in_near ? lab.L / ((lab.L + 1.0) * nr.size()) : 0.0);
        break;
      }
      case SamplerVariant::Adjacent:
        p[i] = (1.0 + (is_near_child ? K - nc : 0.0)) / K;
        break;
      case SamplerVariant::AdjacentRefined:
        p[i] = lab.M / (K * nc) + (is_near_child ? 1.0 - lab.M / K : 0.0);
        break;
    }
  }
  return p;
}

std::vector<std::size_t> sample_selection_counts(const OmegaSampler& sampler, int k, std::uint32_t alpha,
                                                 std::size_t N, std::uint64_t master, int t) {
  const LabeledHierarchy& lab = sampler.labeled();
  const LevelLabels& lv = lab.at(k);
  const auto& ch = lv.children.at(alpha);
  const int li = k - lab.k_min();
  const bool refined = sampler.variant() == SamplerVariant::AdjacentRefined;
  std::vector<std::size_t> counts(ch.size(), 0);
  for (std::size_t i = 0; i < N; ++i) {
    RandomStream rng(level_seed(sample_seed(master, i), li));
    std::uint32_t beta;
    if (sampler.variant() == SamplerVariant::Single) {
      beta = draw_single_level(lab, k, rng).choice[alpha];
    } else {
      beta = adjacent_choice(lab, k, alpha, t, draw_adjacent_level(lab, k, refined, rng), refined);
    }
    const auto it = std::find(ch.begin(), ch.end(), beta);
    if (it == ch.end()) throw Error(ErrorKind::BuildError, "sampled center is not a child");
    ++counts[static_cast<std::size_t>(it - ch.begin())];
  }
  return counts;
}

SelectionEstimate estimate_selection_probability(const OmegaSampler& sampler, int k, std::uint32_t alpha,
                                                 std::uint32_t beta, std::size_t N, std::uint64_t master, int t) {
  const LevelLabels& lv = sampler.labeled().at(k);
  const auto& ch = lv.children.at(alpha);
  const auto it = std::find(ch.begin(), ch.end(), beta);
  if (it == ch.end())
    throw Error(ErrorKind::NotAChild, "(" + std::to_string(k + 1) + ", " + std::to_string(beta) + ") is not a child of (" +
                                          std::to_string(k) + ", " + std::to_string(alpha) + ")");
  const std::size_t idx = static_cast<std::size_t>(it - ch.begin());
  SelectionEstimate e;
  e.k = k;
  e.alpha = alpha;
  e.beta = beta;
  e.t = t;
  e.N = N;
  e.hits = sample_selection_counts(sampler, k, alpha, N, master, t)[idx];
  e.frequency = N ? static_cast<double>(e.hits) / N : 0.0;
  e.tau0 = sampler.tau0();
  e.threshold = e.tau0 - 3.0 * std::sqrt(e.tau0 * (1.0 - e.tau0) / static_cast<double>(N));
  e.exact = exact_selection_marginal(sampler, k, alpha, t)[idx];
  e.pass = e.frequency >= e.threshold;
  return e;
}

double chi_square_p_value(const std::vector<std::size_t>& counts, const std::vector<double>& probs) {
  if (counts.size() != probs.size()) throw Error(ErrorKind::PreconditionFail, "count and probability sizes differ");
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  int categories = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (counts[i] > 0) return 0.0;
      continue;
    }
    ++categories;
    const double expected = total * probs[i];
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  if (categories <= 1) return 1.0;
  const boost::math::chi_squared_distribution<double> dist(categories - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double wilson_upper_95(std::size_t hits, std::size_t N) noexcept {
  if (N == 0) return 1.0;
  constexpr double z = 1.6448536269514722;
  const double n = static_cast<double>(N);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double centre = p + z2 / (2 * n);
  const double spread = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return std::min(1.0, (centre + spread) / (1 + z2 / n));
}

namespace {

// rho(x, complement of the level-k cube containing x), with X above the window
// and singletons below it.
double boundary_distance(const QuasiMetricSpace& space, const CubeSystem& sys, PointId x, int k) {
  if (k < sys.k_min) return kInfinity;
  if (k > sys.k_max()) {
    double best = kInfinity;
    for (PointId y = 0; y < space.size(); ++y)
      if (y != x) best = std::min(best, space.distance(x, y));
    return best;
  }
  const CubeLevel& lvl = sys.level(k);
  return distance_to_complement(space, lvl, lvl.cube_of[x], x);
}

}  // namespace

std::vector<BoundaryEstimate> boundary_sweep(const OmegaSampler& sampler, const std::vector<PointId>& xs,
                                             const std::vector<int>& ks, const std::vector<double>& taus,
                                             std::size_t N, std::uint64_t master, int t) {
  const double delta = sampler.labeled().delta();
  std::vector<BoundaryEstimate> out;
  for (PointId x : xs)
    for (int k : ks)
      for (double tau : taus) {
        if (!(tau > 0)) throw Error(ErrorKind::PreconditionFail, "tau must be positive");
        if (x >= sampler.space().size()) throw Error(ErrorKind::PreconditionFail, "point out of range");
        BoundaryEstimate e;
        e.x = x;
        e.k = k;
        e.tau = tau;
        e.N = N;
        out.push_back(e);
      }
  for (std::size_t i = 0; i < N; ++i) {
    const CubeSystem sys = sample_cube_system(sampler, sample_seed(master, i), t);
    std::size_t idx = 0;
    for (PointId x : xs)
      for (int k : ks) {
        const double d = boundary_distance(sampler.space(), sys, x, k);
        for (std::size_t j = 0; j < taus.size(); ++j, ++idx)
          if (d <= taus[j] * scale(delta, k)) ++out[idx].hits;
      }
  }
  for (BoundaryEstimate& e : out) {
    e.p_hat = N ? static_cast<double>(e.hits) / N : 0.0;
    e.wilson_upper = wilson_upper_95(e.hits, N);
    e.bound = sampler.C2() * std::pow(e.tau, sampler.eta());
    e.pass = e.wilson_upper <= e.bound;
  }
  return out;
}

BoundaryEstimate estimate_boundary_probability(const OmegaSampler& sampler, PointId x, int k, double tau,
                                               std::size_t N, std::uint64_t master, int t) {
  return boundary_sweep(sampler, {x}, {k}, {tau}, N, master, t).front();
}

double chain_epsilon(const CubeSystem& sys) noexcept {
  const double a0 = sys.a0;
  return sys.constants.c0 / (12.0 * a0 * a0 * a0 * a0);
}

VerificationReport check_chain_separation(const QuasiMetricSpace& space, const CubeSystem& sys, PointId x, int k,
                                          double tau, int depth) {
  const double a0 = sys.a0;
  const double c0 = sys.constants.c0;
  const double C0 = sys.constants.C0;
  if (!(18.0 * std::pow(a0, 5) * C0 * sys.delta <= c0 * (1 + 1e-9)))
    throw Error(ErrorKind::PreconditionFail, "chain separation requires 18 A_0^5 C_0 delta <= c_0");
  if (depth < 0 || !(tau > 0) || !(12.0 * std::pow(a0, 4) * tau <= c0 * scale(sys.delta, depth) * (1 + 1e-12)))
    throw Error(ErrorKind::PreconditionFail, "chain separation requires 12 A_0^4 tau <= c_0 delta^N");
  if (k < sys.k_min || k + depth > sys.k_max())
    throw Error(ErrorKind::PreconditionFail, "chain leaves the level window");
  if (x >= space.size()) throw Error(ErrorKind::PreconditionFail, "point out of range");
  const double d = boundary_distance(space, sys, x, k);
  if (!(d < tau * scale(sys.delta, k)))
    throw Error(ErrorKind::PreconditionFail, "point is not in the boundary zone of its cube");

  VerificationReport report;
  report.subject = "chain separation";
  CheckResult& c = report.add("chain_separation", sys.mode == Mode::Strict);
  const double eps1 = chain_epsilon(sys);
  std::vector<PointId> z;
  for (int j = k; j <= k + depth; ++j) z.push_back(sys.cube_containing(x, j).center);
  for (int j = k; j <= k + depth; ++j)
    for (int i = j + 1; i <= k + depth; ++i) {
      ++c.checked;
      const double dz = space.distance(z[j - k], z[i - k]);
      const double bound = eps1 * scale(sys.delta, j);
      if (!(dz >= bound)) c.fail({"chain_jump", {x, j, i}, dz, bound});
    }
  c.metrics = {{"x", x}, {"k", k}, {"depth", depth}, {"tau", tau}, {"boundary_distance", d}};
  return report;
}

std::vector<ChainQuery> admissible_chains(const QuasiMetricSpace& space, const CubeSystem& sys) {
  std::vector<ChainQuery> out;
  const double a0 = sys.a0;
  const double c0 = sys.constants.c0;
  for (int k = sys.k_min; k < sys.k_max(); ++k)
    for (PointId x = 0; x < space.size(); ++x) {
      const double d = boundary_distance(space, sys, x, k);
      for (int depth = 1; k + depth <= sys.k_max(); ++depth) {
        const double tau = c0 * scale(sys.delta, depth) / (12.0 * std::pow(a0, 4));
        if (!(d < tau * scale(sys.delta, k))) break;
        out.push_back({x, k, depth, tau});
      }
    }
  return out;
}

Json to_json(const BoundaryEstimate& e) {
  return {{"x", e.x},     {"k", e.k},
          {"tau", e.tau}, {"N", e.N},
          {"hits", e.hits}, {"p_hat", e.p_hat},
          {"wilson_upper", e.wilson_upper}, {"bound_C2_tau_eta", e.bound},
          {"pass", e.pass}};
}

Json to_json(const SelectionEstimate& e) {
  return {{"k", e.k},         {"alpha", e.alpha},         {"beta", e.beta},   {"t", e.t},
          {"N", e.N},         {"hits", e.hits},           {"frequency", e.frequency},
          {"tau_0", e.tau0},  {"threshold", e.threshold}, {"exact", e.exact}, {"pass", e.pass}};
}

}  // namespace cubeforge
