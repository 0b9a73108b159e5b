#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cubeforge/adjacent.hpp"
#include "cubeforge/dyadic.hpp"
#include "cubeforge/labeling.hpp"
#include "cubeforge/rng.hpp"

namespace cubeforge {

enum class SamplerVariant { Single, Adjacent, AdjacentRefined };

const char* to_string(SamplerVariant v) noexcept;
SamplerVariant sampler_variant_from_string(const std::string& s);

/// 96 A_0^6 delta <= 1, with rounding slack.
bool satisfies_random_constraint(double a0, double delta) noexcept;

/// Samplable probability space over choices of new centers. Holds references;
/// the space and labeled hierarchy must outlive it.
class OmegaSampler {
 public:
  OmegaSampler(const QuasiMetricSpace& space, const LabeledHierarchy& labeled, SamplerVariant variant);

  const QuasiMetricSpace& space() const noexcept { return *space_; }
  const LabeledHierarchy& labeled() const noexcept { return *labeled_; }
  SamplerVariant variant() const noexcept { return variant_; }

  /// ((L+1)M)^{-1} for the single variant, 1/K for the adjacent ones.
  double tau0() const noexcept;
  /// log(1 - tau_0) / log(delta).
  double eta() const noexcept;
  /// 4 A_0^2 (c_1 delta)^{-1} with c_1 = (3A_0^2)^{-1} c_0, c_0 = (4A_0^2)^{-1}.
  double C2() const noexcept;
  Json describe(std::uint64_t seed) const;

 private:
  const QuasiMetricSpace* space_;
  const LabeledHierarchy* labeled_;
  SamplerVariant variant_;
};

/// Seed of sample i under a master seed, and of one level within a sample.
inline std::uint64_t sample_seed(std::uint64_t master, std::uint64_t sample) noexcept {
  return derive_seed(master, {sample});
}
inline std::uint64_t level_seed(std::uint64_t sample, int level_index) noexcept {
  return derive_seed(sample, {static_cast<std::uint64_t>(level_index)});
}

/// One coordinate omega_k of the single variant: master label and a child per parent.
struct SingleLevelDraw {
  int master = 0;
  std::vector<std::uint32_t> choice;

  bool operator==(const SingleLevelDraw&) const = default;
};
using SingleOmega = std::vector<SingleLevelDraw>;

/// One coordinate of the adjacent variants: cyclic shift T_k and, refined only,
/// per-parent ordinal shifts m_{k,alpha}.
struct AdjacentLevelDraw {
  int T = 1;
  std::vector<int> shift;

  bool operator==(const AdjacentLevelDraw&) const = default;
};
using AdjacentOmega = std::vector<AdjacentLevelDraw>;

SingleLevelDraw draw_single_level(const LabeledHierarchy& labeled, int k, RandomStream& rng);
SingleOmega draw_single_omega(const LabeledHierarchy& labeled, std::uint64_t seed);
SelectionOutcome realize_single(const LabeledHierarchy& labeled, const SingleOmega& omega);

AdjacentLevelDraw draw_adjacent_level(const LabeledHierarchy& labeled, int k, bool refined, RandomStream& rng);
AdjacentOmega draw_adjacent_omega(const LabeledHierarchy& labeled, bool refined, std::uint64_t seed);
/// Child chosen for (k, alpha) in system t under the given level draw.
std::uint32_t adjacent_choice(const LabeledHierarchy& labeled, int k, std::uint32_t alpha, int t,
                              const AdjacentLevelDraw& draw, bool refined);
SelectionOutcome realize_adjacent(const LabeledHierarchy& labeled, const AdjacentOmega& omega, int t, bool refined);

/// Single variant: the system of omega drawn from `seed`.
CubeSystem sample_system(const OmegaSampler& sampler, std::uint64_t seed);
/// Any variant: the single system, or system t of the sampled adjacent family.
CubeSystem sample_cube_system(const OmegaSampler& sampler, std::uint64_t seed, int t = 1);
/// Adjacent variants: all K systems for one omega.
AdjacentFamily sample_adjacent_family(const OmegaSampler& sampler, std::uint64_t seed);

/// Exact P(z_alpha^k = x_beta^{k+1}) for each child beta of alpha, in
/// children order; `t` is used by the adjacent variants.
std::vector<double> exact_selection_marginal(const OmegaSampler& sampler, int k, std::uint32_t alpha, int t = 1);

/// Empirical child distribution of z_alpha^k over N samples, in children order.
std::vector<std::size_t> sample_selection_counts(const OmegaSampler& sampler, int k, std::uint32_t alpha,
                                                 std::size_t N, std::uint64_t master, int t = 1);

struct SelectionEstimate {
  int k = 0;
  std::uint32_t alpha = 0;
  std::uint32_t beta = 0;
  int t = 1;
  std::size_t N = 0;
  std::size_t hits = 0;
  double frequency = 0.0;
  double tau0 = 0.0;
  /// tau_0 - 3 sqrt(tau_0 (1 - tau_0) / N).
  double threshold = 0.0;
  double exact = 0.0;
  bool pass = false;
};

SelectionEstimate estimate_selection_probability(const OmegaSampler& sampler, int k, std::uint32_t alpha,
                                                 std::uint32_t beta, std::size_t N, std::uint64_t master, int t = 1);

/// Pearson goodness-of-fit p-value; categories with zero probability must be empty.
double chi_square_p_value(const std::vector<std::size_t>& counts, const std::vector<double>& probs);

/// One-sided 95% Wilson upper bound for a binomial proportion.
double wilson_upper_95(std::size_t hits, std::size_t N) noexcept;

struct BoundaryEstimate {
  PointId x = 0;
  int k = 0;
  double tau = 0.0;
  std::size_t N = 0;
  std::size_t hits = 0;
  double p_hat = 0.0;
  double wilson_upper = 0.0;
  double bound = 0.0;
  bool pass = false;

  bool operator==(const BoundaryEstimate&) const = default;
};

/// Every (x, k, tau) combination estimated from the same N sampled systems.
std::vector<BoundaryEstimate> boundary_sweep(const OmegaSampler& sampler, const std::vector<PointId>& xs,
                                             const std::vector<int>& ks, const std::vector<double>& taus,
                                             std::size_t N, std::uint64_t master, int t = 1);

BoundaryEstimate estimate_boundary_probability(const OmegaSampler& sampler, PointId x, int k, double tau,
                                               std::size_t N, std::uint64_t master, int t = 1);

/// (12 A_0^4)^{-1} c_0.
double chain_epsilon(const CubeSystem& system) noexcept;

/// Walks the cubes containing x from level k to k + depth and asserts
/// rho(z^j, z^i) >= epsilon_1 delta^j for k <= j < i <= k + depth.
VerificationReport check_chain_separation(const QuasiMetricSpace& space, const CubeSystem& system, PointId x, int k,
                                          double tau, int depth);

struct ChainQuery {
  PointId x = 0;
  int k = 0;
  int depth = 0;
  double tau = 0.0;
};

/// Every (x, k, depth >= 1) with rho(x, complement) < tau delta^k at the
/// largest admissible tau = c_0 delta^depth / (12 A_0^4) and k + depth <= k_max.
std::vector<ChainQuery> admissible_chains(const QuasiMetricSpace& space, const CubeSystem& system);

Json to_json(const BoundaryEstimate& e);
Json to_json(const SelectionEstimate& e);

}  // namespace cubeforge
