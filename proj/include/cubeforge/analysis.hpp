#pragma once

#include <string>
#include <vector>

#include "cubeforge/adjacent.hpp"
#include "cubeforge/dyadic.hpp"
#include "cubeforge/labeling.hpp"
#include "cubeforge/metric_space.hpp"
#include "cubeforge/report.hpp"

namespace cubeforge {

/// Atomic measure with positive point masses.
struct Measure {
  std::vector<double> weights;

  static Measure counting(std::size_t n) { return {std::vector<double>(n, 1.0)}; }
  std::size_t size() const noexcept { return weights.size(); }
};

struct DoublingReport {
  double C_mu = 1.0;
  double c_mu = 0.0;
  std::size_t growth_checked = 0;
  std::size_t growth_violations = 0;
};

/// C_mu = max mu(B(x,2r)) / mu(B(x,r)) over centers and realized radii, and
/// an exhaustive check of mu(B(x,R)) / mu(B(x,r)) <= C_mu (R/r)^{c_mu}.
DoublingReport doubling_constant(const QuasiMetricSpace& space, const Measure& mu);

enum class MaximalVariant { Ball, Dyadic, Sharp, DyadicSharp };
/// Signed: f_B is the mean of f. Absolute: the mean of |f|.
enum class MeanConvention { Signed, Absolute };

const char* to_string(MaximalVariant v) noexcept;
const char* to_string(MeanConvention c) noexcept;
MeanConvention mean_convention_from_string(const std::string& s);

/// Every distinct ball as a (center, size) prefix of the center's distance order.
class BallFamily {
 public:
  explicit BallFamily(const QuasiMetricSpace& space) : index_(space) {}
  const BallIndex& index() const noexcept { return index_; }

 private:
  BallIndex index_;
};

struct MaximalOptions {
  MaximalVariant variant = MaximalVariant::Ball;
  /// Required by the dyadic variants.
  const CubeSystem* system = nullptr;
  /// Weighted averages of |f| against weight * mu; not used by sharp variants.
  const std::vector<double>* weight = nullptr;
  MeanConvention mean = MeanConvention::Signed;
};

std::vector<double> maximal_function(const BallFamily& balls, const Measure& mu, const std::vector<double>& f,
                                     const MaximalOptions& options);
std::vector<double> maximal_function(const QuasiMetricSpace& space, const Measure& mu, const std::vector<double>& f,
                                     const MaximalOptions& options);

/// sup over balls (system == nullptr) or cubes of omega(B) sigma(B)^{p-1} / mu(B)^p.
double ap_constant(const BallFamily& balls, const Measure& mu, const std::vector<double>& omega, double p,
                   const CubeSystem* system = nullptr);
double ap_constant(const QuasiMetricSpace& space, const Measure& mu, const std::vector<double>& omega, double p,
                   const CubeSystem* system = nullptr);

/// sup over balls (system == nullptr) or cubes of the mean of |f - f_B|.
double bmo_norm(const BallFamily& balls, const Measure& mu, const std::vector<double>& f,
                const CubeSystem* system = nullptr, MeanConvention mean = MeanConvention::Signed);
double bmo_norm(const QuasiMetricSpace& space, const Measure& mu, const std::vector<double>& f,
                const CubeSystem* system = nullptr, MeanConvention mean = MeanConvention::Signed);

/// (sum |f|^p w mu)^{1/p}.
double lp_norm(const std::vector<double>& f, const std::vector<double>& w, const Measure& mu, double p);

/// Comparability constants: C_a = C_mu (C_1/c_1)^{c_mu} bounds mu(B_Q)/mu(Q),
/// C_a' = C_mu C^{c_mu} bounds mu(Q_B)/mu(B).
struct ComparabilityConstants {
  double C_mu = 1.0;
  double c_mu = 0.0;
  double cube_to_ball = 1.0;
  double ball_to_cube = 1.0;
};

ComparabilityConstants comparability_constants(const QuasiMetricSpace& space, const Measure& mu,
                                               const AdjacentFamily& family);

/// Measure comparability of cubes and balls, then for every sample f, point
/// and system the four pointwise maximal inequalities with those constants.
VerificationReport verify_comparability(const QuasiMetricSpace& space, const LabeledHierarchy& labeled,
                                        const AdjacentFamily& family, const Measure& mu,
                                        const std::vector<std::vector<double>>& sample_functions,
                                        MeanConvention mean = MeanConvention::Signed);

/// Universal dyadic bound, the Buckley chain with the dyadic A_p constant, and
/// BMO equivalence, for one (omega, f, p).
VerificationReport verify_weighted_bounds(const QuasiMetricSpace& space, const AdjacentFamily& family,
                                          const Measure& mu, const std::vector<double>& omega,
                                          const std::vector<double>& f, double p,
                                          MeanConvention mean = MeanConvention::Signed);

}  // namespace cubeforge
