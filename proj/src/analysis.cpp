#include "cubeforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cubeforge/error.hpp"

namespace cubeforge {

namespace {

constexpr double kSlack = 1e-12;

bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + kSlack) + kSlack; }

void check_sizes(const Measure& mu, std::size_t n, const char* what) {
  if (mu.size() != n) throw Error(ErrorKind::PreconditionFail, std::string(what) + ": measure size mismatch");
  for (double w : mu.weights)
    if (!(w > 0) || !std::isfinite(w)) throw Error(ErrorKind::PreconditionFail, "measure weights must be positive");
}

void check_function(const std::vector<double>& f, std::size_t n, const char* what) {
  if (f.size() != n) throw Error(ErrorKind::PreconditionFail, std::string(what) + ": function size mismatch");
}

// Mean of |f - f_S| over a point set, with f_S per the convention.
template <typename Range>
double oscillation(const Range& pts, const Measure& mu, const std::vector<double>& f, MeanConvention mean) {
  double mass = 0.0, sum = 0.0;
  for (PointId y : pts) {
    mass += mu.weights[y];
    sum += (mean == MeanConvention::Signed ? f[y] : std::abs(f[y])) * mu.weights[y];
  }
  const double avg = sum / mass;
  double dev = 0.0;
  for (PointId y : pts) dev += std::abs(f[y] - avg) * mu.weights[y];
  return dev / mass;
}

template <typename Range>
double weighted_average(const Range& pts, const Measure& mu, const std::vector<double>& f,
                        const std::vector<double>* w) {
  double num = 0.0, den = 0.0;
  for (PointId y : pts) {
    const double wy = w ? (*w)[y] * mu.weights[y] : mu.weights[y];
    num += std::abs(f[y]) * wy;
    den += wy;
  }
  return num / den;
}

template <typename Range>
double mass_of(const Range& pts, const Measure& mu, const std::vector<double>* w = nullptr) {
  double m = 0.0;
  for (PointId y : pts) m += w ? (*w)[y] * mu.weights[y] : mu.weights[y];
  return m;
}

std::vector<double> ball_maximal(const BallIndex& idx, const Measure& mu, const std::vector<double>& f,
                                 const std::vector<double>* w) {
  const std::size_t n = idx.size();
  std::vector<double> out(n, 0.0);
  std::vector<double> avg;
  for (PointId c = 0; c < n; ++c) {
    const auto order = idx.order(c);
    const auto sizes = idx.ball_sizes(c);
    avg.assign(sizes.size(), 0.0);
    double num = 0.0, den = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      for (; pos < sizes[i]; ++pos) {
        const PointId y = order[pos];
        const double wy = w ? (*w)[y] * mu.weights[y] : mu.weights[y];
        num += std::abs(f[y]) * wy;
        den += wy;
      }
      avg[i] = num / den;
    }
    for (std::size_t i = sizes.size(); i-- > 1;) avg[i - 1] = std::max(avg[i - 1], avg[i]);
    // Point at position p lies in every ball of size > p.
    std::size_t i = 0;
    for (std::size_t p = 0; p < n; ++p) {
      while (sizes[i] <= p) ++i;
      out[order[p]] = std::max(out[order[p]], avg[i]);
    }
  }
  return out;
}

std::vector<double> ball_sharp(const BallIndex& idx, const Measure& mu, const std::vector<double>& f,
                               MeanConvention mean) {
  const std::size_t n = idx.size();
  std::vector<double> out(n, 0.0);
  std::vector<double> osc;
  for (PointId c = 0; c < n; ++c) {
    const auto order = idx.order(c);
    const auto sizes = idx.ball_sizes(c);
    osc.assign(sizes.size(), 0.0);
    for (std::size_t i = 0; i < sizes.size(); ++i) osc[i] = oscillation(order.first(sizes[i]), mu, f, mean);
    for (std::size_t i = sizes.size(); i-- > 1;) osc[i - 1] = std::max(osc[i - 1], osc[i]);
    std::size_t i = 0;
    for (std::size_t p = 0; p < n; ++p) {
      while (sizes[i] <= p) ++i;
      out[order[p]] = std::max(out[order[p]], osc[i]);
    }
  }
  return out;
}

std::vector<double> dyadic_maximal(const CubeSystem& sys, const Measure& mu, const std::vector<double>& f,
                                   const std::vector<double>* w, bool sharp, MeanConvention mean) {
  std::vector<double> out(f.size(), 0.0);
  for (const CubeLevel& l : sys.levels) {
    for (std::uint32_t q = 0; q < l.cubes.size(); ++q) {
      const auto& mem = l.cubes[q].members;
      const double v = sharp ? oscillation(mem, mu, f, mean) : weighted_average(mem, mu, f, w);
      for (PointId x : mem) out[x] = std::max(out[x], v);
    }
  }
  return out;
}

double ap_of(const std::vector<PointId>& pts, const Measure& mu, const std::vector<double>& omega,
             const std::vector<double>& sigma, double p) {
  return mass_of(pts, mu, &omega) * std::pow(mass_of(pts, mu, &sigma), p - 1) / std::pow(mass_of(pts, mu), p);
}

}  // namespace

const char* to_string(MaximalVariant v) noexcept {
  switch (v) {
    case MaximalVariant::Ball: return "ball";
    case MaximalVariant::Dyadic: return "dyadic";
    case MaximalVariant::Sharp: return "sharp";
    case MaximalVariant::DyadicSharp: return "dyadic_sharp";
  }
  return "?";
}

const char* to_string(MeanConvention c) noexcept { return c == MeanConvention::Signed ? "signed" : "absolute"; }

MeanConvention mean_convention_from_string(const std::string& s) {
  if (s == "signed") return MeanConvention::Signed;
  if (s == "absolute") return MeanConvention::Absolute;
  throw Error(ErrorKind::ConfigError, "unknown mean convention: " + s);
}

DoublingReport doubling_constant(const QuasiMetricSpace& space, const Measure& mu) {
  const std::size_t n = space.size();
  check_sizes(mu, n, "doubling_constant");
  const BallIndex idx(space);
  DoublingReport rep;
  // prefix[c][p]: measure of the first p points in c's order.
  std::vector<std::vector<double>> prefix(n);
  for (PointId c = 0; c < n; ++c) {
    auto& pre = prefix[c];
    pre.assign(n + 1, 0.0);
    const auto order = idx.order(c);
    for (std::size_t p = 0; p < n; ++p) pre[p + 1] = pre[p] + mu.weights[order[p]];
    const auto d = idx.distances(c);
    // sup over r in (d_{i-1}, d_i] is attained at r = d_i.
    for (std::size_t i = 1; i < n; ++i) {
      if (d[i] == d[i - 1]) continue;
      const double inner = pre[idx.ball_size(c, d[i])];
      const double outer = pre[idx.ball_size(c, 2.0 * d[i])];
      rep.C_mu = std::max(rep.C_mu, outer / inner);
    }
  }
  rep.c_mu = std::log2(rep.C_mu);
  // Tightest instance of the growth bound: R just above d_j, r = d_i <= d_j.
  for (PointId c = 0; c < n; ++c) {
    const auto d = idx.distances(c);
    const auto sizes = idx.ball_sizes(c);
    for (std::size_t a = 0; a < sizes.size(); ++a) {
      const double r = d[sizes[a] < n ? sizes[a] : n - 1];
      if (sizes[a] == n) continue;
      const double small = prefix[c][sizes[a]];
      for (std::size_t b = a + 1; b < sizes.size(); ++b) {
        const double R = d[sizes[b] - 1];
        const double big = prefix[c][sizes[b]];
        ++rep.growth_checked;
        if (!within(big / small, rep.C_mu * std::pow(R / r, rep.c_mu))) ++rep.growth_violations;
      }
    }
  }
  return rep;
}

std::vector<double> maximal_function(const BallFamily& balls, const Measure& mu, const std::vector<double>& f,
                                     const MaximalOptions& o) {
  const std::size_t n = balls.index().size();
  check_sizes(mu, n, "maximal_function");
  check_function(f, n, "maximal_function");
  if (o.weight) check_function(*o.weight, n, "maximal_function weight");
  const bool dyadic = o.variant == MaximalVariant::Dyadic || o.variant == MaximalVariant::DyadicSharp;
  const bool sharp = o.variant == MaximalVariant::Sharp || o.variant == MaximalVariant::DyadicSharp;
  if (dyadic && !o.system) throw Error(ErrorKind::PreconditionFail, "dyadic maximal function needs a cube system");
  if (sharp && o.weight) throw Error(ErrorKind::PreconditionFail, "sharp maximal function is unweighted");
  if (dyadic) return dyadic_maximal(*o.system, mu, f, o.weight, sharp, o.mean);
  return sharp ? ball_sharp(balls.index(), mu, f, o.mean) : ball_maximal(balls.index(), mu, f, o.weight);
}

std::vector<double> maximal_function(const QuasiMetricSpace& space, const Measure& mu, const std::vector<double>& f,
                                     const MaximalOptions& options) {
  return maximal_function(BallFamily(space), mu, f, options);
}

double ap_constant(const BallFamily& balls, const Measure& mu, const std::vector<double>& omega, double p,
                   const CubeSystem* system) {
  const std::size_t n = balls.index().size();
  check_sizes(mu, n, "ap_constant");
  check_function(omega, n, "ap_constant");
  if (!(p > 1)) throw Error(ErrorKind::PreconditionFail, "A_p needs p > 1");
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(omega[i] > 0)) throw Error(ErrorKind::PreconditionFail, "weight must be positive");
    sigma[i] = std::pow(omega[i], -1.0 / (p - 1));
  }
  double best = 0.0;
  if (system) {
    for (const CubeLevel& l : system->levels)
      for (const Cube& q : l.cubes) best = std::max(best, ap_of(q.members, mu, omega, sigma, p));
    return best;
  }
  const BallIndex& idx = balls.index();
  for (PointId c = 0; c < n; ++c) {
    const auto order = idx.order(c);
    double m = 0.0, w = 0.0, s = 0.0;
    std::size_t pos = 0;
    for (std::size_t size : idx.ball_sizes(c)) {
      for (; pos < size; ++pos) {
        const PointId y = order[pos];
        m += mu.weights[y];
        w += omega[y] * mu.weights[y];
        s += sigma[y] * mu.weights[y];
      }
      best = std::max(best, w * std::pow(s, p - 1) / std::pow(m, p));
    }
  }
  return best;
}

double ap_constant(const QuasiMetricSpace& space, const Measure& mu, const std::vector<double>& omega, double p,
                   const CubeSystem* system) {
  return ap_constant(BallFamily(space), mu, omega, p, system);
}

double bmo_norm(const BallFamily& balls, const Measure& mu, const std::vector<double>& f, const CubeSystem* system,
                MeanConvention mean) {
  const std::size_t n = balls.index().size();
  check_sizes(mu, n, "bmo_norm");
  check_function(f, n, "bmo_norm");
  double best = 0.0;
  if (system) {
    for (const CubeLevel& l : system->levels)
      for (const Cube& q : l.cubes) best = std::max(best, oscillation(q.members, mu, f, mean));
    return best;
  }
  const BallIndex& idx = balls.index();
  for (PointId c = 0; c < n; ++c)
    for (std::size_t size : idx.ball_sizes(c)) best = std::max(best, oscillation(idx.order(c).first(size), mu, f, mean));
  return best;
}

double bmo_norm(const QuasiMetricSpace& space, const Measure& mu, const std::vector<double>& f,
                const CubeSystem* system, MeanConvention mean) {
  return bmo_norm(BallFamily(space), mu, f, system, mean);
}

double lp_norm(const std::vector<double>& f, const std::vector<double>& w, const Measure& mu, double p) {
  if (f.size() != mu.size() || w.size() != mu.size())
    throw Error(ErrorKind::PreconditionFail, "lp_norm: size mismatch");
  if (!(p >= 1)) throw Error(ErrorKind::PreconditionFail, "lp_norm needs p >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p) * w[i] * mu.weights[i];
  return std::pow(s, 1.0 / p);
}

ComparabilityConstants comparability_constants(const QuasiMetricSpace& space, const Measure& mu,
                                               const AdjacentFamily& family) {
  const DoublingReport d = doubling_constant(space, mu);
  const CubeConstants& k = family.system(1).constants;
  ComparabilityConstants c;
  c.C_mu = d.C_mu;
  c.c_mu = d.c_mu;
  c.cube_to_ball = d.C_mu * std::pow(k.C1 / k.c1, d.c_mu);
  c.ball_to_cube = d.C_mu * std::pow(family.C, d.c_mu);
  return c;
}

VerificationReport verify_comparability(const QuasiMetricSpace& space, const LabeledHierarchy& labeled,
                                        const AdjacentFamily& family, const Measure& mu,
                                        const std::vector<std::vector<double>>& fs, MeanConvention mean) {
  const std::size_t n = space.size();
  check_sizes(mu, n, "verify_comparability");
  const BallFamily balls(space);
  const BallIndex& idx = balls.index();
  const ComparabilityConstants cc = comparability_constants(space, mu, family);
  const bool strict = labeled.mode() == Mode::Strict;

  VerificationReport report;
  report.subject = "maximal comparability";
  CheckResult& doubling = report.add("doubling_growth");
  CheckResult& cube_ball = report.add("cube_in_ball_measure", strict);
  CheckResult& ball_cube = report.add("ball_in_cube_measure", strict);
  CheckResult& d_le_m = report.add("dyadic_le_ball");
  CheckResult& m_le_d = report.add("ball_le_dyadic_sum");
  CheckResult& ds_le_ms = report.add("dyadic_sharp_le_sharp");
  CheckResult& ms_le_ds = report.add("sharp_le_dyadic_sharp_sum");

  const DoublingReport dr = doubling_constant(space, mu);
  doubling.checked = dr.growth_checked;
  for (std::size_t i = 0; i < dr.growth_violations; ++i) doubling.fail({"growth", {}, 0, 0});
  doubling.metrics = {{"C_mu", cc.C_mu}, {"c_mu", cc.c_mu}};

  double worst_cb = 0.0;
  for (int t = 1; t <= family.K; ++t) {
    const CubeSystem& s = family.system(t);
    for (const CubeLevel& l : s.levels) {
      const double R = s.constants.C1 * s.scale(l.k);
      for (std::uint32_t q = 0; q < l.cubes.size(); ++q) {
        const Cube& cube = l.cubes[q];
        const double mq = mass_of(cube.members, mu);
        const double mb = mass_of(idx.order(cube.center).first(idx.ball_size(cube.center, R)), mu);
        ++cube_ball.checked;
        worst_cb = std::max(worst_cb, mb / mq);
        if (!within(mb, cc.cube_to_ball * mq)) cube_ball.fail({"ball_heavy", {t, l.k, q}, mb / mq, cc.cube_to_ball});
      }
    }
  }
  cube_ball.metrics = {{"worst_ratio", worst_cb}, {"C_a", cc.cube_to_ball}};

  double worst_bc = 0.0;
  for (PointId c = 0; c < n; ++c) {
    const auto d = idx.distances(c);
    const auto order = idx.order(c);
    for (std::size_t size : idx.ball_sizes(c)) {
      const double lo = std::nextafter(d[size - 1], std::numeric_limits<double>::infinity());
      const double hi = size < n ? d[size] : 2.0 * std::max(d[n - 1], lo);
      const auto ball = order.first(size);
      const double mb = mass_of(ball, mu);
      for (double r : {lo, hi}) {
        const ContainingCube found = find_containing_cube(space, labeled, family, c, r);
        const CubeLevel& l = family.system(found.t).level(found.k);
        const Cube& q = l.cubes[found.cube];
        ++ball_cube.checked;
        bool inside = true;
        for (PointId y : ball) inside = inside && l.cube_of[y] == found.cube;
        if (!inside) {
          ball_cube.fail({"ball_not_inside", {c, found.t, found.k, found.cube}, r, 0});
          continue;
        }
        const double mq = mass_of(q.members, mu);
        worst_bc = std::max(worst_bc, mq / mb);
        if (!within(mq, cc.ball_to_cube * mb))
          ball_cube.fail({"cube_heavy", {c, found.t, found.k, found.cube}, mq / mb, cc.ball_to_cube});
      }
    }
  }
  ball_cube.metrics = {{"worst_ratio", worst_bc}, {"C_a_prime", cc.ball_to_cube}};

  double w1 = 0, w2 = 0, w3 = 0, w4 = 0;
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    const auto& f = fs[fi];
    check_function(f, n, "verify_comparability");
    const auto M = maximal_function(balls, mu, f, {MaximalVariant::Ball, nullptr, nullptr, mean});
    const auto Ms = maximal_function(balls, mu, f, {MaximalVariant::Sharp, nullptr, nullptr, mean});
    std::vector<double> sum(n, 0.0), sum_s(n, 0.0);
    for (int t = 1; t <= family.K; ++t) {
      const CubeSystem* s = &family.system(t);
      const auto D = maximal_function(balls, mu, f, {MaximalVariant::Dyadic, s, nullptr, mean});
      const auto Ds = maximal_function(balls, mu, f, {MaximalVariant::DyadicSharp, s, nullptr, mean});
      for (PointId x = 0; x < n; ++x) {
        sum[x] += D[x];
        sum_s[x] += Ds[x];
        ++d_le_m.checked;
        ++ds_le_ms.checked;
        if (M[x] > 0) w1 = std::max(w1, D[x] / M[x]);
        if (Ms[x] > 0) w3 = std::max(w3, Ds[x] / Ms[x]);
        if (!within(D[x], cc.cube_to_ball * M[x]))
          d_le_m.fail({"dyadic_exceeds", {static_cast<std::int64_t>(fi), x, t}, D[x], cc.cube_to_ball * M[x]});
        if (!within(Ds[x], 2.0 * cc.cube_to_ball * Ms[x]))
          ds_le_ms.fail({"dyadic_sharp_exceeds", {static_cast<std::int64_t>(fi), x, t}, Ds[x],
                         2.0 * cc.cube_to_ball * Ms[x]});
      }
    }
    for (PointId x = 0; x < n; ++x) {
      ++m_le_d.checked;
      ++ms_le_ds.checked;
      if (sum[x] > 0) w2 = std::max(w2, M[x] / sum[x]);
      if (sum_s[x] > 0) w4 = std::max(w4, Ms[x] / sum_s[x]);
      if (!within(M[x], cc.ball_to_cube * sum[x]))
        m_le_d.fail({"ball_exceeds", {static_cast<std::int64_t>(fi), x}, M[x], cc.ball_to_cube * sum[x]});
      if (!within(Ms[x], 2.0 * cc.ball_to_cube * sum_s[x]))
        ms_le_ds.fail({"sharp_exceeds", {static_cast<std::int64_t>(fi), x}, Ms[x], 2.0 * cc.ball_to_cube * sum_s[x]});
    }
  }
  d_le_m.metrics = {{"worst_ratio", w1}, {"bound", cc.cube_to_ball}};
  m_le_d.metrics = {{"worst_ratio", w2}, {"bound", cc.ball_to_cube}};
  ds_le_ms.metrics = {{"worst_ratio", w3}, {"bound", 2.0 * cc.cube_to_ball}};
  ms_le_ds.metrics = {{"worst_ratio", w4}, {"bound", 2.0 * cc.ball_to_cube}};
  d_le_m.note = std::string("mean convention: ") + to_string(mean);
  return report;
}

VerificationReport verify_weighted_bounds(const QuasiMetricSpace& space, const AdjacentFamily& family,
                                          const Measure& mu, const std::vector<double>& omega,
                                          const std::vector<double>& f, double p, MeanConvention mean) {
  const std::size_t n = space.size();
  check_sizes(mu, n, "verify_weighted_bounds");
  check_function(omega, n, "verify_weighted_bounds");
  check_function(f, n, "verify_weighted_bounds");
  if (!(p > 1)) throw Error(ErrorKind::PreconditionFail, "weighted bounds need p > 1");
  const BallFamily balls(space);
  const ComparabilityConstants cc = comparability_constants(space, mu, family);
  const double pp = p / (p - 1);

  VerificationReport report;
  report.subject = "weighted dyadic bounds";
  CheckResult& universal = report.add("weighted_dyadic_universal");
  CheckResult& buckley = report.add("buckley");
  CheckResult& bmo_d = report.add("bmo_dyadic_le_ball");
  CheckResult& bmo_b = report.add("bmo_ball_le_dyadic_sum");

  const double nf = lp_norm(f, omega, mu, p);
  const double bmo_ball = bmo_norm(balls, mu, f, nullptr, mean);
  double bmo_sum = 0.0;
  Json per_t = Json::array();
  for (int t = 1; t <= family.K; ++t) {
    const CubeSystem* s = &family.system(t);
    const auto Mw = maximal_function(balls, mu, f, {MaximalVariant::Dyadic, s, &omega, mean});
    const double lhs_u = lp_norm(Mw, omega, mu, p);
    ++universal.checked;
    if (!within(lhs_u, pp * nf)) universal.fail({"universal", {t}, lhs_u, pp * nf});

    const auto M = maximal_function(balls, mu, f, {MaximalVariant::Dyadic, s, nullptr, mean});
    const double ap = ap_constant(balls, mu, omega, p, s);
    const double bound = std::pow(ap, 1.0 / (p - 1)) * std::pow(p, 1.0 / (p - 1)) * pp * nf;
    const double lhs_b = lp_norm(M, omega, mu, p);
    ++buckley.checked;
    if (!within(lhs_b, bound)) buckley.fail({"buckley", {t}, lhs_b, bound});

    const double bt = bmo_norm(balls, mu, f, s, mean);
    bmo_sum += bt;
    ++bmo_d.checked;
    if (!within(bt, 2.0 * cc.cube_to_ball * bmo_ball)) bmo_d.fail({"bmo_dyadic", {t}, bt, 2.0 * cc.cube_to_ball * bmo_ball});
    per_t.push_back({{"t", t}, {"universal_lhs", lhs_u}, {"buckley_lhs", lhs_b}, {"buckley_bound", bound},
                     {"A_p", ap}, {"bmo", bt}});
  }
  ++bmo_b.checked;
  if (!within(bmo_ball, 2.0 * cc.ball_to_cube * bmo_sum))
    bmo_b.fail({"bmo_ball", {}, bmo_ball, 2.0 * cc.ball_to_cube * bmo_sum});
  universal.metrics = {{"p", p}, {"p_prime", pp}, {"f_norm", nf}, {"systems", per_t}};
  bmo_b.metrics = {{"bmo_ball", bmo_ball}, {"bmo_sum", bmo_sum}, {"C_a", cc.cube_to_ball}, {"C_a_prime", cc.ball_to_cube}};
  return report;
}

}  // namespace cubeforge
