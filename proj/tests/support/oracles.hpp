#pragma once
// Brute-force reference implementations used to cross-check the library.
// They work on plain distance callbacks and share no code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using Dist = std::function<double(int, int)>;
using Set = std::vector<int>;

inline Dist line(const std::vector<double>& xs) {
  return [xs](int a, int b) { return std::abs(xs[a] - xs[b]); };
}

inline double triangle_constant(int n, const Dist& d) {
  double best = 1.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        if (x == y) continue;
        const double s = d(x, z) + d(z, y);
        if (s > 0) best = std::max(best, d(x, y) / s);
      }
  return best;
}

inline Set ball(int n, const Dist& d, int c, double r) {
  Set out;
  for (int y = 0; y < n; ++y)
    if (d(y, c) < r) out.push_back(y);
  return out;
}

// Every distinct ball, from every center and every radius between or above
// the realized distances.
inline std::set<Set> all_balls(int n, const Dist& d) {
  std::set<double> ds;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) ds.insert(d(a, b));
  std::vector<double> radii;
  double prev = 0.0;
  for (double v : ds) {
    if (v > 0) radii.push_back((prev + v) / 2), radii.push_back(v);
    prev = v;
  }
  radii.push_back(2 * prev + 1);
  std::set<Set> out;
  for (int c = 0; c < n; ++c)
    for (double r : radii) out.insert(ball(n, d, c, r));
  return out;
}

// Greedy net in the given insertion order.
inline Set greedy_net(const Set& order, const Dist& d, double sep) {
  Set net;
  for (int x : order) {
    bool ok = true;
    for (int y : net) ok = ok && d(x, y) >= sep;
    if (ok) net.push_back(x);
  }
  return net;
}

// Parent index of each child: unique tight candidate, else smallest-index loose one, -1 if none.
inline std::vector<int> parents(const Set& coarse, const Set& fine, const Dist& d, double tight, double loose) {
  std::vector<int> out;
  for (int c : fine) {
    int t = -1, tcount = 0, l = -1;
    for (int a = 0; a < static_cast<int>(coarse.size()); ++a) {
      const double v = d(c, coarse[a]);
      if (v < tight) t = a, ++tcount;
      if (v < loose && l < 0) l = a;
    }
    out.push_back(tcount == 1 ? t : l);
  }
  return out;
}

// Members of each coarse cube given a chain of parent maps from coarse to finest.
// levels[i] are point ids; maps[i][b] is the parent in levels[i] of levels[i+1][b].
inline std::vector<Set> cubes_at(const std::vector<Set>& levels, const std::vector<std::vector<int>>& maps,
                                 std::size_t level) {
  std::vector<Set> out(levels[level].size());
  const std::size_t last = levels.size() - 1;
  for (std::size_t b = 0; b < levels[last].size(); ++b) {
    int idx = static_cast<int>(b);
    for (std::size_t i = last; i > level; --i) idx = maps[i - 1][idx];
    out[idx].push_back(levels[last][b]);
  }
  for (Set& s : out) std::sort(s.begin(), s.end());
  return out;
}

inline Set boundary_zone(int n, const Dist& d, const Set& cube, double eps) {
  Set out;
  for (int x : cube) {
    double m = std::numeric_limits<double>::infinity();
    for (int y = 0; y < n; ++y)
      if (!std::binary_search(cube.begin(), cube.end(), y)) m = std::min(m, d(x, y));
    if (m <= eps) out.push_back(x);
  }
  return out;
}

// Greedy coloring in vertex order with smallest unused value from 0.
inline std::vector<int> greedy_colors(const std::vector<std::vector<int>>& adj) {
  std::vector<int> c(adj.size(), -1);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    std::set<int> used;
    for (int u : adj[v])
      if (c[u] >= 0) used.insert(c[u]);
    int x = 0;
    while (used.count(x)) ++x;
    c[v] = x;
  }
  return c;
}

inline double mass(const Set& s, const std::vector<double>& mu, const std::vector<double>* w = nullptr) {
  double m = 0;
  for (int x : s) m += mu[x] * (w ? (*w)[x] : 1.0);
  return m;
}

inline double avg_abs(const Set& s, const std::vector<double>& mu, const std::vector<double>& f,
                      const std::vector<double>* w = nullptr) {
  double num = 0;
  for (int x : s) num += std::abs(f[x]) * mu[x] * (w ? (*w)[x] : 1.0);
  return num / mass(s, mu, w);
}

inline double osc(const Set& s, const std::vector<double>& mu, const std::vector<double>& f, bool signed_mean = true) {
  double a = 0;
  for (int x : s) a += (signed_mean ? f[x] : std::abs(f[x])) * mu[x];
  a /= mass(s, mu);
  double o = 0;
  for (int x : s) o += std::abs(f[x] - a) * mu[x];
  return o / mass(s, mu);
}

// Supremum over sets in the family containing x.
inline std::vector<double> maximal(int n, const std::vector<Set>& family, const std::function<double(const Set&)>& val) {
  std::vector<double> out(n, 0.0);
  for (const Set& s : family) {
    const double v = val(s);
    for (int x : s) out[x] = std::max(out[x], v);
  }
  return out;
}

inline double sup(const std::vector<Set>& family, const std::function<double(const Set&)>& val) {
  double best = 0.0;
  for (const Set& s : family) best = std::max(best, val(s));
  return best;
}

inline double ap(const std::vector<Set>& family, const std::vector<double>& mu, const std::vector<double>& w, double p) {
  std::vector<double> sigma(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) sigma[i] = std::pow(w[i], -1.0 / (p - 1));
  return sup(family, [&](const Set& s) {
    return mass(s, mu, &w) * std::pow(mass(s, mu, &sigma), p - 1) / std::pow(mass(s, mu), p);
  });
}

// sup over x and radii r of mu(B(x, 2r)) / mu(B(x, r)), radii sampled between and at realized distances.
inline double doubling(int n, const Dist& d, const std::vector<double>& mu) {
  std::set<double> ds;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) ds.insert(d(a, b));
  std::vector<double> radii;
  double prev = 0.0;
  for (double v : ds) radii.push_back((prev + v) / 2), radii.push_back(v), prev = v;
  double best = 1.0;
  for (int x = 0; x < n; ++x)
    for (double r : radii) best = std::max(best, mass(ball(n, d, x, 2 * r), mu) / mass(ball(n, d, x, r), mu));
  return best;
}

}  // namespace oracle
