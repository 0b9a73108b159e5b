#include "cubeforge/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cubeforge/error.hpp"

namespace cubeforge {

bool satisfies_label_constraint(double a0, double delta) noexcept {
  return 96.0 * std::pow(a0, 8) * delta <= 1.0 + 1e-9;
}

LabeledHierarchy build_labels(const QuasiMetricSpace& space, NetHierarchy nets) {
  const double a0 = space.profile().a0;
  if (nets.mode == Mode::Strict && !satisfies_label_constraint(a0, nets.delta))
    throw Error(ErrorKind::ModeViolation, "strict mode requires 96 A_0^8 delta <= 1");
  LabeledHierarchy lab;
  lab.a0 = a0;
  lab.reference_order = build_partial_order(space, nets.levels, nets.k_min, nets.delta, a0, 1.0, 1.0, nets.mode);
  lab.nets = std::move(nets);
  const NetHierarchy& h = lab.nets;
  const double c0 = lab.c0();

  for (int k = h.k_min; k < h.k_max; ++k) {
    LevelLabels lv;
    lv.k = k;
    const auto& pts = h.at(k);
    const auto& next = h.at(k + 1);
    lv.children = lab.reference_order.children(k);
    lv.children.resize(pts.size());
    lv.parent.resize(next.size());
    lv.ordinal.resize(next.size());
    for (std::uint32_t a = 0; a < pts.size(); ++a)
      for (std::size_t i = 0; i < lv.children[a].size(); ++i) {
        lv.parent[lv.children[a][i]] = a;
        lv.ordinal[lv.children[a][i]] = static_cast<int>(i) + 1;
      }

    const double conflict_r = c0 * h.scale(k - 1);
    for (std::uint32_t a = 0; a < pts.size(); ++a)
      for (std::uint32_t b = a + 1; b < pts.size(); ++b)
        if (space.distance(pts[a], pts[b]) < conflict_r) lv.conflicts.emplace_back(a, b);

    // Neighbours: some pair of their children is closer than c_0 delta^k.
    const double child_r = c0 * h.scale(k);
    std::vector<std::vector<char>> adj(pts.size(), std::vector<char>(pts.size(), 0));
    for (std::uint32_t g = 0; g < next.size(); ++g)
      for (std::uint32_t s = g + 1; s < next.size(); ++s) {
        const std::uint32_t pa = lv.parent[g], pb = lv.parent[s];
        if (pa == pb || adj[pa][pb]) continue;
        if (space.distance(next[g], next[s]) < child_r) adj[pa][pb] = adj[pb][pa] = 1;
      }
    lv.neighbours.resize(pts.size());
    for (std::uint32_t a = 0; a < pts.size(); ++a)
      for (std::uint32_t b = 0; b < pts.size(); ++b)
        if (adj[a][b]) lv.neighbours[a].push_back(b);

    lv.primary.assign(pts.size(), -1);
    for (std::uint32_t a = 0; a < pts.size(); ++a) {
      std::vector<char> used(lv.neighbours[a].size() + 1, 0);
      for (std::uint32_t b : lv.neighbours[a]) {
        const int l = lv.primary[b];
        if (l >= 0 && static_cast<std::size_t>(l) < used.size()) used[l] = 1;
      }
      int l = 0;
      while (used[l]) ++l;
      lv.primary[a] = l;
      lab.L = std::max(lab.L, l);
    }

    const double near_r = h.scale(k + 1);
    lv.near_child.resize(pts.size());
    lv.near_children.resize(pts.size());
    for (std::uint32_t a = 0; a < pts.size(); ++a) {
      const auto& ch = lv.children[a];
      if (ch.empty()) throw Error(ErrorKind::BuildError, "reference point without children");
      lab.M = std::max(lab.M, static_cast<int>(ch.size()));
      std::uint32_t best = ch.front();
      double best_d = kInfinity;
      for (std::uint32_t b : ch) {
        const double d = space.distance(next[b], pts[a]);
        if (d < best_d) {
          best_d = d;
          best = b;
        }
        if (d < near_r) lv.near_children[a].push_back(b);
      }
      if (!(best_d < near_r)) {
        if (h.mode == Mode::Strict)
          throw Error(ErrorKind::NoNearChild, "level " + std::to_string(k) + " point " + std::to_string(a) +
                                                  " has no child within delta^{k+1}");
        ++lab.near_fallbacks;
        lv.near_children[a].push_back(best);
      }
      lv.near_child[a] = best;
    }
    lab.levels.push_back(std::move(lv));
  }
  return lab;
}

VerificationReport verify_labels(const QuasiMetricSpace& space, const LabeledHierarchy& lab) {
  VerificationReport report;
  report.subject = "labels";
  CheckResult& primary = report.add("primary_not_neighbours");
  CheckResult& siblings = report.add("sibling_duplex_distinct");
  CheckResult& conflict = report.add("equal_primary_children_no_conflict");
  CheckResult& bounds = report.add("label_bounds");
  CheckResult& near = report.add("near_child", lab.mode() == Mode::Strict);
  const double c0 = lab.c0();
  for (const LevelLabels& lv : lab.levels) {
    const auto& next = lab.nets.at(lv.k + 1);
    for (std::uint32_t a = 0; a < lv.primary.size(); ++a) {
      ++bounds.checked;
      if (lv.primary[a] < 0 || lv.primary[a] > lab.L ||
          lv.primary[a] > static_cast<int>(lv.neighbours[a].size()))
        bounds.fail({"primary_out_of_range", {lv.k, a}, double(lv.primary[a]), double(lab.L)});
      for (std::uint32_t b : lv.neighbours[a]) {
        ++primary.checked;
        if (lv.primary[a] == lv.primary[b]) primary.fail({"equal_label_neighbours", {lv.k, a, b}, 0, 0});
      }
      std::vector<int> seen;
      for (std::uint32_t b : lv.children[a]) {
        ++siblings.checked;
        const int m = lv.ordinal[b];
        if (m < 1 || m > lab.M || std::find(seen.begin(), seen.end(), m) != seen.end())
          siblings.fail({"ordinal", {lv.k + 1, b}, double(m), double(lab.M)});
        seen.push_back(m);
      }
      ++near.checked;
      const double d = space.distance(next[lv.near_child[a]], lab.nets.at(lv.k)[a]);
      if (!(d < lab.nets.scale(lv.k + 1))) near.fail({"no_near_child", {lv.k, a}, d, lab.nets.scale(lv.k + 1)});
    }
    for (std::uint32_t g = 0; g < next.size(); ++g)
      for (std::uint32_t s = g + 1; s < next.size(); ++s) {
        if (lv.parent[g] == lv.parent[s] || lv.duplex(g).primary != lv.duplex(s).primary) continue;
        ++conflict.checked;
        const double d = space.distance(next[g], next[s]);
        if (d < c0 * lab.nets.scale(lv.k)) conflict.fail({"conflict", {lv.k + 1, g, s}, d, c0 * lab.nets.scale(lv.k)});
      }
  }
  return report;
}

SelectionRule SelectionRule::general(std::vector<int> master, Chooser chooser) {
  SelectionRule r;
  r.kind = Kind::General;
  r.master = std::move(master);
  r.chooser = std::move(chooser);
  return r;
}

SelectionRule SelectionRule::specific(DuplexLabel label) {
  SelectionRule r;
  r.kind = Kind::Specific;
  r.label = label;
  return r;
}

SelectionRule SelectionRule::specific_distinguished(DuplexLabel label, PointId x0) {
  SelectionRule r;
  r.kind = Kind::SpecificDistinguished;
  r.label = label;
  r.x0 = x0;
  return r;
}

std::string SelectionRule::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::General:
      os << "general";
      break;
    case Kind::Specific:
      os << "specific(" << label.primary << "," << label.ordinal << ")";
      break;
    case Kind::SpecificDistinguished:
      os << "specific_distinguished(" << label.primary << "," << label.ordinal << ";x0=" << x0 << ")";
      break;
  }
  return os.str();
}

std::uint32_t specific_choice(const LevelLabels& lv, std::uint32_t alpha, DuplexLabel label) {
  const auto& ch = lv.children[alpha];
  if (lv.primary[alpha] == label.primary && label.ordinal >= 1 && static_cast<std::size_t>(label.ordinal) <= ch.size())
    return ch[static_cast<std::size_t>(label.ordinal - 1)];
  return lv.near_child[alpha];
}

LevelPoints centers_from_choices(const LabeledHierarchy& lab, const std::vector<std::vector<std::uint32_t>>& chosen) {
  LevelPoints centers;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const auto& next = lab.nets.levels[i + 1];
    std::vector<PointId> z(chosen[i].size());
    for (std::size_t a = 0; a < z.size(); ++a) z[a] = next[chosen[i][a]];
    centers.push_back(std::move(z));
  }
  centers.push_back(lab.nets.levels.back());
  return centers;
}

SelectionOutcome select_points(const LabeledHierarchy& lab, const SelectionRule& rule) {
  SelectionOutcome out;
  out.rule = rule.describe();
  out.k_min = lab.k_min();
  if (rule.kind == SelectionRule::Kind::SpecificDistinguished) {
    if (!lab.nets.distinguished || *lab.nets.distinguished != rule.x0)
      throw Error(ErrorKind::PreconditionFail, "distinguished selection needs a hierarchy pinned at x0");
  }
  if (rule.kind == SelectionRule::Kind::General) {
    if (rule.master.size() != lab.levels.size())
      throw Error(ErrorKind::PreconditionFail, "general rule needs one master label per selection level");
    if (!rule.chooser) throw Error(ErrorKind::PreconditionFail, "general rule needs a chooser");
  }
  for (std::size_t i = 0; i < lab.levels.size(); ++i) {
    const LevelLabels& lv = lab.levels[i];
    std::vector<std::uint32_t> pick(lv.primary.size());
    for (std::uint32_t a = 0; a < pick.size(); ++a) {
      switch (rule.kind) {
        case SelectionRule::Kind::General:
          if (lv.primary[a] == rule.master[i]) {
            pick[a] = rule.chooser(lv.k, a, lv.children[a]);
            if (std::find(lv.children[a].begin(), lv.children[a].end(), pick[a]) == lv.children[a].end())
              throw Error(ErrorKind::NotAChild, "chooser returned a non-child at level " + std::to_string(lv.k));
          } else {
            pick[a] = lv.near_child[a];
          }
          break;
        case SelectionRule::Kind::Specific:
          pick[a] = specific_choice(lv, a, rule.label);
          break;
        case SelectionRule::Kind::SpecificDistinguished:
          // x0 sits at index 0 of every level and is its own tight child.
          pick[a] = a == 0 ? 0 : specific_choice(lv, a, rule.label);
          break;
      }
    }
    out.chosen.push_back(std::move(pick));
  }
  out.centers = centers_from_choices(lab, out.chosen);
  return out;
}

VerificationReport verify_new_point_axioms(const QuasiMetricSpace& space, const SelectionOutcome& outcome, double a0,
                                           double delta, Mode mode) {
  VerificationReport report;
  report.subject = "new points " + outcome.rule;
  const bool strict = mode == Mode::Strict;
  CheckResult& sep = report.add("new_point_separation", strict);
  CheckResult& cov = report.add("new_point_covering", strict);
  const double c0 = 1.0 / (4.0 * a0 * a0);
  const double C0 = 2.0 * a0;
  for (std::size_t i = 0; i < outcome.centers.size(); ++i) {
    const int k = outcome.k_min + static_cast<int>(i);
    const auto& z = outcome.centers[i];
    const double rs = c0 * scale(delta, k);
    const double rc = C0 * scale(delta, k);
    for (std::size_t a = 0; a < z.size(); ++a)
      for (std::size_t b = a + 1; b < z.size(); ++b) {
        ++sep.checked;
        const double d = space.distance(z[a], z[b]);
        if (!(d >= rs)) sep.fail({"separation", {k, static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)}, d, rs});
      }
    for (PointId x = 0; x < space.size(); ++x) {
      double best = kInfinity;
      for (PointId c : z) best = std::min(best, space.distance(x, c));
      ++cov.checked;
      if (!(best < rc)) cov.fail({"covering", {k, x}, best, rc});
    }
  }
  return report;
}

CubeSystem build_new_point_system(const QuasiMetricSpace& space, const LabeledHierarchy& lab,
                                  const LevelPoints& centers) {
  return build_dyadic_system(space, centers, lab.k_min(), lab.delta(), lab.a0, lab.c0(), lab.C0(), lab.mode());
}

Json to_json(const LabeledHierarchy& lab) {
  Json levels = Json::array();
  for (const LevelLabels& lv : lab.levels) {
    Json duplex = Json::array();
    for (std::uint32_t b = 0; b < lv.parent.size(); ++b) duplex.push_back({lv.duplex(b).primary, lv.duplex(b).ordinal});
    Json conflicts = Json::array();
    for (const auto& [a, b] : lv.conflicts) conflicts.push_back({a, b});
    Json neighbours = Json::array();
    for (std::uint32_t a = 0; a < lv.neighbours.size(); ++a)
      for (std::uint32_t b : lv.neighbours[a])
        if (a < b) neighbours.push_back({a, b});
    levels.push_back({{"k", lv.k},
                      {"labels", lv.primary},
                      {"duplex", std::move(duplex)},
                      {"conflicts", std::move(conflicts)},
                      {"neighbours", std::move(neighbours)},
                      {"near_child", lv.near_child}});
  }
  return {{"L", lab.L}, {"M", lab.M}, {"K", lab.K()}, {"near_fallbacks", lab.near_fallbacks},
          {"levels", std::move(levels)}};
}

}  // namespace cubeforge
