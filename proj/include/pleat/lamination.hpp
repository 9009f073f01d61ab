// Desk-scale combinatorial models of maximal geodesic laminations: finite
// zig-zag strips and single-generator invariant ladders, with separation
// orders, coherent labellings and the chordal boundary metric.
#pragma once

#include <array>
#include <optional>

#include "pleat/flags.hpp"

namespace pleat {

struct NotInModel : std::domain_error {
  using std::domain_error::domain_error;
};
struct TransverseLeaves : std::domain_error {
  using std::domain_error::domain_error;
};
struct NotSeparating : std::domain_error {
  using std::domain_error::domain_error;
};
struct OverlappingPlaques : std::domain_error {
  using std::domain_error::domain_error;
};
struct SeparationHypothesisFails : std::domain_error {
  using std::domain_error::domain_error;
};

inline constexpr double kPointTol = 1e-9;

inline bool same_point(const IdealPoint& a, const IdealPoint& b) {
  return d_inf(a, b) < kPointTol;
}

// Unoriented geodesic with distinct ideal endpoints.
struct Leaf {
  IdealPoint a, b;
  Leaf() = default;
  Leaf(IdealPoint x, IdealPoint y) : a(x), b(y) {}
  bool same(const Leaf& o) const {
    return (same_point(a, o.a) && same_point(b, o.b)) ||
           (same_point(a, o.b) && same_point(b, o.a));
  }
  bool has_endpoint(const IdealPoint& p) const {
    return same_point(a, p) || same_point(b, p);
  }
};

// Oriented geodesic: forward endpoint fwd, backward endpoint bwd.
struct OrientedLeaf {
  IdealPoint fwd, bwd;
  Leaf unoriented() const { return Leaf(fwd, bwd); }
  OrientedLeaf reversed() const { return {bwd, fwd}; }
};

// Stable identifier: strips use side = -1 and n = index; ladders use
// side 0 (upper fan) or 1 (lower fan) and n = block index.
struct PlaqueId {
  int side = -1;
  long n = 0;
  friend bool operator==(const PlaqueId& a, const PlaqueId& b) {
    return a.side == b.side && a.n == b.n;
  }
  friend bool operator<(const PlaqueId& a, const PlaqueId& b) {
    return std::tie(a.side, a.n) < std::tie(b.side, b.n);
  }
};

// Ideal triangle with a stable id. Vertices stored counter-clockwise.
struct Plaque {
  PlaqueId id;
  std::array<IdealPoint, 3> v;

  Leaf edge(int k) const { return Leaf(v[k % 3], v[(k + 1) % 3]); }
  std::array<Leaf, 3> edges() const { return {edge(0), edge(1), edge(2)}; }
  bool has_vertex(const IdealPoint& p) const {
    return same_point(v[0], p) || same_point(v[1], p) || same_point(v[2], p);
  }
  // The vertex off the given edge.
  IdealPoint opposite_vertex(const Leaf& e) const {
    for (int k = 0; k < 3; ++k)
      if (!e.has_endpoint(v[k])) return v[k];
    throw std::logic_error("opposite_vertex: edge not on plaque");
  }
};

inline std::array<IdealPoint, 3> ccw_sorted(std::array<IdealPoint, 3> v) {
  if (!cyclic_order(v[0], v[1], v[2])) std::swap(v[1], v[2]);
  return v;
}

// True iff x lies strictly inside the arc running counter-clockwise from u
// to v.
inline bool in_arc_ccw(const IdealPoint& u, const IdealPoint& x, const IdealPoint& v) {
  return cyclic_order(u, x, v);
}

// Weak sides of a leaf: +1 side is the ccw arc from h.a to h.b. An endpoint
// of h itself lies on both closed sides.
inline bool weakly_on_side(const Leaf& h, const Leaf& g, int side) {
  auto ok = [&](const IdealPoint& p) {
    if (same_point(p, h.a) || same_point(p, h.b)) return true;
    bool plus = in_arc_ccw(h.a, p, h.b);
    return side > 0 ? plus : !plus;
  };
  return ok(g.a) && ok(g.b);
}

// A leaf h separates non-crossing g1 and g2 when they lie weakly on opposite
// closed sides of h.
inline bool leaf_separates(const Leaf& h, const Leaf& g1, const Leaf& g2) {
  return (weakly_on_side(h, g1, +1) && weakly_on_side(h, g2, -1)) ||
         (weakly_on_side(h, g1, -1) && weakly_on_side(h, g2, +1));
}

// A plaque separates g1 and g2 when two of its edges do.
inline bool plaque_separates(const Plaque& t, const Leaf& g1, const Leaf& g2) {
  int count = 0;
  for (const Leaf& e : t.edges())
    if (leaf_separates(e, g1, g2)) ++count;
  return count >= 2;
}

// Total order on leaves separating (g1, g2): h1 <= h2 iff h1 separates g1
// and h2.
inline bool leaf_leq(const Leaf& h1, const Leaf& h2, const Leaf& g1) {
  if (h1.same(h2)) return true;
  return leaf_separates(h1, g1, h2);
}

// Coherent labelling of a separating plaque: x2 is the common endpoint of
// the two separating edges, x1 lies on the edge nearer g1, x3 on the edge
// nearer g2.
struct CoherentLabel {
  IdealPoint x1, x2, x3;
  Leaf h_minus, h_plus;
  double gap() const { return d_inf(x1, x3); }
  // Orientation of the labelling: true when x3 < x2 < x1 counter-clockwise.
  bool reversed_ccw() const { return cyclic_order(x3, x2, x1); }
  std::array<IdealPoint, 3> points() const { return {x1, x2, x3}; }
};

inline CoherentLabel coherent_labelling(const Plaque& t, const Leaf& g1,
                                        const Leaf& g2) {
  std::array<Leaf, 3> es = t.edges();
  std::vector<Leaf> sep;
  for (const Leaf& e : es)
    if (leaf_separates(e, g1, g2)) sep.push_back(e);
  if (sep.size() != 2) throw NotSeparating("coherent_labelling: plaque does not separate");
  Leaf hm = sep[0], hp = sep[1];
  if (!leaf_leq(hm, hp, g1)) std::swap(hm, hp);
  CoherentLabel out;
  out.h_minus = hm;
  out.h_plus = hp;
  if (same_point(hm.a, hp.a) || same_point(hm.a, hp.b)) {
    out.x2 = hm.a;
    out.x1 = hm.b;
  } else {
    out.x2 = hm.b;
    out.x1 = hm.a;
  }
  out.x3 = same_point(hp.a, out.x2) ? hp.b : hp.a;
  return out;
}

// Right-to-left orientation of a separating leaf g with respect to the
// ordered pair (gA, gB): the orientation whose forward endpoint sees the
// crossing path from its right.
inline OrientedLeaf right_to_left(const Leaf& g, const Leaf& gA, const Leaf& gB) {
  // Reference point strictly on the gB side of g.
  std::optional<IdealPoint> ref;
  for (const IdealPoint& p : {gB.a, gB.b})
    if (!g.has_endpoint(p)) ref = p;
  if (ref) {
    // Orient so that (bwd, ref, fwd) is counter-clockwise.
    if (cyclic_order(g.a, *ref, g.b)) return {g.b, g.a};
    return {g.a, g.b};
  }
  // g == gB: fall back to a reference on the gA side and flip the rule.
  for (const IdealPoint& p : {gA.a, gA.b})
    if (!g.has_endpoint(p)) ref = p;
  if (!ref) throw std::invalid_argument("right_to_left: degenerate triple of leaves");
  if (cyclic_order(g.a, *ref, g.b)) return {g.a, g.b};
  return {g.b, g.a};
}

// A plaque together with its coherent labelling and boundary gap.
struct SeparatedPlaque {
  Plaque plaque;
  CoherentLabel label;
};

// What a truncated separation range left out: explicitly cut gaps, plus a
// geometric tail (first omitted gap and measured per-step decay ratio) where
// a fan continues past the unrolled window.
struct TailInfo {
  std::vector<double> cut_gaps;
  double geo_gap = 0.0;
  double geo_ratio = 0.0;

  double power_sum(double nu) const {
    double s = 0.0;
    for (double g : cut_gaps) s += std::pow(g, nu);
    if (geo_gap > 0.0) {
      double r = std::pow(std::min(geo_ratio, 0.999), nu);
      s += std::pow(geo_gap, nu) / (1.0 - r);
    }
    return s;
  }
};

struct SeparationRange {
  std::vector<SeparatedPlaque> plaques;  // sorted by the total order
  std::vector<TailInfo> tails;

  double tail_power_sum(double nu) const {
    double s = 0.0;
    for (const TailInfo& t : tails) s += t.power_sum(nu);
    return s;
  }
};

// Lamination model: a finite strip of ideal triangles, or a ladder invariant
// under one hyperbolic generator (two fans spiraling onto its axis).
class LaminationModel {
 public:
  enum class Kind { Strip, Ladder };

  static LaminationModel strip(std::vector<std::array<IdealPoint, 3>> triangles) {
    LaminationModel m;
    m.kind_ = Kind::Strip;
    long n = 0;
    for (auto& tri : triangles) {
      Plaque p;
      p.id = PlaqueId{-1, n++};
      p.v = ccw_sorted(tri);
      m.strip_.push_back(p);
    }
    m.validate_strip();
    return m;
  }

  // Snake triangulation of the ideal polygon w_0, w_1, ...: plaque k has
  // vertices (w_k, w_{k+1}, w_{k+2}).
  static LaminationModel strip_zigzag(const std::vector<IdealPoint>& w) {
    std::vector<std::array<IdealPoint, 3>> tris;
    for (size_t k = 0; k + 2 < w.size(); ++k) tris.push_back({w[k], w[k + 1], w[k + 2]});
    return strip(tris);
  }

  // Ladder of a hyperbolic generator: upper fan T_n = (z_n, z_{n+1}, p+),
  // lower fan T'_n = (z'_n, z'_{n+1}, p-), with z_n the generator orbit of
  // the seeds. The axis is a leaf of the model.
  static LaminationModel ladder(const Eigen::Matrix2d& gen, const IdealPoint& seed_up,
                                const IdealPoint& seed_dn, int depth_cap = 40) {
    LaminationModel m;
    m.kind_ = Kind::Ladder;
    double det = gen.determinant();
    if (det <= 0.0) throw std::invalid_argument("ladder: generator must preserve orientation");
    m.gen_ = gen / std::sqrt(det);
    if (std::abs(m.gen_.trace()) <= 2.0 + 1e-12)
      throw std::invalid_argument("ladder: generator not hyperbolic");
    Eigen::EigenSolver<Eigen::Matrix2d> es(m.gen_);
    int att = std::abs(es.eigenvalues()(0)) > std::abs(es.eigenvalues()(1)) ? 0 : 1;
    auto fixed_point = [&](int k) {
      Cx v0 = es.eigenvectors()(0, k), v1 = es.eigenvectors()(1, k);
      if (std::abs(v1) < 1e-14 * std::abs(v0)) return IdealPoint::infinity();
      return IdealPoint::from_real((v0 / v1).real());
    };
    m.p_att_ = fixed_point(att);
    m.p_rep_ = fixed_point(1 - att);
    m.seed_up_ = seed_up;
    m.seed_dn_ = seed_dn;
    m.depth_cap_ = depth_cap;
    if (same_point(m.p_att_, m.p_rep_))
      throw std::invalid_argument("ladder: coincident fixed points");
    bool up_side = in_arc_ccw(m.p_rep_, seed_up, m.p_att_);
    bool dn_side = in_arc_ccw(m.p_rep_, seed_dn, m.p_att_);
    if (up_side == dn_side)
      throw std::invalid_argument("ladder: seeds must lie on opposite sides of the axis");
    return m;
  }

  Kind kind() const { return kind_; }
  int depth_cap() const { return depth_cap_; }
  Leaf axis() const {
    if (kind_ != Kind::Ladder) throw NotInModel("axis: strip model");
    return Leaf(p_rep_, p_att_);
  }
  const Eigen::Matrix2d& generator() const { return gen_; }

  IdealPoint orbit_up(long n) const { return orbit(seed_up_, n); }
  IdealPoint orbit_dn(long n) const { return orbit(seed_dn_, n); }

  Plaque plaque(PlaqueId id) const {
    if (kind_ == Kind::Strip) {
      if (id.side != -1 || id.n < 0 || id.n >= static_cast<long>(strip_.size()))
        throw NotInModel("plaque: bad strip id");
      return strip_[id.n];
    }
    Plaque p;
    p.id = id;
    if (id.side == 0)
      p.v = ccw_sorted({orbit_up(id.n), orbit_up(id.n + 1), p_att_});
    else if (id.side == 1)
      p.v = ccw_sorted({orbit_dn(id.n), orbit_dn(id.n + 1), p_rep_});
    else
      throw NotInModel("plaque: bad ladder id");
    return p;
  }

  // Generator action on model objects (ladder only).
  IdealPoint act(long power, const IdealPoint& p) const { return orbit(p, power); }
  Leaf act(long power, const Leaf& g) const {
    return Leaf(act(power, g.a), act(power, g.b));
  }
  Plaque act(long power, const Plaque& t) const {
    Plaque out = t;
    out.id.n += power;
    for (auto& v : out.v) v = act(power, v);
    return out;
  }

  std::vector<Plaque> all_plaques(int depth = -1) const {
    std::vector<Plaque> out;
    if (kind_ == Kind::Strip) {
      out = strip_;
    } else {
      int cap = depth < 0 ? depth_cap_ : depth;
      for (long n = -cap; n < cap; ++n) {
        out.push_back(plaque({0, n}));
        out.push_back(plaque({1, n}));
      }
    }
    return out;
  }

  // Every edge of every plaque, plus the axis for ladders.
  std::vector<Leaf> all_leaves(int depth = -1) const {
    std::vector<Leaf> out;
    for (const Plaque& p : all_plaques(depth))
      for (const Leaf& e : p.edges()) {
        bool dup = false;
        for (const Leaf& l : out) dup = dup || l.same(e);
        if (!dup) out.push_back(e);
      }
    if (kind_ == Kind::Ladder) out.push_back(axis());
    return out;
  }

  // Some plaque edge with the given endpoint.
  Leaf leaf_with_endpoint(const IdealPoint& z) const {
    for (const Plaque& p : all_plaques())
      for (const Leaf& e : p.edges())
        if (e.has_endpoint(z)) return e;
    if (kind_ == Kind::Ladder && axis().has_endpoint(z)) return axis();
    throw NotInModel("leaf_with_endpoint: point not in model");
  }

  // All plaques separating g1 and g2 whose gap is at least eps, in the total
  // order from g1 to g2, together with tail-decay data for what was cut.
  SeparationRange plaques_between(const Leaf& g1, const Leaf& g2, double eps = 0.0) const;

  // Unique plaque separating each pair among three mutually non-separating
  // leaves.
  Plaque central_plaque(const Leaf& g1, const Leaf& g2, const Leaf& g3) const;

  // The edge of t that faces x (separates t's interior from x): the unique
  // edge with all of x weakly beyond it.
  template <class Obj>
  Leaf facing_edge(const Plaque& t, const Obj& x) const {
    std::optional<Leaf> found;
    for (int k = 0; k < 3; ++k) {
      Leaf e = t.edge(k);
      IdealPoint w = t.v[(k + 2) % 3];
      int t_side = in_arc_ccw(e.a, w, e.b) ? +1 : -1;
      if (weakly_beyond(e, -t_side, x)) {
        if (found && !found->same(e))
          throw OverlappingPlaques("facing_edge: ambiguous facing edge");
        found = e;
      }
    }
    if (!found) throw OverlappingPlaques("facing_edge: none found (objects overlap)");
    return *found;
  }

 private:
  static bool weakly_beyond(const Leaf& e, int side, const Leaf& g) {
    return weakly_on_side(e, g, side);
  }
  static bool weakly_beyond(const Leaf& e, int side, const Plaque& t) {
    for (const IdealPoint& p : t.v) {
      if (e.has_endpoint(p)) continue;
      if ((in_arc_ccw(e.a, p, e.b) ? +1 : -1) != side) return false;
    }
    return true;
  }

  IdealPoint orbit(const IdealPoint& z, long n) const {
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d g = n >= 0 ? gen_ : gen_.inverse().eval();
    for (long k = 0; k < std::abs(n); ++k) {
      m = g * m;
      m /= m.norm();  // projectively harmless, avoids overflow
    }
    return mobius_apply(m, z);
  }

  // Disjoint interiors: each plaque must lie weakly beyond some edge of the
  // other.
  void validate_strip() const {
    for (size_t i = 0; i < strip_.size(); ++i)
      for (size_t j = i + 1; j < strip_.size(); ++j) {
        bool ok = false;
        for (int k = 0; k < 3; ++k) {
          Leaf e = strip_[i].edge(k);
          IdealPoint w = strip_[i].v[(k + 2) % 3];
          int t_side = in_arc_ccw(e.a, w, e.b) ? +1 : -1;
          ok = ok || weakly_beyond(e, -t_side, strip_[j]);
        }
        if (!ok) throw OverlappingPlaques("strip: overlapping plaques");
      }
  }

  Kind kind_ = Kind::Strip;
  std::vector<Plaque> strip_;
  Eigen::Matrix2d gen_ = Eigen::Matrix2d::Identity();
  IdealPoint p_att_, p_rep_, seed_up_, seed_dn_;
  int depth_cap_ = 40;
};

inline SeparationRange LaminationModel::plaques_between(const Leaf& g1, const Leaf& g2,
                                                        double eps) const {
  if (!weakly_on_side(g1, g2, +1) && !weakly_on_side(g1, g2, -1))
    throw TransverseLeaves("plaques_between: leaves cross");
  SeparationRange out;
  std::vector<SeparatedPlaque> found;
  auto consider = [&](const Plaque& t) {
    if (!plaque_separates(t, g1, g2)) return false;
    SeparatedPlaque sp{t, coherent_labelling(t, g1, g2)};
    found.push_back(sp);
    return true;
  };
  if (kind_ == Kind::Strip) {
    TailInfo cut;
    for (const Plaque& t : strip_) {
      if (!plaque_separates(t, g1, g2)) continue;
      SeparatedPlaque sp{t, coherent_labelling(t, g1, g2)};
      if (sp.label.gap() >= eps)
        found.push_back(sp);
      else
        cut.cut_gaps.push_back(sp.label.gap());
    }
    if (!cut.cut_gaps.empty()) out.tails.push_back(cut);
  } else {
    // Each fan contributes a consecutive index window. Gaps decay
    // geometrically into the spiral, so a fan that still separates at the
    // unrolled boundary is accounted for by a measured geometric tail.
    for (int side = 0; side < 2; ++side) {
      std::vector<std::pair<long, SeparatedPlaque>> window;
      for (long n = -depth_cap_; n < depth_cap_; ++n) {
        Plaque t = plaque({side, n});
        if (!plaque_separates(t, g1, g2)) continue;
        window.emplace_back(n, SeparatedPlaque{t, coherent_labelling(t, g1, g2)});
      }
      if (window.empty()) continue;
      TailInfo ti;
      for (auto& [n, sp] : window) {
        if (sp.label.gap() >= eps)
          found.push_back(sp);
        else
          ti.cut_gaps.push_back(sp.label.gap());
      }
      for (long edge_n : {window.front().first - 1, window.back().first + 1}) {
        if (std::abs(edge_n) > depth_cap_ + 1) continue;
        if (edge_n != -depth_cap_ - 1 && edge_n != depth_cap_) continue;
        Plaque t = plaque({side, edge_n});
        if (!plaque_separates(t, g1, g2)) continue;
        double g_out = coherent_labelling(t, g1, g2).gap();
        double g_in = (edge_n < 0 ? window.front() : window.back()).second.label.gap();
        ti.geo_gap = std::max(ti.geo_gap, g_out);
        double r = g_in > 0.0 ? g_out / g_in : 0.5;
        ti.geo_ratio = std::max(ti.geo_ratio, std::min(r, 0.999));
      }
      if (!ti.cut_gaps.empty() || ti.geo_gap > 0.0) out.tails.push_back(ti);
    }
  }
  std::sort(found.begin(), found.end(),
            [&](const SeparatedPlaque& a, const SeparatedPlaque& b) {
              if (a.plaque.id == b.plaque.id) return false;
              return leaf_leq(a.label.h_plus, b.label.h_minus, g1);
            });
  out.plaques = std::move(found);
  return out;
}

// Separating pair of edges of two plaques with disjoint interiors: the edge
// of each that faces the other, with no other edge of either between them.
inline std::pair<Leaf, Leaf> separating_pair(const LaminationModel& model,
                                             const Plaque& t1, const Plaque& t2) {
  Leaf e1 = model.facing_edge(t1, t2);
  Leaf e2 = model.facing_edge(t2, t1);
  for (const Plaque* t : {&t1, &t2})
    for (const Leaf& e : t->edges())
      if (!e.same(e1) && !e.same(e2) && leaf_separates(e, e1, e2))
        throw OverlappingPlaques("separating_pair: inconsistent plaque pair");
  return {e1, e2};
}

inline Plaque LaminationModel::central_plaque(const Leaf& g1, const Leaf& g2,
                                              const Leaf& g3) const {
  const Leaf* gs[3] = {&g1, &g2, &g3};
  for (int i = 0; i < 3; ++i) {
    if (leaf_separates(*gs[i], *gs[(i + 1) % 3], *gs[(i + 2) % 3]))
      throw SeparationHypothesisFails("central_plaque: one leaf separates the others");
  }
  for (const Plaque& t : all_plaques()) {
    if (plaque_separates(t, g1, g2) && plaque_separates(t, g2, g3) &&
        plaque_separates(t, g3, g1))
      return t;
  }
  throw NotInModel("central_plaque: not found in model range");
}

}  // namespace pleat
