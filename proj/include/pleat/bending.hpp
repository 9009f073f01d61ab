// The inverse construction: bending data, bending blocks, bending maps, bent
// limit maps, bending cocycles, bent representations, and the coordinate
// reconstruction of slithering maps.
#pragma once

#include <memory>
#include <mutex>
#include <random>

#include "pleat/shearbend.hpp"

namespace pleat {

struct PropertyStarFails : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnrealizableData : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateOrientation : std::domain_error {
  using std::domain_error::domain_error;
};

inline double wrap_two_pi(double t) {
  t = std::fmod(t, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

// Real-mod-2pi bending data (beta, eta) on a model: eta per plaque at its
// ccw reference labelling, beta stored on adjacent pairs (plus one cross-axis
// seed pair on ladders) and extended to arbitrary pairs by the cocycle
// boundary law.
class BendingData {
 public:
  BendingData() = default;
  BendingData(const LaminationModel& model, int d) : model_(model), d_(d) {}

  int d() const { return d_; }
  const LaminationModel& model() const { return model_; }

  // eta at the plaque's ccw reference labelling, as a vector over B.
  void set_eta(PlaqueId id, std::vector<double> vals) {
    for (double& v : vals) v = wrap_two_pi(v);
    eta_[key_of(id)] = std::move(vals);
  }
  // beta on an ordered adjacent pair (or the ladder cross-axis seed pair), as
  // a vector over A.
  void set_beta(PlaqueId a, PlaqueId b, std::vector<double> vals) {
    for (double& v : vals) v = wrap_two_pi(v);
    beta_[{key_of(a), key_of(b)}] = std::move(vals);
  }

  // eta at an arbitrary labelling of a model plaque, served through the
  // triangle-data symmetry laws.
  double eta(PlaqueId id, const std::array<IdealPoint, 3>& labelling,
             const IndexB& j) const {
    Plaque ref = model_.plaque(id);
    auto p = sym::match_labelling(ref.v, labelling);
    const std::vector<double>& w = eta_.at(key_of(id));
    auto lookup = std::function<double(const IndexB&)>([&](const IndexB& k) {
      return w[CocyclicPair::index_of(all_indices_B(d_), k)];
    });
    return wrap_two_pi(sym::eval_triangle_table<double>(lookup, p, j));
  }
  std::vector<double> eta_all(PlaqueId id, const std::array<IdealPoint, 3>& labelling) const {
    std::vector<double> out;
    for (const IndexB& j : all_indices_B(d_)) out.push_back(eta(id, labelling, j));
    return out;
  }

  // nu(x) = s_{eta(x)} for counter-clockwise labellings x1 < x2 < x3 and its
  // hat for the reversed orientation, as a vector over A mod 2pi.
  std::vector<double> nu_of(PlaqueId id, const std::array<IdealPoint, 3>& labelling) const {
    bool rev = cyclic_order(labelling[2], labelling[1], labelling[0]);
    auto index_a = all_indices_A(d_);
    std::vector<double> out(index_a.size(), 0.0);
    for (size_t k = 0; k < index_a.size(); ++k) {
      IndexA i = rev ? index_a[k] : index_a[k].hat();
      double s = 0.0;
      for (const IndexB& j : all_indices_B(d_))
        if (j.j2 == i.i1) s += eta(id, labelling, j);
      out[k] = wrap_two_pi(rev ? s : -s);
    }
    return out;
  }

  // beta on an arbitrary ordered pair of distinct plaques, chained through
  // the boundary law along the dual path (and the cross seed on ladders).
  std::vector<double> beta(PlaqueId a, PlaqueId b) const {
    if (key_of(a) == key_of(b)) throw std::invalid_argument("beta: equal plaques");
    if (model_.kind() == LaminationModel::Kind::Ladder && a.side != b.side) {
      return beta_cross(a, b);
    }
    return beta_chain(a, b);
  }

  // Hatted vector: out^i = -v^{i hat} mod 2pi.
  std::vector<double> hat(const std::vector<double>& v) const {
    auto index_a = all_indices_A(d_);
    std::vector<double> out(v.size());
    for (size_t k = 0; k < index_a.size(); ++k) {
      size_t kh = CocyclicPair::index_of(index_a, index_a[k].hat());
      out[k] = wrap_two_pi(-v[kh]);
    }
    return out;
  }

  // Correction term of the boundary law for intermediate plaque t between
  // the plaques owning edges (e1, e2): +sum_{j2=i1} eta if the coherent
  // labelling runs x3 < x2 < x1, else -sum_{j2=i2} eta.
  std::vector<double> boundary_correction(const Plaque& t, const Leaf& e1,
                                          const Leaf& e2) const {
    CoherentLabel lab = coherent_labelling(t, e1, e2);
    bool rev = lab.reversed_ccw();
    auto index_a = all_indices_A(d_);
    std::vector<double> out(index_a.size(), 0.0);
    for (size_t k = 0; k < index_a.size(); ++k) {
      double s = 0.0;
      for (const IndexB& j : all_indices_B(d_)) {
        if (rev && j.j2 == index_a[k].i1) s += eta(t.id, lab.points(), j);
        if (!rev && j.j2 == index_a[k].i2) s -= eta(t.id, lab.points(), j);
      }
      out[k] = wrap_two_pi(s);
    }
    return out;
  }

  // Builds random valid data: eta and the free beta values are uniform in
  // [0, 2pi); on ladders the lower adjacent value is solved from the
  // generator-invariance constraint by numeric probing.
  static BendingData random(const LaminationModel& model, int d, std::mt19937_64& rng);

  // Data with eta identically pi and prescribed (default zero) free beta
  // values; used by the non-Hausdorff construction.
  static BendingData theta_pi(const LaminationModel& model, int d,
                              const std::vector<double>& beta_up = {});

  // On ladders, the value beta(lower 0, lower 1) is pinned by invariance
  // under the generator: beta(U_1, L_1) must reproduce the cross seed. The
  // dependence is affine with a signed-permutation linear part, so it is
  // solved by probing.
  void solve_ladder_invariance() {
    const size_t na = all_indices_A(d_).size();
    std::vector<double> target = seed();
    auto residual = [&](const std::vector<double>& dn) {
      BendingData probe = *this;
      probe.set_beta(PlaqueId{1, 0}, PlaqueId{1, 1}, dn);
      std::vector<double> got = probe.beta(PlaqueId{0, 1}, PlaqueId{1, 1});
      std::vector<double> r(na);
      for (size_t k = 0; k < na; ++k) r[k] = wrap_angle(got[k] - target[k]);
      return r;
    };
    set_beta(PlaqueId{1, 0}, PlaqueId{1, 1}, std::vector<double>(na, 0.0));
    std::vector<double> e0 = residual(std::vector<double>(na, 0.0));
    std::vector<double> dn(na, 0.0);
    const double h = 0.25;
    for (size_t k = 0; k < na; ++k) {
      std::vector<double> probe(na, 0.0);
      probe[k] = h;
      std::vector<double> ek = residual(probe);
      for (size_t r = 0; r < na; ++r) {
        double diff = wrap_angle(ek[r] - e0[r]);
        if (std::abs(std::abs(diff) - h) < 1e-9) dn[k] = wrap_two_pi(-e0[r] / (diff / h));
      }
    }
    set_beta(PlaqueId{1, 0}, PlaqueId{1, 1}, dn);
    for (double c : residual(dn))
      if (std::abs(c) > 1e-7)
        throw UnrealizableData("BendingData: invariance constraint unsolved");
  }

 private:
  // Ladder plaque classes are generator orbits; use side with n = 0.
  PlaqueId key_of(PlaqueId id) const {
    if (model_.kind() == LaminationModel::Kind::Ladder) return PlaqueId{id.side, 0};
    return id;
  }

  std::vector<double> stored_beta(PlaqueId a, PlaqueId b) const {
    auto it = beta_.find({key_of(a), key_of(b)});
    if (it != beta_.end()) return it->second;
    it = beta_.find({key_of(b), key_of(a)});
    if (it != beta_.end()) return hat(it->second);
    throw std::out_of_range("BendingData: missing adjacent beta value");
  }

  static std::vector<double> add(std::vector<double> a, const std::vector<double>& b,
                                 double sign = 1.0) {
    for (size_t k = 0; k < a.size(); ++k) a[k] = wrap_two_pi(a[k] + sign * b[k]);
    return a;
  }

  // Same-side (or strip) chaining along the dual path between a and b.
  std::vector<double> beta_chain(PlaqueId a, PlaqueId b) const {
    Plaque ta = model_.plaque(a), tb = model_.plaque(b);
    auto [e1, e2] = separating_pair(model_, ta, tb);
    SeparationRange range = model_.plaques_between(e1, e2, 0.0);
    std::vector<Plaque> chain{ta};
    for (const SeparatedPlaque& sp : range.plaques) {
      if (sp.plaque.id == a || sp.plaque.id == b) continue;
      chain.push_back(sp.plaque);
    }
    chain.push_back(tb);
    // beta(C0, Cm) = beta(C0, C_{m-1}) + beta(C_{m-1}, Cm) + corr(C_{m-1}).
    std::vector<double> acc = stored_beta(chain[0].id, chain[1].id);
    for (size_t m = 2; m < chain.size(); ++m) {
      acc = add(acc, stored_beta(chain[m - 1].id, chain[m].id));
      Leaf front = model_.facing_edge(chain[0], chain[m]);
      Leaf back = model_.facing_edge(chain[m], chain[0]);
      acc = add(acc, boundary_correction(chain[m - 1], front, back));
    }
    return acc;
  }

  // Cross-axis pairs on a ladder: reduce both indices to the stored seed
  // pair (upper 0, lower 0) through the boundary law.
  std::vector<double> beta_cross(PlaqueId a, PlaqueId b) const {
    if (a.side == 1) return hat(beta_cross(b, a));  // a upper, b lower below
    auto corr = [&](PlaqueId t, PlaqueId t1, PlaqueId t2) {
      Plaque pt = model_.plaque(t), p1 = model_.plaque(t1), p2 = model_.plaque(t2);
      Leaf front = model_.facing_edge(p1, pt);
      Leaf back = model_.facing_edge(p2, pt);
      return boundary_correction(pt, front, back);
    };
    PlaqueId up0{0, 0}, dn0{1, 0};
    // Reduce the upper index to 0.
    if (a.n > 0) {
      // U_0 separates (U_a, L_b).
      return add(add(beta_chain(a, up0), beta_cross(up0, b)), corr(up0, a, b));
    }
    if (a.n < 0) {
      // U_a separates (U_0, L_b): solve the law for beta(U_a, L_b).
      std::vector<double> v = beta_cross(up0, b);
      v = add(v, beta_chain(up0, a), -1.0);
      v = add(v, corr(a, up0, b), -1.0);
      return v;
    }
    // a == up0: reduce the lower index to 0.
    if (b.n < 0) {
      // L_0 separates (U_0, L_b).
      return add(add(seed(), beta_chain(dn0, b)), corr(dn0, up0, b));
    }
    if (b.n > 0) {
      // L_b separates (U_0, L_0): solve the law for beta(U_0, L_b).
      std::vector<double> v = seed();
      v = add(v, beta_chain(b, dn0), -1.0);
      v = add(v, corr(b, up0, dn0), -1.0);
      return v;
    }
    return seed();
  }

  std::vector<double> seed() const {
    auto it = beta_.find({PlaqueId{0, 0}, PlaqueId{1, 0}});
    if (it != beta_.end()) return it->second;
    it = beta_.find({PlaqueId{1, 0}, PlaqueId{0, 0}});
    if (it == beta_.end()) throw std::out_of_range("BendingData: missing cross seed");
    return hat(it->second);
  }

  LaminationModel model_;
  int d_ = 2;
  std::map<PlaqueId, std::vector<double>> eta_;
  std::map<std::pair<PlaqueId, PlaqueId>, std::vector<double>> beta_;
};

inline BendingData BendingData::random(const LaminationModel& model, int d,
                                       std::mt19937_64& rng) {
  BendingData data(model, d);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
  const size_t nb = all_indices_B(d).size();
  const size_t na = all_indices_A(d).size();
  auto rand_vec = [&](size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = uni(rng);
    return v;
  };
  if (model.kind() == LaminationModel::Kind::Strip) {
    std::vector<Plaque> ps = model.all_plaques();
    for (const Plaque& p : ps) data.set_eta(p.id, rand_vec(nb));
    for (size_t i = 0; i < ps.size(); ++i)
      for (size_t j = i + 1; j < ps.size(); ++j) {
        bool adjacent = false;
        for (const Leaf& e : ps[i].edges())
          for (const Leaf& f : ps[j].edges()) adjacent = adjacent || e.same(f);
        if (adjacent) data.set_beta(ps[i].id, ps[j].id, rand_vec(na));
      }
    return data;
  }
  data.set_eta(PlaqueId{0, 0}, rand_vec(nb));
  data.set_eta(PlaqueId{1, 0}, rand_vec(nb));
  data.set_beta(PlaqueId{0, 0}, PlaqueId{0, 1}, rand_vec(na));
  data.set_beta(PlaqueId{0, 0}, PlaqueId{1, 0}, rand_vec(na));  // cross seed
  data.solve_ladder_invariance();
  return data;
}

inline BendingData BendingData::theta_pi(const LaminationModel& model, int d,
                                         const std::vector<double>& beta_up) {
  BendingData data(model, d);
  const size_t nb = all_indices_B(d).size();
  const size_t na = all_indices_A(d).size();
  std::vector<double> pi_vec(nb, kPi);
  std::vector<double> beta0 = beta_up.empty() ? std::vector<double>(na, 0.0) : beta_up;
  if (model.kind() == LaminationModel::Kind::Strip) {
    std::vector<Plaque> ps = model.all_plaques();
    for (const Plaque& p : ps) data.set_eta(p.id, pi_vec);
    for (size_t i = 0; i < ps.size(); ++i)
      for (size_t j = i + 1; j < ps.size(); ++j) {
        bool adjacent = false;
        for (const Leaf& e : ps[i].edges())
          for (const Leaf& f : ps[j].edges()) adjacent = adjacent || e.same(f);
        if (adjacent) data.set_beta(ps[i].id, ps[j].id, beta0);
      }
    return data;
  }
  data.set_eta(PlaqueId{0, 0}, pi_vec);
  data.set_eta(PlaqueId{1, 0}, pi_vec);
  data.set_beta(PlaqueId{0, 0}, PlaqueId{0, 1}, beta0);
  data.set_beta(PlaqueId{0, 0}, PlaqueId{1, 0}, std::vector<double>(na, 0.0));
  data.solve_ladder_invariance();
  return data;
}

// ---------------------------------------------------------------------------
// Bending machinery proper.

// A d-pleated base: limit map, its slithering evaluator, and property-star
// screening. Every plaque triple the construction touches is checked
// eagerly.
struct BendingBase {
  LaminationModel model;
  LimitMapData xi0;
  SqMat holonomy0;  // generator image, identity for strips

  void check_property_star(const std::array<IdealPoint, 3>& x) const {
    if (!property_star(xi0(x[0]), xi0(x[1]), xi0(x[2])))
      throw PropertyStarFails("bending: base plaque triple fails property-star");
  }
};

// Labelled base plaque.
struct BasePlaque {
  PlaqueId id;
  std::array<IdealPoint, 3> x;

  Leaf h_x() const { return Leaf(x[0], x[1]); }
  Leaf h_plus() const { return Leaf(x[1], x[2]); }
  Leaf h_minus() const { return Leaf(x[2], x[0]); }
  std::array<IdealPoint, 3> hat() const { return {x[1], x[0], x[2]}; }
  Plaque plaque() const { return Plaque{id, x}; }
};

inline EruptionData imag_eruption_data(int d, const std::vector<double>& vals) {
  EruptionData z(d);
  auto bs = all_indices_B(d);
  for (size_t k = 0; k < bs.size(); ++k) z.set(bs[k], CLog(0.0, vals[k]));
  return z;
}
inline ShearData imag_shear_data(int d, const std::vector<double>& vals) {
  ShearData u(d);
  auto as = all_indices_A(d);
  for (size_t k = 0; k < as.size(); ++k) u.set(as[k], CLog(0.0, vals[k]));
  return u;
}

// Bending block N_h(T): the unipotent eruption of the base flags at T by
// (i eta(x_T), i beta(T_x, T)) with the hat applied to beta when the coherent
// labelling of T runs counter-clockwise.
inline SqMat bending_block(const BendingBase& base, const BendingData& data,
                           const BasePlaque& bx, const SeparatedPlaque& sp) {
  const int d = data.d();
  const CoherentLabel& lab = sp.label;
  base.check_property_star(lab.points());
  std::vector<double> eta_t = data.eta_all(sp.plaque.id, lab.points());
  std::vector<double> beta_t = data.beta(bx.id, sp.plaque.id);
  if (!lab.reversed_ccw()) beta_t = data.hat(beta_t);
  return unipotent_eruption(base.xi0(lab.x1), base.xi0(lab.x2), base.xi0(lab.x3),
                            imag_eruption_data(d, eta_t), imag_shear_data(d, beta_t));
}

// Complex shear of the flags at an oriented leaf by the imaginary vector
// i * delta.
inline SqMat leaf_shear(const LimitMapData& xi, const OrientedLeaf& g,
                        const std::vector<double>& delta) {
  return sl_normalize(
      shear_linear(xi(g.fwd), xi(g.bwd), imag_shear_data(xi.d, delta)));
}

// The correction factor v(x, h) of the bending map, depending on which edge
// of the base plaque faces h.
inline SqMat bending_v(const BendingBase& base, const BendingData& data,
                       const BasePlaque& bx, const Leaf& g_x_h) {
  const int d = data.d();
  if (g_x_h.same(bx.h_x())) return SqMat::Identity(d, d);
  std::array<IdealPoint, 3> lab;
  if (g_x_h.same(bx.h_plus()))
    lab = bx.x;
  else if (g_x_h.same(bx.h_minus()))
    lab = bx.hat();
  else
    throw NotInModel("bending_v: leaf does not face the base plaque");
  std::vector<double> eta_x = data.eta_all(bx.id, lab);
  return sl_normalize(eruption_linear(base.xi0(lab[0]), base.xi0(lab[1]),
                                      base.xi0(lab[2]), imag_eruption_data(d, eta_x)));
}

// Bending map Psi(h) = v(x, h) * envelope of the bending blocks from the
// base edge facing h out to h, with its certified truncation bound.
class BendingMap {
 public:
  BendingMap(BendingBase base, BendingData data, BasePlaque bx, double eps = 1e-9)
      : base_(std::move(base)), data_(std::move(data)), bx_(bx), eps_(eps) {
    base_.check_property_star(bx_.x);
  }

  const BendingBase& base() const { return base_; }
  const BendingData& data() const { return data_; }
  const BasePlaque& base_plaque() const { return bx_; }
  double eps() const { return eps_; }

  SqMat psi(const Leaf& h) const {
    long long key = leaf_key(h);
    {
      std::lock_guard<std::mutex> lock(*mu_);
      auto it = cache_->find(key);
      if (it != cache_->end()) return it->second;
    }
    Leaf g = base_.model.facing_edge(bx_.plaque(), h);
    PlaqueMap blocks;
    blocks.g1 = g;
    blocks.g2 = h;
    blocks.eval = [this](const SeparatedPlaque& sp) {
      return bending_block(base_, data_, bx_, sp);
    };
    SqMat env = envelope(base_.model, blocks, g, h, data_.d(), eps_).value;
    SqMat out = bending_v(base_, data_, bx_, g) * env;
    std::lock_guard<std::mutex> lock(*mu_);
    cache_->emplace(key, out);
    return out;
  }

  // Bent limit map: xi(z) = Psi(h) xi0(z) for any model leaf h ending at z.
  LimitMapData bent_limit_map() const {
    auto self = std::make_shared<BendingMap>(*this);
    auto cache = std::make_shared<std::map<long long, Flag>>();
    auto mu = std::make_shared<std::mutex>();
    LimitMapData out;
    out.d = data_.d();
    out.eval = [self, cache, mu](const IdealPoint& z) {
      long long key = llround(z.angle() * 1e12);
      {
        std::lock_guard<std::mutex> lock(*mu);
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
      }
      Leaf h = self->base_.model.leaf_with_endpoint(z);
      Flag f = apply_flag(self->psi(h), self->base_.xi0(z));
      std::lock_guard<std::mutex> lock(*mu);
      cache->emplace(key, f);
      return f;
    };
    return out;
  }

  // Bending cocycle B(x, y) = Psi(h_y) c_{h_y}(i delta_{x,y}).
  SqMat cocycle(const BasePlaque& by) const {
    Leaf h_y = by.h_x();
    if (by.id == bx_.id) return psi(h_y);
    Plaque ty = by.plaque();
    Leaf g_y_x = base_.model.facing_edge(ty, bx_.plaque());
    Leaf g_x_y = base_.model.facing_edge(bx_.plaque(), ty);
    std::vector<double> delta = data_.beta(bx_.id, by.id);
    if (!h_y.same(g_y_x)) {
      CoherentLabel lab = coherent_labelling(ty, g_y_x, h_y);
      std::vector<double> nu = data_.nu_of(ty.id, lab.points());
      for (size_t k = 0; k < delta.size(); ++k) delta[k] = wrap_two_pi(delta[k] + nu[k]);
    }
    OrientedLeaf hy = right_to_left(h_y, g_x_y, h_y);
    return psi(h_y) * leaf_shear(base_.xi0, hy, delta);
  }

  // Bent representation on generator powers (ladder models): rho(gamma^k) =
  // B(x, gamma^k x) rho0(gamma)^k.
  SqMat bent_rep(long power) const {
    const int d = data_.d();
    SqMat rho0 = SqMat::Identity(d, d);
    SqMat gen = power >= 0 ? base_.holonomy0
                           : base_.holonomy0.inverse().eval();
    for (long k = 0; k < std::abs(power); ++k) rho0 = rho0 * gen;
    BasePlaque shifted;
    shifted.id = PlaqueId{bx_.id.side, bx_.id.n + power};
    for (int k = 0; k < 3; ++k) shifted.x[k] = base_.model.act(power, bx_.x[k]);
    return sl_normalize(cocycle(shifted) * rho0);
  }

 private:
  static long long leaf_key(const Leaf& g) {
    long long a = llround(g.a.angle() * 1e9);
    long long b = llround(g.b.angle() * 1e9);
    if (a > b) std::swap(a, b);
    return a * 2000000011LL + b;
  }

  BendingBase base_;
  BendingData data_;
  BasePlaque bx_;
  double eps_;
  // Shared across copies so the bent limit map closure reuses results.
  std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
  std::shared_ptr<std::map<long long, SqMat>> cache_ =
      std::make_shared<std::map<long long, SqMat>>();
};

// Reconstruction of the slithering map from shear-bend coordinates (a
// tabulated pair and the base frame): the envelope of T -> W_T U_T, where
// W_T is the unipotent carrying the zero-tau flag F_T to the base flag and
// U_T the unipotent eruption by (theta(x_T), alpha(T_x, T)).
class CoordinateSlithering {
 public:
  CoordinateSlithering(const LaminationModel& model, CocyclicPair pair,
                       const BasePlaque& bx, const Flag& f1, const Flag& f2,
                       const CxVec& p, double eps = 1e-9)
      : model_(model), pair_(std::move(pair)), bx_(bx), eps_(eps) {
    const int d = pair_.d();
    flags_[0] = f1;
    flags_[1] = f2;
    EruptionData theta_x(d);
    auto bs = all_indices_B(d);
    for (const IndexB& j : bs) theta_x.set(j, pair_.theta(bx_.id, bx_.x, j));
    flags_[2] = flag_from_frame_and_tau(f1, f2, p, theta_x);
  }

  const Flag& base_flag(int k) const { return flags_[k]; }

  // Sigma(g_x^h, h) reconstructed from the coordinates.
  SqMat sigma(const Leaf& h) const {
    const int d = pair_.d();
    Leaf g = model_.facing_edge(bx_.plaque(), h);
    if (g.same(h)) return SqMat::Identity(d, d);
    PlaqueMap lmap;
    lmap.g1 = g;
    lmap.g2 = h;
    lmap.eval = [this, g](const SeparatedPlaque& sp) { return block(g, sp); };
    SqMat env = envelope(model_, lmap, g, h, d, eps_).value;
    return env.inverse();
  }

 private:
  SqMat block(const Leaf& g, const SeparatedPlaque& sp) const {
    const int d = pair_.d();
    bool rev = sp.label.reversed_ccw();
    // Base labelling (y1, y2, y3): y1, y2 on the facing edge, y3 opposite;
    // counter-clockwise for reversed coherent labellings, clockwise
    // otherwise.
    std::array<IdealPoint, 3> y;
    y[2] = bx_.plaque().opposite_vertex(g);
    y[0] = g.a;
    y[1] = g.b;
    if (cyclic_order(y[0], y[1], y[2]) != rev) std::swap(y[0], y[1]);
    auto base_flag_at = [&](const IdealPoint& pt) -> const Flag& {
      for (int k = 0; k < 3; ++k)
        if (same_point(bx_.x[k], pt)) return flags_[k];
      throw std::logic_error("CoordinateSlithering: foreign base vertex");
    };
    const Flag& fy1 = base_flag_at(y[0]);
    const Flag& fy2 = base_flag_at(y[1]);
    const Flag& fy3 = base_flag_at(y[2]);

    Flag f_t = zero_tau_flag(fy2, fy1, fy3.line());
    SqMat w_t = unique_unipotent(fy1, fy2, f_t);

    EruptionData theta_t(d);
    for (const IndexB& j : all_indices_B(d))
      theta_t.set(j, pair_.theta(sp.plaque.id, sp.label.points(), j));
    ShearData alpha_t(d);
    for (const IndexA& i : all_indices_A(d)) {
      CLog v = rev ? pair_.alpha(bx_.id, sp.plaque.id, i)
                   : -pair_.alpha(bx_.id, sp.plaque.id, i.hat());
      alpha_t.set(i, v);
    }
    SqMat u_t = unipotent_eruption(f_t, fy2, fy1, theta_t, alpha_t);
    return w_t * u_t;
  }

  LaminationModel model_;
  CocyclicPair pair_;
  BasePlaque bx_;
  double eps_;
  std::array<Flag, 3> flags_;
};

}  // namespace pleat
