// Building-block projective transformations: elementary and complex
// eruptions, elementary and complex shears, unipotent eruptions, the unique
// unipotent flag transporter, Pascal matrices, and property-star.
#pragma once

#include <map>

#include "pleat/invariants.hpp"

namespace pleat {

struct NotTransverse : std::domain_error {
  using std::domain_error::domain_error;
};

// Exponent data zeta: B -> C/2piZ for eruptions.
class EruptionData {
 public:
  EruptionData() = default;
  explicit EruptionData(int d) : d_(d) {
    for (const IndexB& j : all_indices_B(d)) map_[j] = CLog();
  }
  int d() const { return d_; }
  const CLog& at(const IndexB& j) const { return map_.at(j); }
  void set(const IndexB& j, CLog v) { map_.at(j) = v; }

  // Cyclic relabellings act inversely on the exponent data, so that
  // a_F(zeta) a_{F+}(zeta+) a_{F-}(zeta-) = id groups into the elementary
  // triple identities; hat and prime are involutions.
  EruptionData permuted_plus() const { return permuted([](IndexB j) { return j.minus(); }, false); }
  EruptionData permuted_minus() const { return permuted([](IndexB j) { return j.plus(); }, false); }
  EruptionData hat() const { return permuted([](IndexB j) { return j.hat(); }, true); }
  EruptionData prime() const { return permuted([](IndexB j) { return j.prime(); }, true); }

 private:
  template <class P>
  EruptionData permuted(P p, bool negate) const {
    EruptionData out(d_);
    for (const auto& [j, v] : map_) {
      // (zeta_sigma)^j := +/- zeta^{sigma(j)}
      CLog w = map_.at(p(j));
      out.map_[j] = negate ? -w : w;
    }
    return out;
  }
  int d_ = 2;
  std::map<IndexB, CLog> map_;
};

// Exponent data upsilon: A -> C/2piZ for shears.
class ShearData {
 public:
  ShearData() = default;
  explicit ShearData(int d) : d_(d) {
    for (const IndexA& i : all_indices_A(d)) map_[i] = CLog();
  }
  int d() const { return d_; }
  const CLog& at(const IndexA& i) const { return map_.at(i); }
  void set(const IndexA& i, CLog v) { map_.at(i) = v; }

  ShearData hat() const {
    ShearData out(d_);
    for (const auto& [i, v] : map_) out.map_[i] = -map_.at(i.hat());
    return out;
  }
  ShearData operator+(const ShearData& o) const {
    ShearData out(d_);
    for (const auto& [i, v] : map_) out.map_[i] = v + o.at(i);
    return out;
  }
  ShearData operator-() const {
    ShearData out(d_);
    for (const auto& [i, v] : map_) out.map_[i] = -v;
    return out;
  }

 private:
  int d_ = 2;
  std::map<IndexA, CLog> map_;
};

// s_zeta^i = sum of zeta^j over j in B with j2 = i1.
inline ShearData s_of(const EruptionData& zeta) {
  ShearData s(zeta.d());
  for (const IndexA& i : all_indices_A(zeta.d())) {
    CLog acc;
    for (const IndexB& j : all_indices_B(zeta.d()))
      if (j.j2 == i.i1) acc = acc + zeta.at(j);
    s.set(i, acc);
  }
  return s;
}

namespace detail {

// Linear map scaling subspace spanned by `on` by s and its complement
// (spanned by `off`) by t. The blocks must assemble to an invertible matrix.
inline SqMat two_scale(const SqMat& on, const SqMat& off, Cx s, Cx t) {
  const int d = static_cast<int>(on.rows());
  SqMat p(d, d);
  p << on, off;
  CxVec diag(d);
  for (int k = 0; k < on.cols(); ++k) diag(k) = s;
  for (int k = static_cast<int>(on.cols()); k < d; ++k) diag(k) = t;
  return p * diag.asDiagonal() * p.inverse();
}

}  // namespace detail

// Elementary eruption: scales F2^{j2} by e^{2 delta/3} and F1^{j1} + F3^{j3}
// by e^{-delta/3}. Returned as a linear map built from the canonical CLog
// representative; projectively the representative does not matter.
inline SqMat elementary_eruption_linear(const Flag& f1, const Flag& f2,
                                        const Flag& f3, const IndexB& j,
                                        const CLog& delta) {
  if (!in_general_position({f1, f2, f3}, {j.j1, j.j2, j.j3}))
    throw NotGeneralPosition("elementary_eruption: flags degenerate for j");
  const int d = f1.d();
  SqMat off(d, j.j1 + j.j3);
  off << f1.part(j.j1), f3.part(j.j3);
  Cx s = std::exp(Cx(2.0 / 3.0) * delta.value());
  Cx t = std::exp(Cx(-1.0 / 3.0) * delta.value());
  return detail::two_scale(f2.part(j.j2), off, s, t);
}

inline SqMat elementary_eruption(const Flag& f1, const Flag& f2, const Flag& f3,
                                 const IndexB& j, const CLog& delta) {
  return sl_normalize(elementary_eruption_linear(f1, f2, f3, j, delta));
}

// Complex eruption a_F(zeta): the commuting product a^1 ... a^{d-2} of
// elementary eruptions grouped by j3. Fixes F2, F1^1 and F3^1, and shifts
// every triple ratio tau^j by zeta^j.
inline SqMat eruption_linear(const Flag& f1, const Flag& f2, const Flag& f3,
                             const EruptionData& zeta) {
  const int d = f1.d();
  SqMat acc = SqMat::Identity(d, d);
  for (int n = 1; n <= d - 2; ++n)
    for (const IndexB& j : all_indices_B(d))
      if (j.j3 == n) acc = acc * elementary_eruption_linear(f1, f2, f3, j, zeta.at(j));
  return acc;
}

inline SqMat eruption(const Flag& f1, const Flag& f2, const Flag& f3,
                      const EruptionData& zeta) {
  return sl_normalize(eruption_linear(f1, f2, f3, zeta));
}

// Elementary shear: scales E1^{i1} by e^{eps/2} and E2^{i2} by e^{-eps/2}.
inline SqMat elementary_shear_linear(const Flag& e1, const Flag& e2,
                                     const IndexA& i, const CLog& eps) {
  if (!in_general_position({e1, e2}, {i.i1, i.i2}))
    throw NotTransverse("elementary_shear: flags not transverse at i");
  Cx s = std::exp(Cx(0.5) * eps.value());
  return detail::two_scale(e1.part(i.i1), e2.part(i.i2), s, 1.0 / s);
}

// Complex shear c_E(upsilon): commuting product of elementary shears. Fixes
// both flags and shifts every double ratio sigma^i by upsilon^i.
inline SqMat shear_linear(const Flag& e1, const Flag& e2, const ShearData& upsilon) {
  const int d = e1.d();
  SqMat acc = SqMat::Identity(d, d);
  for (const IndexA& i : all_indices_A(d))
    acc = acc * elementary_shear_linear(e1, e2, i, upsilon.at(i));
  return acc;
}

inline SqMat shear(const Flag& e1, const Flag& e2, const ShearData& upsilon) {
  return sl_normalize(shear_linear(e1, e2, upsilon));
}

// Unipotent eruption u_F(zeta, upsilon) = c_E(upsilon) a_F(zeta) c_G(-upsilon
// - s_zeta) with E = (F2, F1), G = (F2, F3), returned as its unipotent SL
// representative.
inline SqMat unipotent_eruption(const Flag& f1, const Flag& f2, const Flag& f3,
                                const EruptionData& zeta, const ShearData& upsilon) {
  ShearData tail = -(upsilon + s_of(zeta));
  SqMat m = shear_linear(f2, f1, upsilon) * eruption_linear(f1, f2, f3, zeta) *
            shear_linear(f2, f3, tail);
  return unipotent_representative(m);
}

// Upper-triangular binomial matrix with (i, j) entry C(d-i, d-j), 1-indexed.
inline SqMat pascal(int d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i <= d; ++i)
    for (int j = i; j <= d; ++j) {
      double c = 1.0;
      for (int k = 0; k < j - i; ++k) c = c * (d - i - k) / (k + 1);
      m(i - 1, j - 1) = std::round(c);
    }
  return m.cast<Cx>();
}

inline SqMat pascal_inverse(int d) {
  SqMat m = pascal(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      if ((i + j) % 2 == 1) m(i, j) = -m(i, j);
  return m;
}

// Unique unipotent fixing F (as a flag) and transporting G2 to G1 (as flags).
// Solved in F-adapted coordinates: with W_i the triangular matrices whose
// k-th columns span F^k cap G_i^{d-k+1}, the transporter is W1 D W2^{-1} and
// unipotency pins the diagonal D.
inline SqMat unique_unipotent(const Flag& g1, const Flag& f, const Flag& g2,
                              double tol = 1e-10) {
  const int d = f.d();
  if (!is_transverse(f, g1, tol) || !is_transverse(f, g2, tol))
    throw NotTransverse("unique_unipotent: flags not transverse to F");
  SqMat bf = f.basis();
  SqMat bf_inv = bf.adjoint();  // canonical bases are unitary
  auto adapted = [&](const Flag& g) {
    SqMat w = SqMat::Zero(d, d);
    for (int k = 1; k <= d; ++k) {
      CxVec v = ProjFrame::intersect_line(f, g, k, tol);
      w.col(k - 1) = bf_inv * v;  // upper triangular in F-coordinates
    }
    return w;
  };
  SqMat w1 = adapted(g1);
  SqMat w2 = adapted(g2);
  CxVec diag(d);
  for (int k = 0; k < d; ++k) diag(k) = w2(k, k) / w1(k, k);
  SqMat u = w1 * diag.asDiagonal() *
            w2.triangularView<Eigen::Upper>().solve(SqMat::Identity(d, d));
  return bf * u * bf_inv;
}

// Property-star of a triple (F1, F2, F3): all superdiagonal entries of the
// F2-adapted matrix of the unipotent transporting F1 to F3 are non-vanishing.
inline bool property_star(const Flag& f1, const Flag& f2, const Flag& f3,
                          double tol = 1e-8) {
  const int d = f2.d();
  SqMat u = unique_unipotent(f3, f2, f1, tol);
  // Express u in the basis b_k spanning F2^k cap F1^{d-k+1} (unit vectors).
  SqMat basis(d, d);
  for (int k = 1; k <= d; ++k)
    basis.col(k - 1) = ProjFrame::intersect_line(f2, f1, k, tol);
  SqMat m = basis.fullPivLu().solve(u * basis);
  double scale = operator_norm(m);
  for (int k = 0; k + 1 < d; ++k)
    if (std::abs(m(k, k + 1)) <= tol * scale) return false;
  return true;
}

// The flag F3 with F3^1 = [p] making tau(F1, F2, F3) identically zero: the
// Pascal matrix in the (F2, F1, p)-adapted basis applied to F1.
inline Flag zero_tau_flag(const Flag& f1, const Flag& f2, const CxVec& p,
                          double tol = 1e-10) {
  SqMat basis = ProjFrame::frame_adapted_basis(f2, f1, p / p.norm(), tol);
  SqMat w = basis * pascal(f1.d()) * basis.fullPivLu().solve(SqMat::Identity(f1.d(), f1.d()));
  return apply_flag(w, f1);
}

// The flag F3 with F3^1 = [p] and prescribed tau(F1, F2, F3) = target:
// erupt the zero-tau flag, which moves every tau^j by target^j while fixing
// F2, F1^1 and the line p.
inline Flag flag_from_frame_and_tau(const Flag& f1, const Flag& f2, const CxVec& p,
                                    const EruptionData& target, double tol = 1e-10) {
  Flag f3 = zero_tau_flag(f1, f2, p, tol);
  SqMat a = eruption_linear(f1, f2, f3, target);
  return apply_flag(a, f3);
}

}  // namespace pleat
