// Complete flags in C^d, transversality and general position predicates,
// projective frames, the symmetric-power embedding of SL_2, and the Veronese
// (Fuchsian-locus) flag curve.
#pragma once

#include <functional>

#include "pleat/numeric.hpp"

namespace pleat {

struct DegenerateFrame : std::domain_error {
  using std::domain_error::domain_error;
};
struct NotUnimodular : std::domain_error {
  using std::domain_error::domain_error;
};

// Point of the ideal boundary circle. The real-line value is a view through
// the Cayley transform t -> (t - i)/(t + i); increasing t runs
// counter-clockwise, and infinity sits at angle 0.
class IdealPoint {
 public:
  IdealPoint() = default;
  static IdealPoint from_angle(double a) {
    IdealPoint p;
    p.angle_ = wrap_angle(a);
    return p;
  }
  static IdealPoint infinity() { return from_angle(0.0); }
  static IdealPoint from_real(double t) {
    return from_angle(std::arg((Cx(t, -1.0)) / (Cx(t, 1.0))));
  }

  double angle() const { return angle_; }
  bool is_infinity() const { return std::abs(wrap_angle(angle_)) < 1e-15; }
  // Finite real value; only valid away from the point at infinity.
  double real_value() const {
    Cx w = std::exp(Cx(0.0, angle_));
    Cx t = Cx(0.0, 1.0) * (1.0 + w) / (1.0 - w);
    return t.real();
  }

  friend bool operator==(const IdealPoint& a, const IdealPoint& b) {
    return wrap_angle(a.angle_ - b.angle_) == 0.0;
  }

 private:
  double angle_ = 0.0;
};

// Chordal metric on the circle: a fixed representative of the visual-metric
// biLipschitz class.
inline double d_inf(const IdealPoint& x, const IdealPoint& y) {
  return 2.0 * std::abs(std::sin(0.5 * (x.angle() - y.angle())));
}

// True iff (x, y, z) are in counter-clockwise cyclic order.
inline bool cyclic_order(const IdealPoint& x, const IdealPoint& y,
                         const IdealPoint& z) {
  double u = wrap_angle(y.angle() - x.angle());
  double v = wrap_angle(z.angle() - x.angle());
  if (u == 0.0 || v == 0.0 || u == v)
    throw std::invalid_argument("cyclic_order: coincident points");
  u = u <= 0.0 ? u + 2.0 * kPi : u;
  v = v <= 0.0 ? v + 2.0 * kPi : v;
  return u < v;
}

// Mobius action of a real 2x2 matrix on the circle, through the Cayley view.
inline IdealPoint mobius_apply(const Eigen::Matrix2d& m, const IdealPoint& p) {
  // Act on the projective pair (t : 1); infinity is (1 : 0).
  double t0, t1;
  if (p.is_infinity()) {
    t0 = 1.0;
    t1 = 0.0;
  } else {
    t0 = p.real_value();
    t1 = 1.0;
  }
  double u0 = m(0, 0) * t0 + m(0, 1) * t1;
  double u1 = m(1, 0) * t0 + m(1, 1) * t1;
  if (std::abs(u1) <= 1e-300 * std::abs(u0)) return IdealPoint::infinity();
  return IdealPoint::from_real(u0 / u1);
}

// Complete flag in C^d, carried by a full-rank matrix whose leading k columns
// span F^k. Canonical representative: QR orthonormalization preserving the
// filtration, R with positive diagonal, then each column's largest-modulus
// entry made real positive. Two bases differing by a right upper-triangular
// factor canonicalize identically.
class Flag {
 public:
  Flag() = default;
  explicit Flag(const SqMat& basis, const Tolerances& tols = default_tols())
      : basis_(canonicalize(basis, tols)) {}

  int d() const { return static_cast<int>(basis_.rows()); }
  const SqMat& basis() const { return basis_; }
  // First k columns, spanning F^k.
  SqMat part(int k) const { return basis_.leftCols(k); }
  CxVec line() const { return basis_.col(0); }

  static SqMat canonicalize(const SqMat& basis_in, const Tolerances& tols) {
    const int d = static_cast<int>(basis_in.rows());
    if (basis_in.cols() != d) throw DimensionMismatch("Flag: basis not square");
    // Column scaling is a right-diagonal action and does not change the
    // flag; normalizing first makes the rank test scale-free.
    SqMat basis = basis_in;
    for (int j = 0; j < d; ++j) {
      double n = basis.col(j).norm();
      if (n <= tols.tol_zero) throw Singular("Flag: zero basis column");
      basis.col(j) /= n;
    }
    Eigen::HouseholderQR<SqMat> qr(basis);
    SqMat q = qr.householderQ();
    SqMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
      Cx rjj = r(j, j);
      if (std::abs(rjj) <= tols.tol_zero) throw Singular("Flag: basis rank-deficient");
      q.col(j) *= rjj / std::abs(rjj);
    }
    for (int j = 0; j < d; ++j) {
      int piv = 0;
      q.col(j).cwiseAbs().maxCoeff(&piv);
      Cx ph = q(piv, j) / std::abs(q(piv, j));
      q.col(j) /= ph;
    }
    return q;
  }

 private:
  SqMat basis_;
};

inline Flag apply_flag(const SqMat& g, const Flag& f) { return Flag(g * f.basis()); }

// Distance between flags: largest operator-norm gap between the orthogonal
// projectors onto F^k and G^k. Zero iff the flags coincide.
inline double flag_dist(const Flag& f, const Flag& g) {
  if (f.d() != g.d()) throw DimensionMismatch("flag_dist");
  double worst = 0.0;
  for (int k = 1; k < f.d(); ++k) {
    SqMat pf = f.part(k) * f.part(k).adjoint();
    SqMat pg = g.part(k) * g.part(k).adjoint();
    worst = std::max(worst, operator_norm(pf - pg));
  }
  return worst;
}

// Distance between the lines spanned by two nonzero vectors.
inline double line_dist(const CxVec& a, const CxVec& b) {
  CxVec an = a / a.norm(), bn = b / b.norm();
  SqMat pa = an * an.adjoint(), pb = bn * bn.adjoint();
  return operator_norm(pa - pb);
}

// |det| of assembled columns, scaled by the product of column norms.
inline double relative_det(const SqMat& cols) {
  double scale = 1.0;
  for (int j = 0; j < cols.cols(); ++j) scale *= cols.col(j).norm();
  if (scale == 0.0) return 0.0;
  return std::abs(cols.determinant()) / scale;
}

inline bool is_transverse(const Flag& f, const Flag& g, double tol = 1e-10) {
  if (f.d() != g.d()) throw DimensionMismatch("is_transverse");
  const int d = f.d();
  for (int k = 1; k < d; ++k) {
    SqMat cols(d, d);
    cols << f.part(k), g.part(d - k);
    if (relative_det(cols) <= tol) return false;
  }
  return true;
}

struct ExponentSumMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline bool in_general_position(const std::vector<Flag>& flags,
                                const std::vector<int>& exps, double tol = 1e-10) {
  if (flags.empty()) throw std::invalid_argument("in_general_position: no flags");
  const int d = flags[0].d();
  int sum = 0;
  for (int e : exps) sum += e;
  if (sum != d || exps.size() != flags.size())
    throw ExponentSumMismatch("in_general_position: exponents must sum to d");
  SqMat cols(d, d);
  int at = 0;
  for (size_t i = 0; i < flags.size(); ++i) {
    if (exps[i] == 0) continue;
    cols.middleCols(at, exps[i]) = flags[i].part(exps[i]);
    at += exps[i];
  }
  return relative_det(cols) > tol;
}

// Tuple-level variant: every choice of positive exponents summing to d.
// Vacuously true when the tuple has more members than d.
inline bool in_general_position(const std::vector<Flag>& flags, double tol = 1e-10) {
  const int d = flags[0].d();
  const int m = static_cast<int>(flags.size());
  if (m > d) return true;
  std::vector<int> exps(m, 1);
  // Enumerate compositions of d into m positive parts.
  std::function<bool(int, int)> rec = [&](int i, int left) -> bool {
    if (i == m - 1) {
      exps[i] = left;
      return in_general_position(flags, exps, tol);
    }
    for (int e = 1; e <= left - (m - 1 - i); ++e) {
      exps[i] = e;
      if (!rec(i + 1, left - e)) return false;
    }
    return true;
  };
  return rec(0, d);
}

// Action of a unimodular 2x2 matrix on Sym^{d-1}(C^2) in the monomial basis
// x^{d-1}, x^{d-2} y, ..., y^{d-1}.
inline SqMat symmetric_power(const Eigen::Matrix2cd& a, int d,
                             const Tolerances& tols = default_tols()) {
  if (std::abs(a.determinant() - Cx(1.0)) > 1e-9)
    throw NotUnimodular("symmetric_power: det != 1");
  (void)tols;
  const int n = d - 1;
  SqMat out = SqMat::Zero(d, d);
  // Column c is the expansion of (a00 x + a10 y)^{n-c} (a01 x + a11 y)^c.
  for (int c = 0; c <= n; ++c) {
    std::vector<Cx> poly{Cx(1.0)};  // coefficients in descending x-degree
    auto mul = [&poly](Cx px, Cx py) {
      std::vector<Cx> next(poly.size() + 1, Cx(0.0));
      for (size_t k = 0; k < poly.size(); ++k) {
        next[k] += poly[k] * px;
        next[k + 1] += poly[k] * py;
      }
      poly = std::move(next);
    };
    for (int k = 0; k < n - c; ++k) mul(a(0, 0), a(1, 0));
    for (int k = 0; k < c; ++k) mul(a(0, 1), a(1, 1));
    for (int r = 0; r <= n; ++r) out(r, c) = poly[r];
  }
  return out;
}

inline SqMat symmetric_power(const Eigen::Matrix2d& a, int d) {
  Eigen::Matrix2cd ac = a.cast<Cx>();
  double det = a.determinant();
  // Allow any positive-determinant real matrix by rescaling to SL_2.
  if (det <= 0.0) throw NotUnimodular("symmetric_power: det <= 0");
  ac /= std::sqrt(det);
  return symmetric_power(ac, d);
}

// Osculating flag of the rational normal curve at t; at infinity, the
// reversed standard flag. Uses the binomial parameterization so that
// symmetric_power(A) . veronese_flag(t) = veronese_flag(A . t). For |t| > 1
// the flag is computed in the reversed chart at 1/t (the curve satisfies
// nu(1/s) ~ J nu(s) with J the coordinate reversal), which keeps the basis
// well conditioned over the whole line.
inline Flag veronese_flag(const IdealPoint& p, int d) {
  SqMat basis = SqMat::Zero(d, d);
  if (p.is_infinity()) {
    for (int j = 0; j < d; ++j) basis(j, j) = 1.0;  // e_1, e_2, ..., e_d
    return Flag(basis);
  }
  double t = p.real_value();
  bool reversed = std::abs(t) > 1.0;
  if (reversed) t = 1.0 / t;
  const int n = d - 1;
  std::vector<double> binom(d);
  binom[0] = 1.0;
  for (int k = 1; k <= n; ++k) binom[k] = binom[k - 1] * (n - k + 1) / k;
  // Row r of column j: d^j/dt^j [ binom[r] t^{n-r} ].
  for (int j = 0; j < d; ++j) {
    for (int r = 0; r < d; ++r) {
      int e = n - r;  // exponent of t
      if (e < j) continue;
      double c = binom[r];
      for (int k = 0; k < j; ++k) c *= (e - k);
      basis(r, j) = c * std::pow(t, e - j);
    }
  }
  if (reversed) basis = basis.colwise().reverse().eval();
  return Flag(basis);
}

// Projective frame: a pair of flags and a line in generic position, on which
// PGL_d acts simply transitively.
class ProjFrame {
 public:
  ProjFrame(const Flag& f, const Flag& g, const CxVec& p,
            double tol = 1e-10)
      : f_(f), g_(g), p_(p / p.norm()) {
    adapted_ = frame_adapted_basis(f_, g_, p_, tol);
  }

  const Flag& F() const { return f_; }
  const Flag& G() const { return g_; }
  const CxVec& p() const { return p_; }
  // Basis b_1..b_d with b_k spanning F^k cap G^{d-k+1} scaled so p = sum b_k.
  const SqMat& adapted_basis() const { return adapted_; }

  // b_k spans F^k cap G^{d-k+1}; rescaled so that p = sum_k b_k. Throws
  // DegenerateFrame when some coefficient vanishes, which is exactly the
  // failure of F^{k-1} + G^{d-k} + p = C^d.
  static SqMat frame_adapted_basis(const Flag& f, const Flag& g, const CxVec& p,
                                   double tol = 1e-10) {
    const int d = f.d();
    if (g.d() != d || p.size() != d) throw DimensionMismatch("ProjFrame");
    if (!is_transverse(f, g, tol)) throw DegenerateFrame("ProjFrame: flags not transverse");
    SqMat basis(d, d);
    for (int k = 1; k <= d; ++k) {
      basis.col(k - 1) = intersect_line(f, g, k, tol);
    }
    // Solve p = basis * c and absorb the coefficients.
    CxVec c = basis.fullPivLu().solve(p);
    for (int k = 0; k < d; ++k) {
      if (std::abs(c(k)) <= tol)
        throw DegenerateFrame("ProjFrame: p lies in F^{k-1} + G^{d-k}");
      basis.col(k) *= c(k);
    }
    return basis;
  }

  // One-dimensional intersection F^k cap G^{d-k+1} of a transverse pair.
  static CxVec intersect_line(const Flag& f, const Flag& g, int k, double tol) {
    const int d = f.d();
    // v = F_k a = G_{d-k+1} b; stack [F_k | -G_{d-k+1}]. The d x (d+1)
    // system always has a kernel; transversality makes it exactly
    // one-dimensional, i.e. the smallest genuine singular value stays away
    // from zero.
    SqMat sys(d, d + 1);
    sys << f.part(k), -g.part(d - k + 1);
    Eigen::JacobiSVD<SqMat> svd(sys, Eigen::ComputeFullV);
    if (svd.singularValues()(d - 1) < tol * svd.singularValues()(0)) {
      throw DegenerateFrame("intersect_line: intersection not a line");
    }
    CxVec ker = svd.matrixV().col(d);
    CxVec v = f.part(k) * ker.head(k);
    return v / v.norm();
  }

 private:
  Flag f_, g_;
  CxVec p_;
  SqMat adapted_;
};

// Unique-in-PSL transition with M . src = dst, as an SL-normalized matrix.
inline SqMat frame_transition(const ProjFrame& src, const ProjFrame& dst) {
  return sl_normalize(dst.adapted_basis() * src.adapted_basis().inverse());
}

}  // namespace pleat
