// Complex scalars, the C/2piZ logarithm type, and small dense matrix kernels
// (SL normalization, projective distance, operator norms, eigenvalue sorting)
// shared by every other header.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pleat {

using Cx = std::complex<double>;
using SqMat = Eigen::MatrixXcd;
using CxVec = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

struct Tolerances {
  double tol_zero = 1e-12;  // below this, a magnitude counts as zero
  double tol_eq = 1e-9;     // below this, two values count as equal
};

inline const Tolerances& default_tols() {
  static Tolerances t;
  return t;
}

struct ZeroArgument : std::domain_error {
  using std::domain_error::domain_error;
};
struct Singular : std::domain_error {
  using std::domain_error::domain_error;
};
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Wraps t into (-pi, pi]. Half-open at -pi so every angle has one
// representative.
inline double wrap_angle(double t) {
  t = std::remainder(t, 2.0 * kPi);  // lands in [-pi, pi]
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

// Element of C/2piZ: re unbounded, im normalized to (-pi, pi] after every
// operation. The stored representative is the canonical one; exp() uses it.
class CLog {
 public:
  CLog() = default;
  CLog(double re, double im) : re_(re), im_(wrap_angle(im)) {}
  explicit CLog(Cx z) : CLog(z.real(), z.imag()) {}

  double re() const { return re_; }
  double im() const { return im_; }
  Cx value() const { return Cx(re_, im_); }
  Cx exp() const { return std::exp(value()); }

  CLog operator+(const CLog& o) const { return CLog(re_ + o.re_, im_ + o.im_); }
  CLog operator-(const CLog& o) const { return CLog(re_ - o.re_, im_ - o.im_); }
  CLog operator-() const { return CLog(-re_, -im_); }

  // Distance with the imaginary part compared on the circle.
  double dist(const CLog& o) const {
    return std::abs(re_ - o.re_) + std::abs(wrap_angle(im_ - o.im_));
  }

 private:
  double re_ = 0.0;
  double im_ = 0.0;
};

inline CLog clog_of(Cx z, const Tolerances& tols = default_tols()) {
  if (std::abs(z) <= tols.tol_zero) throw ZeroArgument("clog_of: |z| ~ 0");
  return CLog(std::log(std::abs(z)), std::arg(z));
}

inline double operator_norm(const SqMat& m) {
  return m.jacobiSvd().singularValues()(0);
}

// Principal d-th root: argument in (-pi/d, pi/d].
inline Cx principal_root(Cx z, int d) {
  CLog l = clog_of(z);
  return std::exp(Cx(l.re() / d, l.im() / d));
}

inline SqMat sl_normalize(const SqMat& m, const Tolerances& tols = default_tols()) {
  Cx det = m.determinant();
  if (std::abs(det) <= tols.tol_zero) throw Singular("sl_normalize: singular matrix");
  return m / principal_root(det, static_cast<int>(m.rows()));
}

// Distance in PSL_d(C): minimum over d-th roots of unity of the relative
// operator-norm gap between SL representatives.
inline double proj_dist(const SqMat& a, const SqMat& b,
                        const Tolerances& tols = default_tols()) {
  if (a.rows() != b.rows()) throw DimensionMismatch("proj_dist: size mismatch");
  const int d = static_cast<int>(a.rows());
  SqMat an = sl_normalize(a, tols);
  SqMat bn = sl_normalize(b, tols);
  double scale = operator_norm(an);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < d; ++k) {
    Cx w = std::exp(Cx(0.0, 2.0 * kPi * k / d));
    best = std::min(best, operator_norm(an - w * bn));
  }
  return best / scale;
}

// ||(M - I)^d|| in operator norm; zero exactly on unipotent matrices.
inline double unipotency_defect(const SqMat& m) {
  const int d = static_cast<int>(m.rows());
  SqMat n = m - SqMat::Identity(d, d);
  SqMat p = SqMat::Identity(d, d);
  for (int k = 0; k < d; ++k) p = p * n;
  return operator_norm(p);
}

// Eigenvalues sorted by modulus descending, ties broken by argument
// ascending, so lambda_1 >= ... >= lambda_d is deterministic.
inline std::vector<Cx> sorted_eigenvalues(const SqMat& m) {
  Eigen::ComplexEigenSolver<SqMat> es(m, /*computeEigenvectors=*/false);
  std::vector<Cx> ev(es.eigenvalues().data(),
                     es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](Cx a, Cx b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return std::arg(a) < std::arg(b);
  });
  return ev;
}

// Scalar-times-unipotent matrices have trace d*w; dividing by w recovers the
// unipotent SL representative.
inline SqMat unipotent_representative(const SqMat& m) {
  const int d = static_cast<int>(m.rows());
  Cx w = m.trace() / static_cast<double>(d);
  if (std::abs(w) < 1e-14) throw Singular("unipotent_representative: zero trace");
  return m / w;
}

}  // namespace pleat
