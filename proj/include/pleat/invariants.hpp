// Fock-Goncharov triple and double ratios of flag tuples, their logarithms,
// positivity of tuples, and projective classification.
#pragma once

#include <tuple>

#include "pleat/flags.hpp"

namespace pleat {

struct NotGeneralPosition : std::domain_error {
  using std::domain_error::domain_error;
};
struct NearDegenerate : std::domain_error {
  using std::domain_error::domain_error;
};

// Triple of positive integers summing to d.
struct IndexB {
  int j1 = 1, j2 = 1, j3 = 1;
  int d() const { return j1 + j2 + j3; }
  IndexB hat() const { return {j2, j1, j3}; }
  IndexB plus() const { return {j2, j3, j1}; }
  IndexB minus() const { return {j3, j1, j2}; }
  IndexB prime() const { return {j3, j2, j1}; }
  friend bool operator==(const IndexB& a, const IndexB& b) {
    return a.j1 == b.j1 && a.j2 == b.j2 && a.j3 == b.j3;
  }
  friend bool operator<(const IndexB& a, const IndexB& b) {
    return std::tie(a.j1, a.j2, a.j3) < std::tie(b.j1, b.j2, b.j3);
  }
};

// Pair of positive integers summing to d.
struct IndexA {
  int i1 = 1, i2 = 1;
  int d() const { return i1 + i2; }
  IndexA hat() const { return {i2, i1}; }
  friend bool operator==(const IndexA& a, const IndexA& b) {
    return a.i1 == b.i1 && a.i2 == b.i2;
  }
  friend bool operator<(const IndexA& a, const IndexA& b) {
    return std::tie(a.i1, a.i2) < std::tie(b.i1, b.i2);
  }
};

// Empty for d = 2.
inline std::vector<IndexB> all_indices_B(int d) {
  std::vector<IndexB> out;
  for (int j1 = 1; j1 <= d - 2; ++j1)
    for (int j2 = 1; j2 <= d - 1 - j1; ++j2) out.push_back({j1, j2, d - j1 - j2});
  return out;
}

inline std::vector<IndexA> all_indices_A(int d) {
  std::vector<IndexA> out;
  for (int i1 = 1; i1 <= d - 1; ++i1) out.push_back({i1, d - i1});
  return out;
}

namespace detail {

// Wedge f1^{a} ^ f2^{b} ^ f3^{c} with a+b+c = d, evaluated as the determinant
// of the assembled column blocks. An exponent of zero contributes nothing and
// an exponent of d is the full basis.
inline Cx wedge3(const Flag& f1, int a, const Flag& f2, int b, const Flag& f3,
                 int c) {
  const int d = f1.d();
  SqMat cols(d, d);
  int at = 0;
  if (a > 0) cols.middleCols(at, a) = f1.part(a), at += a;
  if (b > 0) cols.middleCols(at, b) = f2.part(b), at += b;
  if (c > 0) cols.middleCols(at, c) = f3.part(c), at += c;
  return cols.determinant();
}

inline void guard_degenerate(Cx den, double scale, double tol) {
  if (std::abs(den) <= tol * scale)
    throw NearDegenerate("invariant: denominator determinant near zero");
}

}  // namespace detail

// The j-triple ratio of a general-position triple: a six-factor quotient of
// wedge determinants. Structurally invariant under rescaling of any f_i^k.
inline Cx triple_ratio(const Flag& f1, const Flag& f2, const Flag& f3,
                       const IndexB& j, double tol = 1e-13) {
  if (j.d() != f1.d()) throw DimensionMismatch("triple_ratio: index sum != d");
  if (!in_general_position({f1, f2, f3}))
    throw NotGeneralPosition("triple_ratio: flags not in general position");
  using detail::wedge3;
  Cx n1 = wedge3(f1, j.j1 + 1, f2, j.j2, f3, j.j3 - 1);
  Cx d1 = wedge3(f1, j.j1 - 1, f2, j.j2, f3, j.j3 + 1);
  Cx n2 = wedge3(f1, j.j1, f2, j.j2 - 1, f3, j.j3 + 1);
  Cx d2 = wedge3(f1, j.j1, f2, j.j2 + 1, f3, j.j3 - 1);
  Cx n3 = wedge3(f1, j.j1 - 1, f2, j.j2 + 1, f3, j.j3);
  Cx d3 = wedge3(f1, j.j1 + 1, f2, j.j2 - 1, f3, j.j3);
  // Canonical bases are orthonormal, so determinants are O(1).
  detail::guard_degenerate(d1, 1.0, tol);
  detail::guard_degenerate(d2, 1.0, tol);
  detail::guard_degenerate(d3, 1.0, tol);
  return (n1 / d1) * (n2 / d2) * (n3 / d3);
}

// The i-double ratio of (G1, G2, H1, H2); depends on H1, H2 only through
// their lines, which may be handed in directly.
inline Cx double_ratio(const Flag& g1, const Flag& g2, const CxVec& h1,
                       const CxVec& h2, const IndexA& i, double tol = 1e-13) {
  const int d = g1.d();
  if (i.d() != d) throw DimensionMismatch("double_ratio: index sum != d");
  auto wedge = [&](int a, int b, const CxVec& h) {
    SqMat cols(d, d);
    int at = 0;
    if (a > 0) cols.middleCols(at, a) = g1.part(a), at += a;
    if (b > 0) cols.middleCols(at, b) = g2.part(b), at += b;
    cols.col(at) = h / h.norm();
    return cols.determinant();
  };
  Cx n1 = wedge(i.i1, i.i2 - 1, h1);
  Cx d1 = wedge(i.i1, i.i2 - 1, h2);
  Cx n2 = wedge(i.i1 - 1, i.i2, h2);
  Cx d2 = wedge(i.i1 - 1, i.i2, h1);
  detail::guard_degenerate(d1, 1.0, tol);
  detail::guard_degenerate(d2, 1.0, tol);
  if (std::abs(n1) <= tol || std::abs(n2) <= tol)
    throw NotGeneralPosition("double_ratio: degenerate quadruple");
  return -(n1 / d1) * (n2 / d2);
}

inline Cx double_ratio(const Flag& g1, const Flag& g2, const Flag& h1,
                       const Flag& h2, const IndexA& i, double tol = 1e-13) {
  return double_ratio(g1, g2, h1.line(), h2.line(), i, tol);
}

inline CLog tau(const Flag& f1, const Flag& f2, const Flag& f3, const IndexB& j) {
  return clog_of(triple_ratio(f1, f2, f3, j));
}

inline CLog sigma(const Flag& g1, const Flag& g2, const CxVec& h1,
                  const CxVec& h2, const IndexA& i) {
  return clog_of(double_ratio(g1, g2, h1, h2, i));
}

inline CLog sigma(const Flag& g1, const Flag& g2, const Flag& h1, const Flag& h2,
                  const IndexA& i) {
  return sigma(g1, g2, h1.line(), h2.line(), i);
}

// Scale-aware test for "real" and "real positive" values.
inline bool is_real(Cx z, double tol) { return std::abs(z.imag()) < tol * (1.0 + std::abs(z.real())); }

// A cyclically ordered tuple is positive iff every triple ratio of an ordered
// sub-triple is real positive and every double ratio of a cyclically ordered
// 4-sub-tuple is real.
inline bool is_positive_tuple(const std::vector<Flag>& flags, double tol = 1e-8) {
  const int m = static_cast<int>(flags.size());
  if (m < 3) throw std::invalid_argument("is_positive_tuple: need >= 3 flags");
  const int d = flags[0].d();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        if (a == b || b == c || a == c) continue;
        for (const IndexB& j : all_indices_B(d)) {
          Cx t = triple_ratio(flags[a], flags[b], flags[c], j);
          if (!is_real(t, tol) || t.real() <= 0.0) return false;
        }
      }
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c)
        for (int e = c + 1; e < m; ++e) {
          // All cyclic rotations of (a, b, c, e) give the same reality test up
          // to the double-ratio symmetries, so one representative suffices.
          for (const IndexA& i : all_indices_A(d)) {
            Cx r = double_ratio(flags[a], flags[b], flags[c], flags[e], i);
            if (!is_real(r, tol)) return false;
          }
        }
  return true;
}

// Two general-position triples are PGL-equivalent iff all tau values agree.
inline bool triples_projectively_equal(const Flag& f1, const Flag& f2,
                                       const Flag& f3, const Flag& g1,
                                       const Flag& g2, const Flag& g3,
                                       double tol = 1e-8) {
  for (const IndexB& j : all_indices_B(f1.d())) {
    if (tau(f1, f2, f3, j).dist(tau(g1, g2, g3, j)) > tol) return false;
  }
  return true;
}

}  // namespace pleat
