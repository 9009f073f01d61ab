// Productable plaque maps, ordered finite products, envelopes with a
// certified truncation bound, the renormalization combinator, and slithering
// maps.
#pragma once

#include "pleat/lamination.hpp"
#include "pleat/moves.hpp"

namespace pleat {

struct NotProductable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TailBoundUnreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutOfDomain : std::domain_error {
  using std::domain_error::domain_error;
};

// Limit map restricted to the ideal points of a model.
struct LimitMapData {
  int d = 2;
  std::function<Flag(const IdealPoint&)> eval;

  Flag operator()(const IdealPoint& p) const { return eval(p); }
};

inline LimitMapData veronese_limit_map(int d) {
  return LimitMapData{d, [d](const IdealPoint& p) { return veronese_flag(p, d); }};
}

// Plaque-indexed matrix assignment on the separating set of a leaf pair.
// The evaluator receives the plaque with its coherent labelling with respect
// to the ambient ordered pair (g1, g2).
struct PlaqueMap {
  Leaf g1, g2;
  std::function<SqMat(const SeparatedPlaque&)> eval;
};

inline SqMat finite_ordered_product(const PlaqueMap& map,
                                    const std::vector<SeparatedPlaque>& plaques,
                                    int d) {
  SqMat acc = SqMat::Identity(d, d);
  for (const SeparatedPlaque& sp : plaques) acc = acc * map.eval(sp);
  return acc;
}

// Measured productability constants and the realized truncation bound of one
// envelope evaluation.
struct EnvelopeDiagnostics {
  double A = 0.0;        // measured constant in ||M(T) - id|| <= A gap^nu
  double nu = 1.0;       // measured Holder exponent, clamped to (0, 1]
  double D = 1.0;        // bound on products of norms
  double tail_bound = 0.0;
  int plaques_used = 0;
};

struct EnvelopeResult {
  SqMat value;
  EnvelopeDiagnostics diag;
};

namespace detail {

// Measures productability constants on the truncated data. Only the tail of
// omitted plaques needs a bound, so the exponent is fitted on the
// smallest-gap window (the asymptotic regime the tail extrapolates), and A
// is the dominating constant there with a safety factor.
inline std::pair<double, double> fit_productability(std::vector<double> gaps,
                                                    std::vector<double> devs) {
  std::vector<std::pair<double, double>> pts;
  for (size_t k = 0; k < gaps.size(); ++k)
    if (gaps[k] > 0.0 && devs[k] > 1e-14) pts.emplace_back(gaps[k], devs[k]);
  if (pts.empty()) return {1.0, 0.0};
  std::sort(pts.begin(), pts.end());
  // Window: two decades above the smallest gap, widened until it holds at
  // least six samples.
  double cut = pts.front().first * 100.0;
  size_t n = 0;
  while (n < pts.size() && (pts[n].first <= cut || n < 6)) ++n;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    double x = std::log(pts[k].first), y = std::log(pts[k].second);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  double nu = 1.0;
  double denom = n * sxx - sx * sx;
  if (n >= 4 && denom > 1e-12) {
    nu = (n * sxy - sx * sy) / denom;
    if (nu < 0.05) throw NotProductable("deviation does not decay with gap size");
  }
  nu = std::clamp(nu, 0.05, 1.0);
  double a = 0.0;
  for (size_t k = 0; k < n; ++k)
    a = std::max(a, pts[k].second / std::pow(pts[k].first, nu));
  a *= 2.0;  // safety margin for the extrapolation
  if (a > 1e8) throw NotProductable("measured productability constant blew up");
  return {nu, a};
}

}  // namespace detail

// Envelope M->(h1, h2): the ordered product over all plaques separating h1
// and h2, truncated once the abstract tail bound A * D * sum of gap^nu over
// the omitted set drops below eps. Reversing (h1, h2) inverts the value.
inline EnvelopeResult envelope(const LaminationModel& model, const PlaqueMap& map,
                               const Leaf& h1, const Leaf& h2, int d,
                               double eps = 1e-9) {
  bool flip = false;
  Leaf a = h1, b = h2;
  if (!a.same(b) && !leaf_leq(a, b, map.g1)) {
    std::swap(a, b);
    flip = true;
  }

  EnvelopeResult out;
  double cutoff = 1e-2;
  for (int attempt = 0;; ++attempt) {
    SeparationRange range = model.plaques_between(a, b, cutoff);
    std::vector<double> gaps, devs, norms;
    std::vector<SqMat> mats;
    mats.reserve(range.plaques.size());
    for (const SeparatedPlaque& sp : range.plaques) {
      SqMat m = map.eval(sp);
      mats.push_back(m);
      gaps.push_back(sp.label.gap());
      devs.push_back(operator_norm(m - SqMat::Identity(d, d)));
      norms.push_back(std::max(1.0, operator_norm(m)));
    }
    // A finite range with nothing cut is exact; only a real tail needs the
    // measured constants.
    double nu = 1.0, A = 0.0;
    if (!range.tails.empty()) std::tie(nu, A) = detail::fit_productability(gaps, devs);
    double tail_sum = range.tail_power_sum(nu);
    double log_D = 0.0;
    for (double n : norms) log_D += std::log(n);
    log_D += A * tail_sum;  // log(1 + A g^nu) <= A g^nu over the tail
    double D = std::exp(std::min(log_D, 200.0));
    if (!std::isfinite(D)) throw NotProductable("norm products diverge");
    double bound = A * D * tail_sum;
    if (bound <= eps || range.tails.empty()) {
      SqMat acc = SqMat::Identity(d, d);
      for (const SqMat& m : mats) acc = acc * m;
      out.value = flip ? acc.inverse().eval() : acc;
      out.diag.A = A;
      out.diag.nu = nu;
      out.diag.D = D;
      out.diag.tail_bound = bound;
      out.diag.plaques_used = static_cast<int>(mats.size());
      return out;
    }
    if (attempt >= 24) throw TailBoundUnreachable("envelope: cutoff exhausted");
    cutoff *= 0.25;
  }
}

// Renormalized map N'(T) = M->(g1, h_{T,-}) N(T) M->(h_{T,+}, g1); its
// envelope satisfies N'->(h1, h2) = N->(h1, h2) M->(h2, h1).
inline PlaqueMap renormalize(const LaminationModel& model, const PlaqueMap& m,
                             const PlaqueMap& n, int d, double eps = 1e-10) {
  PlaqueMap out;
  out.g1 = n.g1;
  out.g2 = n.g2;
  out.eval = [&model, m, n, d, eps](const SeparatedPlaque& sp) -> SqMat {
    SqMat left = envelope(model, m, m.g1, sp.label.h_minus, d, eps).value;
    SqMat right = envelope(model, m, sp.label.h_plus, m.g1, d, eps).value;
    return left * n.eval(sp) * right;
  };
  return out;
}

// Productable map of flag transporters: T -> the unique unipotent fixing
// xi(x_{T,2}) and carrying xi(x_{T,3}) to xi(x_{T,1}).
inline PlaqueMap slithering_map(const LimitMapData& xi, const Leaf& g1, const Leaf& g2) {
  PlaqueMap map;
  map.g1 = g1;
  map.g2 = g2;
  map.eval = [xi](const SeparatedPlaque& sp) {
    return unique_unipotent(xi(sp.label.x1), xi(sp.label.x2), xi(sp.label.x3));
  };
  return map;
}

// Slithering map Sigma(g1, g2) compatible with xi, evaluated to tolerance
// eps.
inline EnvelopeResult slithering(const LimitMapData& xi, const LaminationModel& model,
                                 const Leaf& g1, const Leaf& g2, double eps = 1e-9) {
  if (g1.same(g2))
    return {SqMat::Identity(xi.d, xi.d), EnvelopeDiagnostics{}};
  PlaqueMap map = slithering_map(xi, g1, g2);
  return envelope(model, map, g1, g2, xi.d, eps);
}

}  // namespace pleat
