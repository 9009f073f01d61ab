#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace pleat;
using namespace pleat::testing;

TEST_CASE("cyclic order on the circle") {
  auto p = [](double a) { return IdealPoint::from_angle(a); };
  CHECK(cyclic_order(p(0.0), p(2.0 * kPi / 3.0), p(4.0 * kPi / 3.0)));
  CHECK_FALSE(cyclic_order(p(4.0 * kPi / 3.0), p(2.0 * kPi / 3.0), p(0.0)));
  auto g = rng(51);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (int k = 0; k < 100; ++k) {
    double a = u(g), b = u(g), c = u(g), rot = u(g);
    if (std::abs(a - b) < 1e-6 || std::abs(b - c) < 1e-6 || std::abs(a - c) < 1e-6)
      continue;
    CHECK(cyclic_order(p(a), p(b), p(c)) == cyclic_order(p(a + rot), p(b + rot), p(c + rot)));
  }
  CHECK_THROWS_AS(cyclic_order(p(1.0), p(1.0), p(2.0)), std::invalid_argument);
}

TEST_CASE("chordal metric") {
  auto p = [](double a) { return IdealPoint::from_angle(a); };
  CHECK(d_inf(p(0.4), p(0.4)) == 0.0);
  CHECK(d_inf(p(0.0), p(kPi)) == Catch::Approx(2.0));
  auto g = rng(52);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (int k = 0; k < 100; ++k) {
    IdealPoint a = p(u(g)), b = p(u(g)), c = p(u(g));
    CHECK(d_inf(a, b) == Catch::Approx(d_inf(b, a)));
    CHECK(d_inf(a, c) <= d_inf(a, b) + d_inf(b, c) + 1e-12);
  }
}

TEST_CASE("cayley transform view") {
  // Increasing real value runs counter-clockwise.
  IdealPoint a = IdealPoint::from_real(-3.0);
  IdealPoint b = IdealPoint::from_real(0.0);
  IdealPoint c = IdealPoint::from_real(5.0);
  CHECK(cyclic_order(a, b, c));
  CHECK(b.real_value() == Catch::Approx(0.0).margin(1e-12));
  CHECK(c.real_value() == Catch::Approx(5.0));
  CHECK(IdealPoint::infinity().is_infinity());
  // Mobius action matches real arithmetic.
  Eigen::Matrix2d m;
  m << 2.0, 1.0, 1.0, 1.0;
  CHECK(mobius_apply(m, b).real_value() == Catch::Approx(1.0));  // (2*0+1)/(0+1)
}

TEST_CASE("strip separation basics") {
  LaminationModel strip = zigzag_strip(3);
  auto ps = strip.all_plaques();
  REQUIRE(ps.size() == 3);

  SECTION("single plaque between its own two edges") {
    const Plaque& t = ps[1];
    auto r = strip.plaques_between(t.edge(0), t.edge(1), 0.0);
    bool found = false;
    for (auto& sp : r.plaques) found = found || (sp.plaque.id == t.id);
    CHECK(found);
  }

  SECTION("three plaques in strip order between the outer edges") {
    // Plaque k of a zigzag strip is (w_k, w_{k+1}, w_{k+2}); the outermost
    // edges are (w_0, w_1) and (w_3, w_4).
    auto vertex = [&](int k) {
      // w_k appears as a vertex of the plaques containing it; recover it
      // from the plaque list.
      return k < 3 ? ps[0].v[0] : ps[2].v[0];
    };
    (void)vertex;
    // Reconstruct w explicitly from plaque vertex sets.
    LaminationModel fresh = zigzag_strip(3);
    std::vector<IdealPoint> w(5);
    // Plaques were built as (w_k, w_{k+1}, w_{k+2}) then ccw-sorted; recover
    // w_k as the vertex of plaque k not shared with plaque k+1, etc.
    auto not_in = [](const Plaque& t, const Plaque& s) {
      for (const IdealPoint& p : t.v)
        if (!s.has_vertex(p)) return p;
      throw std::logic_error("vertex recovery");
    };
    w[0] = not_in(ps[0], ps[1]);
    w[4] = not_in(ps[2], ps[1]);
    w[1] = not_in(ps[1], ps[2]);
    w[3] = not_in(ps[1], ps[0]);
    Leaf e1(w[0], w[1]), e2(w[3], w[4]);
    auto r = strip.plaques_between(e1, e2, 0.0);
    REQUIRE(r.plaques.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(r.plaques[k].plaque.id == ps[k].id);
    // Total order reversed when the pair is reversed.
    auto r_rev = strip.plaques_between(e2, e1, 0.0);
    REQUIRE(r_rev.plaques.size() == 3);
    for (int k = 0; k < 3; ++k)
      CHECK(r.plaques[k].plaque.id == r_rev.plaques[2 - k].plaque.id);
  }
}

TEST_CASE("coherent labelling") {
  LaminationModel strip = zigzag_strip(3);
  auto ps = strip.all_plaques();
  const Plaque& t = ps[1];
  // Between its own edges: x2 is the shared endpoint.
  Leaf e0 = t.edge(0), e1 = t.edge(1);
  CoherentLabel lab = coherent_labelling(t, e0, e1);
  CHECK((e0.has_endpoint(lab.x2) && e1.has_endpoint(lab.x2)));
  CHECK(lab.h_minus.has_endpoint(lab.x1));
  CHECK(lab.h_plus.has_endpoint(lab.x3));
  // Reversing the pair swaps x1 and x3.
  CoherentLabel rev = coherent_labelling(t, e1, e0);
  CHECK(same_point(rev.x1, lab.x3));
  CHECK(same_point(rev.x3, lab.x1));
  CHECK(same_point(rev.x2, lab.x2));
  // Non-separating plaque throws.
  CHECK_THROWS_AS(coherent_labelling(ps[0], ps[2].edge(0), ps[2].edge(1)),
                  NotSeparating);
}

TEST_CASE("separating pair") {
  LaminationModel strip = zigzag_strip(4);
  auto ps = strip.all_plaques();
  SECTION("adjacent plaques share the separating edge") {
    auto [e1, e2] = separating_pair(strip, ps[1], ps[2]);
    CHECK(e1.same(e2));
    bool shared = false;
    for (const Leaf& e : ps[1].edges())
      for (const Leaf& f : ps[2].edges()) shared = shared || (e.same(f) && e.same(e1));
    CHECK(shared);
  }
  SECTION("endpoints of the strip face through inner edges") {
    auto [e1, e2] = separating_pair(strip, ps[0], ps[3]);
    CHECK_FALSE(e1.same(e2));
    // Oracle: no other edge of either plaque separates the pair.
    for (const Plaque* t : {&ps[0], &ps[3]})
      for (const Leaf& e : t->edges())
        if (!e.same(e1) && !e.same(e2)) CHECK_FALSE(leaf_separates(e, e1, e2));
  }
}

TEST_CASE("central plaque") {
  // Tripod strip: a central triangle with a triangle attached to each edge.
  auto p = [](double a) { return IdealPoint::from_angle(a); };
  IdealPoint a = p(0.3), b = p(2.3), c = p(4.3);
  IdealPoint ab = p(1.3), bc = p(3.3), ca = p(5.3);
  LaminationModel tripod = LaminationModel::strip({
      {a, b, c},      // center
      {a, ab, b},     // attached across (a, b)
      {b, bc, c},     // across (b, c)
      {c, ca, a},     // across (c, a)
  });
  auto ps = tripod.all_plaques();
  Leaf g1(a, ab), g2(b, bc), g3(c, ca);
  Plaque center = tripod.central_plaque(g1, g2, g3);
  CHECK(center.id == ps[0].id);
  // Three edges of one plaque: that plaque.
  Plaque self = tripod.central_plaque(ps[0].edge(0), ps[0].edge(1), ps[0].edge(2));
  CHECK(self.id == ps[0].id);
  // Collinear configuration: the middle leaf separates the others.
  LaminationModel strip = zigzag_strip(3);
  auto sp = strip.all_plaques();
  auto [f1, f2] = separating_pair(strip, sp[0], sp[2]);
  Leaf mid = separating_pair(strip, sp[1], sp[2]).first;
  CHECK_THROWS_AS(strip.central_plaque(f1, mid, f2), SeparationHypothesisFails);
}

TEST_CASE("ladder structure and invariance") {
  LaminationModel ladder = std_ladder(20);
  Leaf ax = ladder.axis();
  CHECK(ax.has_endpoint(IdealPoint::from_real(0.0)));
  CHECK(ax.has_endpoint(IdealPoint::infinity()));

  // Applying the generator to block n reproduces block n+1.
  for (long n : {-3L, 0L, 4L}) {
    for (int side : {0, 1}) {
      Plaque t = ladder.plaque({side, n});
      Plaque tn = ladder.plaque({side, n + 1});
      Plaque moved = ladder.act(1, t);
      double worst = 0.0;
      for (int k = 0; k < 3; ++k) {
        double best = 2.0;
        for (int l = 0; l < 3; ++l) best = std::min(best, d_inf(moved.v[k], tn.v[l]));
        worst = std::max(worst, best);
      }
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("ladder separation matches a brute-force unroll") {
  LaminationModel ladder = std_ladder(30);
  Leaf g1 = Leaf(ladder.orbit_up(0), IdealPoint::infinity());   // upper a_0
  Leaf g2 = Leaf(ladder.orbit_dn(0), IdealPoint::from_real(0.0));  // lower a'_0
  double eps = 1e-4;
  auto r = ladder.plaques_between(g1, g2, eps);
  // Oracle: unroll every block and count separating plaques above the gap.
  size_t count = 0;
  for (long n = -30; n < 30; ++n)
    for (int side : {0, 1}) {
      Plaque t = ladder.plaque({side, n});
      if (!plaque_separates(t, g1, g2)) continue;
      if (coherent_labelling(t, g1, g2).gap() >= eps) ++count;
    }
  CHECK(r.plaques.size() == count);
  CHECK(r.plaques.size() > 5);
  // The order is monotone: each plaque's h_plus separates g1 from the next
  // plaque's h_plus.
  for (size_t k = 0; k + 1 < r.plaques.size(); ++k)
    CHECK(leaf_leq(r.plaques[k].label.h_plus, r.plaques[k + 1].label.h_minus, g1));
  // Tail is reported for the cut spiral.
  CHECK_FALSE(r.tails.empty());
}

TEST_CASE("ladder gaps decay geometrically") {
  LaminationModel ladder = std_ladder(25);
  Leaf g1 = Leaf(ladder.orbit_up(0), IdealPoint::infinity());
  Leaf ax = ladder.axis();
  auto r = ladder.plaques_between(g1, ax, 0.0);
  REQUIRE(r.plaques.size() > 10);
  // Gap summability proxy: partial power sums are monotone bounded.
  for (double nu : {0.5, 1.0}) {
    double prev = 0.0, sum = 0.0;
    for (const auto& sp : r.plaques) {
      sum += std::pow(sp.label.gap(), nu);
      CHECK(sum >= prev);
      prev = sum;
    }
    CHECK(sum < 1e4);
  }
  // Measured decay ratio of consecutive gaps approaches lambda^{-2}.
  double lam = 1.5;
  size_t n = r.plaques.size();
  double ratio = r.plaques[n - 1].label.gap() / r.plaques[n - 2].label.gap();
  bool close_down = std::abs(ratio - 1.0 / (lam * lam)) < 0.05;
  bool close_up = std::abs(ratio - lam * lam) < 0.25;
  CHECK((close_down || close_up));
}

TEST_CASE("right-to-left orientation is coherent") {
  LaminationModel ladder = std_ladder(10);
  Leaf g1 = Leaf(ladder.orbit_up(0), IdealPoint::infinity());
  Leaf g2 = Leaf(ladder.orbit_dn(0), IdealPoint::from_real(0.0));
  auto r = ladder.plaques_between(g1, g2, 1e-3);
  REQUIRE(r.plaques.size() >= 2);
  OrientedLeaf o1 = right_to_left(g1, g1, g2);
  for (const auto& sp : r.plaques) {
    OrientedLeaf oh = right_to_left(sp.label.h_minus, g1, g2);
    // Coherent orientation: forward endpoints nested on one side.
    // (g2+ <= g1+ < g1- <= g2-) or the reverse, as cyclic arcs.
    bool nested =
        same_point(o1.fwd, oh.fwd) || same_point(o1.bwd, oh.bwd) ||
        (cyclic_order(oh.fwd, o1.fwd, o1.bwd) && cyclic_order(o1.fwd, o1.bwd, oh.bwd));
    CHECK(nested);
  }
}
