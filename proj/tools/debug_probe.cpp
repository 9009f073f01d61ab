#include <cstdio>
#include "pleat/products.hpp"
using namespace pleat;

int main() {
  Eigen::Matrix2d a; a << 1.5, 0, 0, 1/1.5;
  auto ladder = LaminationModel::ladder(a, IdealPoint::from_real(1.0), IdealPoint::from_real(-1.0), 40);
  LimitMapData xi = veronese_limit_map(3);
  for (long s1 : {-3L, 0L, 3L}) for (long s2 : {-3L, 0L, 3L}) {
    Leaf g1(ladder.orbit_up(s1), IdealPoint::infinity());
    Leaf g2(ladder.orbit_dn(s2), IdealPoint::from_real(0.0));
    try {
      auto r = slithering(xi, ladder, g1, g2, 1e-6);
      auto b = slithering(xi, ladder, g2, g1, 1e-6);
      std::printf("pair (%ld,%ld): ok bound=%.2e A=%.2g nu=%.2g D=%.2g used=%d inv_res=%.2e\n",
                  s1, s2, r.diag.tail_bound, r.diag.A, r.diag.nu, r.diag.D,
                  r.diag.plaques_used,
                  proj_dist(r.value, SqMat(b.value.inverse())));
    } catch (const std::exception& e) {
      std::printf("pair (%ld,%ld): THROW %s\n", s1, s2, e.what());
    }
  }
  return 0;
}
