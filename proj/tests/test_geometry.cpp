#include <cmath>
#include <sstream>

#include "doctest.h"
#include "harnacklab/grushin_geometry.hpp"

using namespace hlab;
using namespace hlab::grushin;

TEST_CASE("dtilde hand values") {
  CHECK(dtilde({0, 0}, {0, 1}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dtilde({1, 0}, {1, 1}) == doctest::Approx(std::sqrt(6.0) - std::sqrt(2.0)).epsilon(1e-14));
  // purely horizontal: the root terms cancel
  CHECK(dtilde({1, 0}, {3, 0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dtilde({0.7, -0.2}, {0.7, -0.2}) == 0.0);
  CHECK(dtilde({0.3, 1.0}, {-1.2, 0.5}) == doctest::Approx(dtilde({-1.2, 0.5}, {0.3, 1.0})).epsilon(1e-15));
}

TEST_CASE("dtilde scales by t under the dilations") {
  const Point2 pts[][2] = {{{0.3, 1.0}, {-1.2, 0.5}}, {{0, 0}, {0, 1}}, {{2, -1}, {0.5, 3}}};
  for (double t : {0.25, 0.5, 3.0}) {
    for (const auto& pq : pts) {
      double lhs = dtilde(dilate(t, pq[0]), dilate(t, pq[1]));
      CHECK(lhs == doctest::Approx(t * dtilde(pq[0], pq[1])).epsilon(1e-13));
    }
  }
}

TEST_CASE("rho and sigma hand values") {
  CHECK(rho({1, 0}, {0, 0}) == doctest::Approx(1.0));
  CHECK(rho({0, 0}, {0, 1}) == doctest::Approx(std::sqrt(2.0)));
  // the pole matters for sigma
  CHECK(sigma({0, 0}, {1, 0}) == doctest::Approx(std::pow(3.0, 0.25)));
  CHECK(sigma({1, 0}, {0, 0}) == doctest::Approx(1.0));
  CHECK(sigma({0.4, 0.1}, {0.4, 0.1}) == 0.0);
}

TEST_CASE("level_h switches branch at |y1| = r") {
  Point2 x{0.5, 0.3};
  Point2 near{0.2, 0.0};
  Point2 far{2.0, 0.0};
  CHECK(level_h(1.0, x, near) == doctest::Approx(sigma(x, near)));
  double s = sigma(x, far);
  CHECK(level_h(1.0, x, far) == doctest::Approx(s * s / 2.0));
}

TEST_CASE("box half widths, area and gauge") {
  auto hw = box_half_widths({-2, 0}, 1.0);
  CHECK(hw.x1 == 1.0);
  CHECK(hw.x2 == 3.0);
  CHECK(box_area({2, 5}, 0.5) == doctest::Approx(2.5));
  CHECK(box_area({0, 0}, 2.0) / box_area({0, 0}, 1.0) == doctest::Approx(8.0));
  // gauge C solves |p1| = C r or |p2| = C r (C r + |c1|)
  CHECK(box_gauge({0, 0}, 1.0, {0.5, 0.0}) == doctest::Approx(0.5));
  CHECK(box_gauge({0, 0}, 1.0, {0.0, 2.0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(box_gauge({1, 0}, 1.0, {1.0, 6.0}) == doctest::Approx(2.0));
}

TEST_CASE("box membership is open") {
  auto b = RegionDescriptor::box({0, 0}, 1.0);
  CHECK(contains(b, {0.99, 0.99}));
  CHECK_FALSE(contains(b, {1.0, 0.0}));
  CHECK_FALSE(contains(b, {0.0, -1.0}));
}

TEST_CASE("box measure converges to the closed form") {
  for (Point2 c : {Point2{0, 0}, Point2{1.5, -0.5}}) {
    for (double r : {1.0, 0.3}) {
      auto m = region_measure(RegionDescriptor::box(c, r));
      double want = 4.0 * r * r * (r + std::abs(c.x1));
      CHECK(std::abs(m.area - want) <= m.error_bound + 1e-12);
      CHECK(m.area == doctest::Approx(want).epsilon(1e-3));
    }
  }
}

TEST_CASE("box diameter is the diagonal") {
  auto d = region_diameter(RegionDescriptor::box({0, 0}, 1.0));
  CHECK(d.diameter == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("regions reject bad radii") {
  CHECK_THROWS_AS(RegionDescriptor::box({0, 0}, 0.0).validate(), InvalidParameter);
  CHECK_THROWS_AS(RegionDescriptor::ring_h({0, 0}, 2.0, 1.0).validate(), InvalidParameter);
  CHECK_THROWS_AS(region_kind_from_string("disc"), InvalidParameter);
  CHECK(region_kind_from_string(to_string(RegionKind::H)) == RegionKind::H);
}

TEST_CASE("btilde balls are dtilde sublevel sets") {
  auto b = RegionDescriptor::btilde({0.5, 0.2}, 1.0);
  Halton2 seq(3);
  for (int k = 0; k < 200; ++k) {
    Point2 p = seq.next_in({-3, -3}, {3, 3});
    CHECK(contains(b, p) == (dtilde({0.5, 0.2}, p) < 1.0));
  }
}

TEST_CASE("structure constants on a few regions stay below the bound") {
  auto regions = sample_regions(1, 8);
  for (auto kind : {StructureKind::BTildeVsBox, StructureKind::GVsBox, StructureKind::HVsBox}) {
    auto rep = structure_constant(kind, regions, 128);
    CHECK(rep.constant >= 1.0);
    CHECK(rep.constant <= 16.0);
    CHECK(inclusions_hold(kind, regions, rep.constant * (1.0 + 1e-9), 128));
  }
}

TEST_CASE("region csv has a header and n^2 rows") {
  std::ostringstream out;
  write_region_csv(out, RegionDescriptor::box({0, 0}, 1.0), 16);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x1,x2,inside");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 16 * 16);
}

TEST_CASE("quasi-triangle ratio of one hand triple") {
  // x = (0,0), z = (1,0), y = (1,1): d(x,y) = sqrt 5, d(x,z) = 1, d(z,y) = sqrt 6 - sqrt 2
  double ratio = dtilde({0, 0}, {1, 1}) / (dtilde({0, 0}, {1, 0}) + dtilde({1, 0}, {1, 1}));
  CHECK(ratio == doctest::Approx(std::sqrt(5.0) / (1.0 + std::sqrt(6.0) - std::sqrt(2.0))).epsilon(1e-14));
  CHECK(ratio > 1.0);
}
