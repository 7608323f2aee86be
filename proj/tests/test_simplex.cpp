#include "choiceworks/simplex.hpp"

#include "choiceworks/linalg.hpp"

#include "doctest.h"

#include <random>

using namespace cw;

namespace {

Scalar q(long num, long den = 1) { return Scalar(num, den); }

// A simplex-vertex name: Exactly(count) with disjoint balls from stage 0,
// shrinking onto the given points.
ClosedSetName simplex_name(const std::vector<Vec>& points, int dim, const Scalar& r0) {
  auto gen = [points, r0](int k, const std::vector<std::vector<StageBall>>&) {
    std::vector<StageBall> out;
    Scalar r = r0 * pow2(-k);
    for (std::size_t i = 0; i < points.size(); ++i)
      out.push_back({Ball(points[i], r), static_cast<int>(i),
                     k == 0 ? -1 : static_cast<int>(i)});
    return out;
  };
  return ClosedSetName(dim, CardinalityMode::Exactly, static_cast<int>(points.size()), 0, gen);
}

// Exact determinant of the homogenized point matrix: nonzero iff the points
// span a proper simplex.
Scalar homogenized_det(const std::vector<Vec>& pts) {
  std::size_t m = pts.size();
  std::vector<std::vector<Interval>> a(m, std::vector<Interval>(m, Interval()));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j + 1 < m; ++j) a[i][j] = Interval(pts[i][j], pts[i][j]);
    a[i][m - 1] = Interval(Scalar(1), Scalar(1));
  }
  Interval d = interval_det(a);
  REQUIRE(d.lo == d.hi);
  return d.lo;
}

bool strictly_interior(const std::vector<Vec>& simplex, const Vec& x) {
  auto inr = hull_inradius_at(x, simplex);
  return inr.has_value() && *inr > 0;
}

}  // namespace

TEST_CASE("vandermonde_lift maps {0,1/2,1} onto the moment curve") {
  auto name = canonical_name({{q(0)}, {q(1, 2)}, {q(1)}}, 1);
  auto lift = vandermonde_lift(name);
  CHECK(lift.image.dimension() == 2);
  int s = lift.image.settle_stage() + 4;
  auto balls = lift.image.stage(s);
  REQUIRE(balls.size() == 3);
  std::vector<Vec> expected = {{q(0), q(0)}, {q(1, 2), q(1, 4)}, {q(1), q(1)}};
  for (const auto& want : expected) {
    bool hit = false;
    for (const auto& sb : balls)
      if (sb.ball.center == want) hit = true;
    CHECK(hit);
  }
  CHECK(lift.projector(expected[1]) == q(1, 2));
}

TEST_CASE("vandermonde_lift keeps a singleton a singleton") {
  auto base = canonical_name({{q(1, 2)}}, 1);
  ClosedSetName name(1, CardinalityMode::AtMost, 2, 0,
                     [base](int k, const std::vector<std::vector<StageBall>>&) {
                       return base.stage(k);
                     });
  auto lift = vandermonde_lift(name);
  CHECK(lift.image.dimension() == 1);
  auto balls = lift.image.stage(6);
  REQUIRE(balls.size() == 1);
  CHECK(balls[0].ball.center == Vec{q(1, 2)});
}

TEST_CASE("lifted {0,1/2,1} has nonzero homogenized determinant") {
  // 3x3 Vandermonde determinant = (1/2-0)(1-0)(1-1/2) = 1/4.
  std::vector<Vec> img = {{q(0), q(0)}, {q(1, 2), q(1, 4)}, {q(1), q(1)}};
  CHECK(homogenized_det(img) != 0);
  CHECK(abs(homogenized_det(img)) == q(1, 4));
}

TEST_CASE("vandermonde_lift output is a valid shrinking name") {
  auto name = canonical_name({{q(0)}, {q(1, 3)}, {q(1)}}, 1);
  auto lift = vandermonde_lift(name);
  auto res = validate_name(lift.image, lift.image.settle_stage() + 5);
  CHECK(res.ok);
}

TEST_CASE("random lifted sets are proper simplices") {
  std::mt19937 rng(20260823);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);  // |A| in 2..5
    std::vector<Scalar> xs;
    while (static_cast<int>(xs.size()) < n) {
      Scalar c(static_cast<long>(rng() % 97), 97);
      bool dup = false;
      for (const auto& o : xs)
        if (o == c) dup = true;
      if (!dup) xs.push_back(c);
    }
    std::vector<Vec> img;
    for (const auto& x : xs) {
      Vec v;
      Scalar p = 1;
      for (int m = 1; m < n; ++m) {
        p *= x;
        v.push_back(p);
      }
      img.push_back(v);
    }
    CHECK(homogenized_det(img) != 0);
  }
}

TEST_CASE("add_interior_point on the 1-simplex {0,1}") {
  auto name = simplex_name({{q(0)}, {q(1)}}, 1, q(1, 4));
  auto out = add_interior_point(name);
  CHECK(out.mode() == CardinalityMode::Exactly);
  CHECK(out.cardinality_bound() == 3);
  for (int k = 0; k < 8; ++k) {
    auto balls = out.stage(k);
    REQUIRE(balls.size() == 3);
    const StageBall* extra = nullptr;
    for (const auto& sb : balls)
      if (sb.id >= 1000000) extra = &sb;
    REQUIRE(extra != nullptr);
    CHECK(extra->ball.center[0] > 0);
    CHECK(extra->ball.center[0] < 1);
  }
}

TEST_CASE("add_interior_point keeps the extra ball in the hull at every stage") {
  std::vector<Vec> tri = {{q(1, 8), q(1, 8)}, {q(7, 8), q(1, 8)}, {q(1, 2), q(3, 4)}};
  auto name = simplex_name(tri, 2, q(1, 16));
  auto out = add_interior_point(name);
  for (int k = 0; k < 8; ++k) {
    auto balls = out.stage(k);
    REQUIRE(balls.size() == 4);
    std::vector<Vec> cloud;
    const StageBall* extra = nullptr;
    for (const auto& sb : balls) {
      if (sb.id >= 1000000) {
        extra = &sb;
        continue;
      }
      for (auto& c : sb.ball.corners()) cloud.push_back(std::move(c));
    }
    REQUIRE(extra != nullptr);
    for (const auto& corner : extra->ball.corners()) CHECK(in_convex_hull(corner, cloud));
  }
  // Settled: strictly interior in barycentric coordinates.
  auto balls = out.stage(10);
  const StageBall* extra = nullptr;
  for (const auto& sb : balls)
    if (sb.id >= 1000000) extra = &sb;
  auto bary = barycentric_coordinates(tri, extra->ball.center);
  REQUIRE(bary.has_value());
  for (const auto& w : *bary) CHECK(w > 0);
}

TEST_CASE("add_interior_point relocates through a remove-plus-split") {
  // Triangle; at stage 3 vertex 2 dies and vertex 0 splits along axis 1.
  Vec v0 = {q(1, 8), q(1, 8)}, v1 = {q(7, 8), q(1, 8)}, v2 = {q(1, 2), q(3, 4)};
  auto gen = [v0, v1, v2](int k, const std::vector<std::vector<StageBall>>&) {
    std::vector<StageBall> out;
    Scalar r = q(1, 32) * pow2(-k);
    if (k < 3) {
      out.push_back({Ball(v0, r), 0, k == 0 ? -1 : 0});
      out.push_back({Ball(v1, r), 1, k == 0 ? -1 : 1});
      out.push_back({Ball(v2, r), 2, k == 0 ? -1 : 2});
    } else {
      Scalar r3 = q(1, 32) * pow2(-3);
      Scalar delta = r3 / 4;
      out.push_back({Ball({v0[0], v0[1] - delta}, r), 3, k == 3 ? 0 : 3});
      out.push_back({Ball({v0[0], v0[1] + delta}, r), 4, k == 3 ? 0 : 4});
      out.push_back({Ball(v1, r), 1, 1});
    }
    return out;
  };
  ClosedSetName name(2, CardinalityMode::Exactly, 3, 3, gen);
  auto out = add_interior_point(name);
  auto late = out.stage(12);
  REQUIRE(late.size() == 4);
  const StageBall* extra = nullptr;
  for (const auto& sb : late)
    if (sb.id >= 1000000) extra = &sb;
  REQUIRE(extra != nullptr);
  CHECK(extra->id == 1000001);  // exactly one relocation
  Scalar r3 = q(1, 32) * pow2(-3);
  std::vector<Vec> final_simplex = {{v0[0], v0[1] - r3 / 4}, {v0[0], v0[1] + r3 / 4}, v1};
  auto bary = barycentric_coordinates(final_simplex, extra->ball.center);
  REQUIRE(bary.has_value());
  for (const auto& w : *bary) CHECK(w > 0);
}

TEST_CASE("add_interior_point rejects touching initial balls") {
  auto gen = [](int k, const std::vector<std::vector<StageBall>>&) {
    Scalar r = pow2(-k) / 2;
    std::vector<StageBall> out = {{Ball({q(1, 4)}, q(1, 4)), 0, k == 0 ? -1 : 0},
                                  {Ball({q(3, 4)}, q(1, 4)), 1, k == 0 ? -1 : 1}};
    if (k > 0) {
      out[0].ball.radius = r;
      out[1].ball.radius = r;
    }
    return out;
  };
  ClosedSetName name(1, CardinalityMode::Exactly, 2, 0, gen);
  CHECK_THROWS_AS((void)add_interior_point(name).stage(0), Error);
}

TEST_CASE("recover_vertex returns x when x is a vertex") {
  auto name = canonical_name({{q(0)}, {q(1)}}, 1);
  auto point = recover_vertex(name, PointName::exact({q(0)}));
  CHECK(abs(point.approx(20)[0] - q(0)) <= pow2(-20));
}

TEST_CASE("recover_vertex from an interior hull point lands on a vertex") {
  auto name = canonical_name({{q(0)}, {q(1)}}, 1);
  auto point = recover_vertex(name, PointName::exact({q(3, 10)}));
  Scalar v = point.approx(20)[0];
  bool near0 = abs(v - q(0)) <= pow2(-20);
  bool near1 = abs(v - q(1)) <= pow2(-20);
  CHECK((near0 || near1));
}

TEST_CASE("recover_vertex in the plane") {
  std::vector<Vec> tri = {{q(0), q(0)}, {q(1), q(0)}, {q(0), q(1)}};
  auto name = canonical_name(tri, 2);
  auto point = recover_vertex(name, PointName::exact({q(1, 4), q(1, 4)}));
  Vec got = point.approx(20);
  bool near_vertex = false;
  for (const auto& v : tri)
    if (dist_max(got, v) <= pow2(-20)) near_vertex = true;
  CHECK(near_vertex);
}

TEST_CASE("recover_vertex nested-ball conditions hold round by round") {
  std::vector<Vec> tri = {{q(0), q(0)}, {q(1), q(0)}, {q(0), q(1)}};
  auto name = canonical_name(tri, 2);
  auto point = recover_vertex(name, PointName::exact({q(1, 8), q(1, 2)}));
  Ball prev({q(1, 2), q(1, 2)}, q(3, 2));
  for (int k = 0; k < 12; ++k) {
    Ball bk = point.stage(k);
    // diameter of B_{k+1} below 2^-(k-1)
    CHECK(bk.radius * 2 < pow2(-(k - 1)));
    CHECK(ball_inside(bk, prev));
    // boundary clear of A: each vertex strictly in or strictly out
    for (const auto& v : tri) {
      Scalar d = dist_max(v, bk.center);
      CHECK(d != bk.radius);
    }
    prev = bk;
  }
}

TEST_CASE("recover_vertex rejects points outside the hull") {
  auto name = canonical_name({{q(0)}, {q(1, 2)}}, 1);
  auto point = recover_vertex(name, PointName::exact({q(9, 10)}));
  CHECK_THROWS_WITH_AS((void)point.stage(4), doctest::Contains("outside the convex hull"),
                       Error);
}

TEST_CASE("reduce_finite_to_simplex: singleton") {
  auto base = canonical_name({{q(1, 3)}}, 1);
  ClosedSetName name(1, CardinalityMode::AtMost, 2, 0,
                     [base](int k, const std::vector<std::vector<StageBall>>&) {
                       return base.stage(k);
                     });
  auto red = reduce_finite_to_simplex(2);
  auto hull = red.K(name);
  CHECK(hull.dimension() == 1);
  auto answer = red.H(name, PointName::exact({q(1, 3)}));
  CHECK(abs(answer.approx(20)[0] - q(1, 3)) <= pow2(-20));
}

TEST_CASE("reduce_finite_to_simplex: {0,1} with oracle answer 0.7") {
  auto name = canonical_name({{q(0)}, {q(1)}}, 1);
  auto red = reduce_finite_to_simplex(2);
  auto answer = red.H(name, PointName::exact({q(7, 10)}));
  CHECK(abs(answer.approx(20)[0] - q(1)) <= pow2(-20));
}

TEST_CASE("reduce_finite_to_simplex: {0,1/2,1} from the hull centroid") {
  auto name = canonical_name({{q(0)}, {q(1, 2)}, {q(1)}}, 1);
  auto red = reduce_finite_to_simplex(3);
  auto hull = red.K(name);
  REQUIRE(hull.final_configuration().has_value());
  // centroid of the lifted triangle (0,0),(1/2,1/4),(1,1)
  Vec centroid = {q(1, 2), q(5, 12)};
  CHECK(hull.final_configuration()->contains(centroid));
  auto answer = red.H(name, PointName::exact(centroid));
  Scalar v = answer.approx(20)[0];
  bool in_a = false;
  for (const auto& a : {q(0), q(1, 2), q(1)})
    if (abs(v - a) <= pow2(-20)) in_a = true;
  CHECK(in_a);
}

TEST_CASE("reduce_finite_to_simplex end-to-end on random sets") {
  std::mt19937 rng(7);
  auto red = reduce_finite_to_simplex(4);
  for (int trial = 0; trial < 12; ++trial) {
    int count = 1 + static_cast<int>(rng() % 4);
    std::vector<Vec> pts;
    while (static_cast<int>(pts.size()) < count) {
      Vec p = {Scalar(static_cast<long>(rng() % 33), 33)};
      bool dup = false;
      for (const auto& o : pts)
        if (o == p) dup = true;
      if (!dup) pts.push_back(p);
    }
    auto base = canonical_name(pts, 1);
    ClosedSetName name(1, CardinalityMode::AtMost, 4, 0,
                       [base](int k, const std::vector<std::vector<StageBall>>&) {
                         return base.stage(k);
                       });
    auto hull = red.K(name);
    REQUIRE(hull.final_configuration().has_value());
    // adversarial oracle answer: random convex mixture of the hull vertices
    const auto& verts = hull.final_configuration()->vertices;
    Vec x(hull.dimension(), Scalar(0));
    Scalar total = 0;
    std::vector<Scalar> w;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      w.push_back(Scalar(1 + static_cast<long>(rng() % 5)));
      total += w.back();
    }
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (int a = 0; a < hull.dimension(); ++a) x[a] += verts[i][a] * w[i] / total;
    auto answer = red.H(name, PointName::exact(x));
    Scalar v = answer.approx(20)[0];
    bool in_a = false;
    for (const auto& p : pts)
      if (abs(v - p[0]) <= pow2(-20)) in_a = true;
    CHECK(in_a);
  }
}
