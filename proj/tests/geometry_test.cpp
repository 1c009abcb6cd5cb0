#include "mono3d/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mono3d/error.hpp"
#include "support/oracles.hpp"

namespace mono3d {
namespace {

using oracle::kPi;
using oracle::make_box;

Polygon2D square(double cx, double cz, double side, double angle = 0) {
  Polygon2D p;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double h = side / 2;
  for (auto [dx, dz] : {std::pair{h, h}, {-h, h}, {-h, -h}, {h, -h}}) {
    p.vertices.push_back({cx + c * dx - s * dz, cz + s * dx + c * dz});
  }
  return p;
}

bool contains(const Polygon2D& poly, double x, double z) {
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    if ((b.x - a.x) * (z - a.z) - (b.z - a.z) * (x - a.x) < 0) return false;
  }
  return true;
}

TEST(Box3dCorners, AxisAlignedCube) {
  const auto c = box3d_corners(make_box(0, 1, 10, 2, 2, 2, 0));
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(c.corners[i].y, 1);
    EXPECT_DOUBLE_EQ(c.corners[i + 4].y, -1);
    EXPECT_DOUBLE_EQ(std::abs(c.corners[i].x), 1);
    EXPECT_DOUBLE_EQ(std::abs(c.corners[i].z - 10), 1);
    EXPECT_DOUBLE_EQ(c.corners[i + 4].x, c.corners[i].x);
    EXPECT_DOUBLE_EQ(c.corners[i + 4].z, c.corners[i].z);
  }
  EXPECT_EQ(c.center, (Vec3{0, 0, 10}));
  Polygon2D bottom;
  for (int i = 0; i < 4; ++i) bottom.vertices.push_back({c.corners[i].x, c.corners[i].z});
  EXPECT_GT(signed_area(bottom), 0);
}

TEST(Box3dCorners, QuarterTurnSwapsExtents) {
  auto extents = [](const Corners3D& c) {
    double xmin = 1e9, xmax = -1e9, zmin = 1e9, zmax = -1e9;
    for (const auto& p : c.corners) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      zmin = std::min(zmin, p.z);
      zmax = std::max(zmax, p.z);
    }
    return std::pair{xmax - xmin, zmax - zmin};
  };
  const auto [x0, z0] = extents(box3d_corners(make_box(0, 1, 10, 1.5, 1.6, 3.9, 0)));
  const auto [x1, z1] = extents(box3d_corners(make_box(0, 1, 10, 1.5, 1.6, 3.9, kPi / 2)));
  EXPECT_NEAR(x0, 3.9, 1e-12);
  EXPECT_NEAR(z0, 1.6, 1e-12);
  EXPECT_NEAR(x1, 1.6, 1e-12);
  EXPECT_NEAR(z1, 3.9, 1e-12);
}

TEST(Box3dCorners, MatchesExplicitRotationMatrix) {
  const double ry = 0.3;
  const auto obj = make_box(2.5, 1.7, 20.0, 1.5, 1.6, 3.9, ry);
  const auto c = box3d_corners(obj);
  // Rotation about the camera y axis applied to the footprint offsets
  // (length along x, width along z): [x z] = [cos sin; -sin cos] [dx dz].
  const double R[2][2] = {{std::cos(ry), std::sin(ry)}, {-std::sin(ry), std::cos(ry)}};
  const double offs[4][2] = {{1.95, 0.8}, {-1.95, 0.8}, {-1.95, -0.8}, {1.95, -0.8}};
  for (int i = 0; i < 4; ++i) {
    const double ex = 2.5 + R[0][0] * offs[i][0] + R[0][1] * offs[i][1];
    const double ez = 20.0 + R[1][0] * offs[i][0] + R[1][1] * offs[i][1];
    EXPECT_NEAR(c.corners[i].x, ex, 1e-12);
    EXPECT_NEAR(c.corners[i].z, ez, 1e-12);
    EXPECT_NEAR(c.corners[i + 4].y, 1.7 - 1.5, 1e-12);
  }
  // Opposite edges stay parallel and equal.
  const double e01x = c.corners[1].x - c.corners[0].x;
  const double e32x = c.corners[2].x - c.corners[3].x;
  EXPECT_NEAR(e01x, e32x, 1e-12);
}

TEST(ProjectKeypoints, PrincipalAxisAndHandProduct) {
  Calibration calib;
  calib.p2 = {700, 0, 600, 0, 0, 700, 180, 0, 0, 0, 1, 0};
  const auto on_axis = project_point({0, 0, 25}, calib);
  EXPECT_DOUBLE_EQ(on_axis.u, 600);
  EXPECT_DOUBLE_EQ(on_axis.v, 180);
  // u = (700*1 + 600*10) / 10 = 670
  EXPECT_DOUBLE_EQ(project_point({1, 0, 10}, calib).u, 670);

  const auto kps = project_keypoints(box3d_corners(make_box(0, 1.5, 10, 1.5, 1.6, 3.9, 0)), calib);
  EXPECT_DOUBLE_EQ(kps[8].u, 600);
  EXPECT_NEAR(kps[8].v, 180 + 700 * 0.75 / 10, 1e-9);
}

TEST(ProjectKeypoints, BehindCamera) {
  Calibration calib;
  calib.p2 = {700, 0, 600, 0, 0, 700, 180, 0, 0, 0, 1, 0};
  try {
    project_point({0, 0, -1}, calib);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBehindCamera);
  }
  EXPECT_THROW(project_keypoints(box3d_corners(make_box(0, 1, 1, 1, 1, 4, kPi / 2)), calib), Error);
}

TEST(ConvexClip, SelfIntersectionIsIdentity) {
  const auto sq = square(0, 0, 1);
  EXPECT_NEAR(area(convex_clip(sq, sq)), 1.0, 1e-12);
}

TEST(ConvexClip, HalfOverlap) {
  EXPECT_NEAR(area(convex_clip(square(0, 0, 1), square(0.5, 0, 1))), 0.5, 1e-12);
}

TEST(ConvexClip, DisjointAndTouching) {
  EXPECT_TRUE(convex_clip(square(0, 0, 1), square(3, 0, 1)).empty());
  EXPECT_TRUE(convex_clip(square(0, 0, 1), square(1, 0, 1)).empty());
}

TEST(ConvexClip, AcceptsClockwiseInput) {
  auto cw = square(0.25, 0.25, 1);
  std::reverse(cw.vertices.begin(), cw.vertices.end());
  const auto out = convex_clip(cw, square(0, 0, 1));
  EXPECT_NEAR(area(out), 0.5625, 1e-12);
  EXPECT_GT(signed_area(out), 0);
}

TEST(ConvexClip, RotatedSquareOctagonMatchesMonteCarlo) {
  const auto a = square(0, 0, 1);
  const auto b = square(0, 0, 1, kPi / 4);
  const auto inter = convex_clip(a, b);
  EXPECT_EQ(inter.vertices.size(), 8u);
  const double exact = 2 * (std::sqrt(2.0) - 1);
  EXPECT_NEAR(area(inter), exact, 1e-12);

  // 1e7 uniform samples over [-0.75, 0.75]^2.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.75, 0.75);
  const std::size_t n = 10'000'000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng);
    const double z = u(rng);
    if (contains(a, x, z) && contains(b, x, z)) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  const double est = p * 2.25;
  const double sigma = 2.25 * std::sqrt(p * (1 - p) / n);
  EXPECT_NEAR(est, area(inter), 4 * sigma);
}

TEST(ConvexClip, RandomPairsWithinThreeSigmaOfMonteCarlo) {
  // 1000 random rectangle pairs; the clip area must agree with Monte-Carlo
  // membership sampling. With a 3-sigma band, ~0.3% of pairs exceed it by
  // chance, so allow up to 1% beyond 3 sigma and none beyond 5 sigma.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> pos(-1.5, 1.5);
  std::uniform_real_distribution<double> size(0.5, 4.0);
  std::uniform_real_distribution<double> yaw(-kPi, kPi);
  int beyond3 = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = make_box(0, 0, 0, 1, size(rng), size(rng), yaw(rng));
    const auto b = make_box(pos(rng), 0, pos(rng), 1, size(rng), size(rng), yaw(rng));
    const double clip = area(convex_clip(bev_footprint(a), bev_footprint(b)));
    const auto mc = oracle::mc_bev_intersection(a, b, 40000, 1000 + i);
    const double dev = std::abs(clip - mc.area);
    if (dev > 3 * mc.sigma + 1e-12) ++beyond3;
    ASSERT_LE(dev, 5 * mc.sigma + 1e-9) << "pair " << i;
  }
  EXPECT_LE(beyond3, 10);
}

TEST(IouBev, Fixtures) {
  const auto a = make_box(0, 1, 10, 1, 1, 1, 0);
  EXPECT_DOUBLE_EQ(iou_bev(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou_bev(a, make_box(5, 1, 10, 1, 1, 1, 0)), 0.0);
  EXPECT_NEAR(iou_bev(a, make_box(0, 1, 10.5, 1, 1, 1, 0)), 1.0 / 3, 1e-12);
  // Unit squares, one yawed 45 degrees: octagon / (2 - octagon) = 1/sqrt(2).
  EXPECT_NEAR(iou_bev(a, make_box(0, 1, 10, 1, 1, 1, kPi / 4)), std::sqrt(0.5), 1e-12);
}

TEST(IouBev, DegenerateIsZero) {
  const auto a = make_box(0, 1, 10, 1, 1, 1, 0);
  auto dc = make_box(-1000, -1000, -1000, -1, -1, -1, -10, ClassId::dont_care());
  EXPECT_EQ(iou_bev(a, dc), 0.0);
  EXPECT_EQ(iou_bev(a, make_box(0, 1, 10, 1, 0, 1, 0)), 0.0);
  EXPECT_EQ(iou_3d(a, make_box(0, 1, 10, 0, 1, 1, 0)), 0.0);
}

TEST(IouBev, ContainmentGivesAreaRatio) {
  const auto big = make_box(1, 1, 10, 1, 3, 5, 0.4);
  const auto small = make_box(1.2, 1, 10.1, 1, 1, 2, 0.9);
  EXPECT_NEAR(iou_bev(big, small), 2.0 / 15.0, 1e-9);
}

TEST(IouBev, RigidMotionInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    auto a = make_box(u(rng), 1, 20 + u(rng), 1.5, 1 + std::abs(u(rng)), 2 + std::abs(u(rng)), u(rng));
    auto b = make_box(u(rng), 1, 20 + u(rng), 1.5, 1 + std::abs(u(rng)), 2 + std::abs(u(rng)), u(rng));
    const double before = iou_bev(a, b);
    // Rotate both by theta about (0, 20) and translate.
    const double theta = u(rng);
    const double tx = 3 * u(rng);
    const double tz = 3 * u(rng);
    for (Object3D* o : {&a, &b}) {
      const double dx = o->location.x;
      const double dz = o->location.z - 20;
      // Same convention as the box yaw: [x z] -> [c s; -s c] [x z].
      o->location.x = std::cos(theta) * dx + std::sin(theta) * dz + tx;
      o->location.z = -std::sin(theta) * dx + std::cos(theta) * dz + 20 + tz;
      o->rotation_y += theta;
    }
    EXPECT_NEAR(iou_bev(a, b), before, 1e-9);
  }
}

TEST(Iou3d, Fixtures) {
  const auto a = make_box(0, 1.5, 10, 1.5, 1.6, 3.9, 0.2);
  EXPECT_DOUBLE_EQ(iou_3d(a, a), 1.0);
  auto raised = a;
  raised.location.y -= 0.75;
  EXPECT_NEAR(iou_3d(a, raised), 1.0 / 3, 1e-12);
  auto lifted = a;
  lifted.location.y -= 2.0;
  EXPECT_EQ(iou_3d(a, lifted), 0.0);
}

TEST(Iou3d, RandomPairsMatchVoxelOracle) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 25; ++i) {
    const auto a = make_box(u(rng), 1.6 + 0.3 * u(rng), 15 + u(rng), 1.5 + 0.2 * u(rng),
                            1.6 + 0.3 * u(rng), 3.9 + u(rng), 3 * u(rng));
    const auto b = make_box(u(rng), 1.6 + 0.3 * u(rng), 15 + u(rng), 1.5 + 0.2 * u(rng),
                            1.6 + 0.3 * u(rng), 3.9 + u(rng), 3 * u(rng));
    EXPECT_NEAR(iou_3d(a, b), oracle::voxel_iou_3d(a, b), 1e-3);
    EXPECT_NEAR(iou_bev(a, b), oracle::sliced_iou_bev(a, b), 1e-3);
  }
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 500; ++i) {
    const auto a = make_box(u(rng), 1 + u(rng) / 4, 10 + u(rng), 1.5, 1.6, 3.9, u(rng));
    const auto b = make_box(u(rng), 1 + u(rng) / 4, 10 + u(rng), 1.4, 1.2, 3.0, u(rng));
    EXPECT_EQ(iou_bev(a, b), iou_bev(b, a));
    EXPECT_EQ(iou_3d(a, b), iou_3d(b, a));
    for (double v : {iou_bev(a, b), iou_3d(a, b)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_LE(iou_3d(a, b), iou_bev(a, b) + 1e-12);
  }
}

TEST(Iou2d, Fixtures) {
  const Box2D a{0, 0, 2, 2};
  EXPECT_DOUBLE_EQ(iou_2d(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou_2d(a, {5, 5, 6, 6}), 0.0);
  EXPECT_DOUBLE_EQ(iou_2d(a, {1, 0, 3, 2}), 1.0 / 3);
  EXPECT_DOUBLE_EQ(iou_2d({1, 0, 3, 2}, a), 1.0 / 3);
  EXPECT_DOUBLE_EQ(iou_2d(a, {1, 1, 1, 3}), 0.0);
}

}  // namespace
}  // namespace mono3d
