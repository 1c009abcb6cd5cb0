#pragma once

#include <array>
#include <vector>

#include "mono3d/kitti_io.hpp"

namespace mono3d {

// Point in the bird's-eye (x, z) plane of the camera frame.
struct PointXZ {
  double x = 0;
  double z = 0;
  friend bool operator==(const PointXZ&, const PointXZ&) = default;
};

// Convex polygon, vertices in positive (counter-clockwise) shoelace order
// with x as abscissa and z as ordinate.
struct Polygon2D {
  std::vector<PointXZ> vertices;

  bool empty() const { return vertices.size() < 3; }
};

double signed_area(const Polygon2D& poly);
double area(const Polygon2D& poly);

// Intersection of two convex polygons by successive half-plane clipping.
// Either operand may be clockwise; the result is always counter-clockwise.
// Vertices closer than 1e-9 are merged; a result with fewer than three
// vertices is returned as the empty polygon.
Polygon2D convex_clip(const Polygon2D& subject, const Polygon2D& clip);

// Eight cuboid vertices plus the cuboid center. KITTI camera frame: x right,
// y down, z forward. Indices 0-3 are the bottom face (y = location.y) in
// counter-clockwise (x, z) order; 4-7 are the top face, vertex i + 4 directly
// above vertex i.
struct Corners3D {
  std::array<Vec3, 8> corners;
  Vec3 center;
};

Corners3D box3d_corners(const Object3D& obj);

// Yawed (x, z) footprint of the box, counter-clockwise.
Polygon2D bev_footprint(const Object3D& obj);

struct ImagePoint {
  double u = 0;
  double v = 0;
};

// Throws Error(kBehindCamera) when z <= 0.
ImagePoint project_point(const Vec3& p, const Calibration& calib);

// The 8 corners followed by the center, each projected through P2.
std::array<ImagePoint, 9> project_keypoints(const Corners3D& corners,
                                            const Calibration& calib);

double iou_2d(const Box2D& a, const Box2D& b);
double iou_bev(const Object3D& a, const Object3D& b);
double iou_3d(const Object3D& a, const Object3D& b);

}  // namespace mono3d
