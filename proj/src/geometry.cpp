#include "mono3d/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "mono3d/error.hpp"

namespace mono3d {

namespace {

constexpr double kClipEps = 1e-9;
constexpr double kDegenerateArea = 1e-12;

double cross(const PointXZ& o, const PointXZ& a, const PointXZ& b) {
  return (a.x - o.x) * (b.z - o.z) - (a.z - o.z) * (b.x - o.x);
}

PointXZ intersect(const PointXZ& p, const PointXZ& q, double dp, double dq) {
  const double t = dp / (dp - dq);
  return {p.x + t * (q.x - p.x), p.z + t * (q.z - p.z)};
}

bool near(const PointXZ& a, const PointXZ& b) {
  return std::abs(a.x - b.x) <= kClipEps && std::abs(a.z - b.z) <= kClipEps;
}

void dedup(std::vector<PointXZ>& pts) {
  std::vector<PointXZ> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (out.empty() || !near(out.back(), p)) out.push_back(p);
  }
  while (out.size() > 1 && near(out.front(), out.back())) out.pop_back();
  pts = std::move(out);
}

Polygon2D counter_clockwise(Polygon2D poly) {
  if (signed_area(poly) < 0) {
    std::reverse(poly.vertices.begin(), poly.vertices.end());
  }
  return poly;
}

// Canonical operand order so that iou(a, b) and iou(b, a) run the exact same
// floating-point sequence.
bool canonical_less(const Object3D& a, const Object3D& b) {
  auto key = [](const Object3D& o) {
    return std::tie(o.location.x, o.location.y, o.location.z, o.dims.height,
                    o.dims.width, o.dims.length, o.rotation_y);
  };
  return key(a) < key(b);
}

double bev_intersection(const Object3D& a, const Object3D& b) {
  return area(convex_clip(bev_footprint(a), bev_footprint(b)));
}

}  // namespace

double signed_area(const Polygon2D& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    twice += p.x * q.z - q.x * p.z;
  }
  return 0.5 * twice;
}

double area(const Polygon2D& poly) { return std::abs(signed_area(poly)); }

Polygon2D convex_clip(const Polygon2D& subject, const Polygon2D& clip) {
  if (subject.empty() || clip.empty()) return {};
  const Polygon2D s = counter_clockwise(subject);
  const Polygon2D c = counter_clockwise(clip);

  std::vector<PointXZ> output = s.vertices;
  const auto& edges = c.vertices;
  for (std::size_t i = 0; i < edges.size() && !output.empty(); ++i) {
    const PointXZ& e0 = edges[i];
    const PointXZ& e1 = edges[(i + 1) % edges.size()];
    std::vector<PointXZ> input = std::move(output);
    output.clear();
    for (std::size_t j = 0; j < input.size(); ++j) {
      const PointXZ& p = input[j];
      const PointXZ& q = input[(j + 1) % input.size()];
      const double dp = cross(e0, e1, p);
      const double dq = cross(e0, e1, q);
      const bool p_in = dp >= -kClipEps;
      const bool q_in = dq >= -kClipEps;
      if (p_in) output.push_back(p);
      if (p_in != q_in && std::abs(dp - dq) > 0.0) {
        // Skip the crossing when one endpoint sits on the line; it is
        // already in (or will be) the output.
        if (std::abs(dp) > kClipEps && std::abs(dq) > kClipEps) {
          output.push_back(intersect(p, q, dp, dq));
        }
      }
    }
    dedup(output);
  }
  if (output.size() < 3) return {};
  Polygon2D result{std::move(output)};
  if (area(result) < kDegenerateArea) return {};
  return result;
}

Corners3D box3d_corners(const Object3D& obj) {
  const double h = obj.dims.height;
  const double half_w = obj.dims.width / 2;
  const double half_l = obj.dims.length / 2;
  const double c = std::cos(obj.rotation_y);
  const double s = std::sin(obj.rotation_y);
  // Object frame: length along x, width along z, before yaw.
  const std::array<std::array<double, 2>, 4> offsets = {{
      {half_l, half_w}, {-half_l, half_w}, {-half_l, -half_w}, {half_l, -half_w}}};

  Corners3D out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double dx = offsets[i][0];
    const double dz = offsets[i][1];
    const double x = obj.location.x + c * dx + s * dz;
    const double z = obj.location.z - s * dx + c * dz;
    out.corners[i] = {x, obj.location.y, z};
    out.corners[i + 4] = {x, obj.location.y - h, z};
  }
  out.center = {obj.location.x, obj.location.y - h / 2, obj.location.z};
  return out;
}

Polygon2D bev_footprint(const Object3D& obj) {
  const auto corners = box3d_corners(obj);
  Polygon2D poly;
  poly.vertices.reserve(4);
  for (std::size_t i = 0; i < 4; ++i) {
    poly.vertices.push_back({corners.corners[i].x, corners.corners[i].z});
  }
  return poly;
}

ImagePoint project_point(const Vec3& p, const Calibration& calib) {
  if (!(p.z > 0)) {
    throw Error(ErrorCode::kBehindCamera,
                fmt::format("BehindCamera: point ({}, {}, {}) has z <= 0", p.x,
                            p.y, p.z));
  }
  double u[3];
  for (int r = 0; r < 3; ++r) {
    u[r] = calib.at(r, 0) * p.x + calib.at(r, 1) * p.y + calib.at(r, 2) * p.z +
           calib.at(r, 3);
  }
  return {u[0] / u[2], u[1] / u[2]};
}

std::array<ImagePoint, 9> project_keypoints(const Corners3D& corners,
                                            const Calibration& calib) {
  std::array<ImagePoint, 9> out;
  for (std::size_t i = 0; i < 8; ++i) {
    out[i] = project_point(corners.corners[i], calib);
  }
  out[8] = project_point(corners.center, calib);
  return out;
}

double iou_2d(const Box2D& a, const Box2D& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a <= 0 || area_b <= 0) return 0.0;
  const double iw = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  return inter / (area_a + area_b - inter);
}

double iou_bev(const Object3D& a, const Object3D& b) {
  if (canonical_less(b, a)) return iou_bev(b, a);
  const double area_a = area(bev_footprint(a));
  const double area_b = area(bev_footprint(b));
  if (area_a < kDegenerateArea || area_b < kDegenerateArea) return 0.0;
  const double inter = bev_intersection(a, b);
  return std::clamp(inter / (area_a + area_b - inter), 0.0, 1.0);
}

double iou_3d(const Object3D& a, const Object3D& b) {
  if (canonical_less(b, a)) return iou_3d(b, a);
  const double vol_a = area(bev_footprint(a)) * a.dims.height;
  const double vol_b = area(bev_footprint(b)) * b.dims.height;
  if (!(vol_a > kDegenerateArea) || !(vol_b > kDegenerateArea)) return 0.0;
  const double y_overlap =
      std::max(0.0, std::min(a.location.y, b.location.y) -
                        std::max(a.location.y - a.dims.height,
                                 b.location.y - b.dims.height));
  if (y_overlap <= 0) return 0.0;
  const double inter = bev_intersection(a, b) * y_overlap;
  return std::clamp(inter / (vol_a + vol_b - inter), 0.0, 1.0);
}

}  // namespace mono3d
