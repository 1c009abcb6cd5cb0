#include "mono3d/render.hpp"

#include <fmt/format.h>

#include <cmath>

#include "mono3d/error.hpp"
#include "mono3d/geometry.hpp"

namespace mono3d {

namespace {

constexpr Rgb kGroundTruth{0, 220, 0};
constexpr Rgb kDetection{230, 40, 40};
constexpr Rgb kPanelGrid{60, 60, 60};

constexpr std::array<std::array<int, 2>, 12> kEdges = {{
    {0, 1}, {1, 2}, {2, 3}, {3, 0},
    {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7}}};

void put(ImageBuffer& image, int x, int y, Rgb color) {
  if (x < 0 || y < 0 || x >= image.width() || y >= image.height()) return;
  image.at(x, y, 0) = color.r;
  image.at(x, y, 1) = color.g;
  image.at(x, y, 2) = color.b;
}

bool drawable(const Object3D& obj) {
  return obj.cls.kind() != ObjectClass::kDontCare && obj.dims.height >= 0 &&
         obj.dims.width >= 0 && obj.dims.length >= 0;
}

}  // namespace

void draw_line(ImageBuffer& image, double x0, double y0, double x1, double y1,
               Rgb color) {
  // Far-off endpoints would make the integer walk needlessly long.
  const double bound = 4.0 * (image.width() + image.height()) + 16.0;
  if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(x1) ||
      !std::isfinite(y1)) {
    return;
  }
  if (std::abs(x0) > bound || std::abs(x1) > bound || std::abs(y0) > bound ||
      std::abs(y1) > bound) {
    return;
  }
  int ax = static_cast<int>(std::lround(x0));
  int ay = static_cast<int>(std::lround(y0));
  const int bx = static_cast<int>(std::lround(x1));
  const int by = static_cast<int>(std::lround(y1));
  const int dx = std::abs(bx - ax);
  const int dy = -std::abs(by - ay);
  const int sx = ax < bx ? 1 : -1;
  const int sy = ay < by ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put(image, ax, ay, color);
    if (ax == bx && ay == by) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      ax += sx;
    }
    if (e2 <= dx) {
      err += dx;
      ay += sy;
    }
  }
}

RenderResult render_overlay(const ImageBuffer& image, const Calibration& calib,
                            std::span<const Object3D> ground_truth,
                            std::span<const Object3D> detections,
                            const RenderOptions& options) {
  RenderResult result;
  std::vector<std::pair<const Object3D*, Rgb>> boxes;
  for (const auto& o : ground_truth) {
    if (drawable(o)) boxes.emplace_back(&o, kGroundTruth);
  }
  for (const auto& o : detections) {
    if (drawable(o)) boxes.emplace_back(&o, kDetection);
  }
  if (boxes.empty()) {
    result.image = image;
    return result;
  }

  ImageBuffer view = image;
  const int side = image.height();
  ImageBuffer panel(side, side, 0);
  const double sx = side / (2 * options.bev_half_width);
  const double sz = side / options.bev_depth;
  auto to_panel = [&](double x, double z) {
    return std::pair<double, double>{side / 2.0 + x * sx, side - 1 - z * sz};
  };
  for (double z = 0; z <= options.bev_depth; z += 10.0) {
    const auto [x0, y0] = to_panel(-options.bev_half_width, z);
    const auto [x1, y1] = to_panel(options.bev_half_width, z);
    draw_line(panel, x0, y0, x1, y1, kPanelGrid);
  }

  for (const auto& [obj, color] : boxes) {
    const Corners3D corners = box3d_corners(*obj);
    try {
      const auto kp = project_keypoints(corners, calib);
      for (const auto& e : kEdges) {
        draw_line(view, kp[e[0]].u, kp[e[0]].v, kp[e[1]].u, kp[e[1]].v, color);
      }
      put(view, static_cast<int>(std::lround(kp[8].u)),
          static_cast<int>(std::lround(kp[8].v)), color);
      ++result.wireframes;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBehindCamera) throw;
      result.warnings.push_back(
          fmt::format("{} at z={:.2f} is behind the camera; wireframe skipped",
                      obj->cls.name(), obj->location.z));
    }
    for (int i = 0; i < 4; ++i) {
      const auto& p = corners.corners[i];
      const auto& q = corners.corners[(i + 1) % 4];
      const auto [x0, y0] = to_panel(p.x, p.z);
      const auto [x1, y1] = to_panel(q.x, q.z);
      draw_line(panel, x0, y0, x1, y1, color);
    }
  }

  ImageBuffer canvas(image.width() + side, image.height(), 0);
  for (int y = 0; y < image.height(); ++y) {
    for (int c = 0; c < 3; ++c) {
      for (int x = 0; x < image.width(); ++x) canvas.at(x, y, c) = view.at(x, y, c);
      for (int x = 0; x < side; ++x) canvas.at(image.width() + x, y, c) = panel.at(x, y, c);
    }
  }
  result.image = std::move(canvas);
  return result;
}

}  // namespace mono3d
