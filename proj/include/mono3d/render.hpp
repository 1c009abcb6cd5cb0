#pragma once

#include <span>
#include <string>
#include <vector>

#include "mono3d/image.hpp"
#include "mono3d/kitti_io.hpp"

namespace mono3d {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

// Bresenham line, clipped to the image.
void draw_line(ImageBuffer& image, double x0, double y0, double x1, double y1,
               Rgb color);

struct RenderOptions {
  // BEV panel coverage in meters (camera x lateral, z forward).
  double bev_half_width = 40.0;
  double bev_depth = 80.0;
};

struct RenderResult {
  ImageBuffer image;
  std::size_t wireframes = 0;  // cuboids drawn in the camera view
  std::vector<std::string> warnings;
};

// Projects each box's 9 keypoints and draws the cuboid wireframe (ground
// truth green, detections red) with a bird's-eye panel appended on the
// right. DontCare rows are skipped, as are boxes with any keypoint behind
// the camera (reported in `warnings`). With nothing to draw, the input image
// is returned unchanged.
RenderResult render_overlay(const ImageBuffer& image, const Calibration& calib,
                            std::span<const Object3D> ground_truth,
                            std::span<const Object3D> detections,
                            const RenderOptions& options = {});

}  // namespace mono3d
