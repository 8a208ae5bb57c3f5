#pragma once

#include <optional>

#include "surfelgrad/grid.hpp"
#include "surfelgrad/vec.hpp"

namespace surfelgrad {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length

  Vec3 at(double t) const { return origin + t * direction; }
};

// Pixel coordinates of a projected point; row/col are continuous, pixel
// (r, c) covers [r, r+1) x [c, c+1) with its center at (r+0.5, c+0.5).
struct ImagePoint {
  double row = 0.0;
  double col = 0.0;
};

/// Pinhole camera. The camera frame is right-handed with x to the right,
/// y up and the view direction along local -z. Pixels are square with pitch
/// sensor_mm / cols; the sensor height follows from the aspect ratio.
class Camera {
 public:
  // Origin, looking down -z, 20 mm lens on a 24 mm sensor, 128x128.
  Camera();

  static Camera make(const Vec3& position, const Vec3& look_at, const Vec3& up, double focal_mm,
                     double sensor_mm, Resolution resolution);

  const Vec3& position() const { return position_; }
  const Vec3& look_at() const { return look_at_; }
  const Vec3& up() const { return up_; }
  double focal_mm() const { return focal_mm_; }
  double sensor_mm() const { return sensor_mm_; }
  Resolution resolution() const { return resolution_; }

  double sensor_height_mm() const { return sensor_mm_ * resolution_.rows / resolution_.cols; }
  double pixel_pitch_mm() const { return sensor_mm_ / resolution_.cols; }
  double horizontal_fov() const;

  // Camera axes expressed in world coordinates.
  const Vec3& right() const { return x_axis_; }
  const Vec3& true_up() const { return y_axis_; }
  const Vec3& backward() const { return z_axis_; }
  Mat3 world_to_camera_rotation() const { return Mat3::from_rows(x_axis_, y_axis_, z_axis_); }

  Vec3 world_to_camera(const Vec3& p) const;
  Vec3 camera_to_world(const Vec3& p) const;
  Vec3 direction_to_camera(const Vec3& d) const;
  Vec3 direction_to_world(const Vec3& d) const;

  /// Unit ray direction through the pixel center, in camera coordinates.
  Vec3 camera_ray_direction(int row, int col) const;
  /// World-space primary ray through the pixel center.
  Ray primary_ray(int row, int col) const;

  /// Projects a camera-space point; empty when the point is not in front of
  /// the camera.
  std::optional<ImagePoint> project(const Vec3& camera_point) const;

  friend bool operator==(const Camera&, const Camera&) = default;

 private:
  struct Unchecked {};
  explicit Camera(Unchecked) {}

  Vec3 position_;
  Vec3 look_at_;
  Vec3 up_;
  double focal_mm_ = 0.0;
  double sensor_mm_ = 0.0;
  Resolution resolution_;
  Vec3 x_axis_;
  Vec3 y_axis_;
  Vec3 z_axis_;
};

}  // namespace surfelgrad
