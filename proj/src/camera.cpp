#include "surfelgrad/camera.hpp"

#include <cmath>
#include <string>

#include "surfelgrad/error.hpp"

namespace surfelgrad {

Camera::Camera() : Camera(make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20.0, 24.0, {128, 128})) {}

Camera Camera::make(const Vec3& position, const Vec3& look_at, const Vec3& up, double focal_mm,
                    double sensor_mm, Resolution resolution) {
  if (!position.finite() || !look_at.finite() || !up.finite())
    throw Error(ErrorCode::InvalidParam, "camera vectors must be finite");
  if (!(focal_mm > 0.0) || !std::isfinite(focal_mm))
    throw Error(ErrorCode::InvalidParam, "focal_mm must be positive, got " + std::to_string(focal_mm));
  if (!(sensor_mm > 0.0) || !std::isfinite(sensor_mm))
    throw Error(ErrorCode::InvalidParam, "sensor_mm must be positive, got " + std::to_string(sensor_mm));
  if (resolution.rows <= 0 || resolution.cols <= 0)
    throw Error(ErrorCode::InvalidParam, "resolution must be positive");

  const Vec3 view = look_at - position;
  const double view_len = norm(view);
  const double up_len = norm(up);
  if (view_len == 0.0 || up_len == 0.0)
    throw Error(ErrorCode::DegenerateFrame, "zero-length view or up vector");
  const Vec3 forward = view / view_len;
  const Vec3 side = cross(forward, up / up_len);
  if (norm(side) < 1e-9) throw Error(ErrorCode::DegenerateFrame, "up is parallel to the view direction");

  Camera cam{Unchecked{}};
  cam.position_ = position;
  cam.look_at_ = look_at;
  cam.up_ = up / up_len;
  cam.focal_mm_ = focal_mm;
  cam.sensor_mm_ = sensor_mm;
  cam.resolution_ = resolution;
  cam.x_axis_ = normalize(side);
  cam.y_axis_ = normalize(cross(cam.x_axis_, forward));
  cam.z_axis_ = -forward;
  return cam;
}

double Camera::horizontal_fov() const { return 2.0 * std::atan(0.5 * sensor_mm_ / focal_mm_); }

Vec3 Camera::direction_to_camera(const Vec3& d) const {
  return {dot(x_axis_, d), dot(y_axis_, d), dot(z_axis_, d)};
}

Vec3 Camera::direction_to_world(const Vec3& d) const { return d.x * x_axis_ + d.y * y_axis_ + d.z * z_axis_; }

Vec3 Camera::world_to_camera(const Vec3& p) const { return direction_to_camera(p - position_); }

Vec3 Camera::camera_to_world(const Vec3& p) const { return position_ + direction_to_world(p); }

Vec3 Camera::camera_ray_direction(int row, int col) const {
  if (row < 0 || row >= resolution_.rows || col < 0 || col >= resolution_.cols)
    throw Error(ErrorCode::OutOfBounds,
                "pixel (" + std::to_string(row) + ", " + std::to_string(col) + ") outside image");
  const double pitch = pixel_pitch_mm();
  const double x = -0.5 * sensor_mm_ + (col + 0.5) * pitch;
  const double y = 0.5 * sensor_height_mm() - (row + 0.5) * pitch;
  return normalize(Vec3{x, y, -focal_mm_});
}

Ray Camera::primary_ray(int row, int col) const {
  return {position_, direction_to_world(camera_ray_direction(row, col))};
}

std::optional<ImagePoint> Camera::project(const Vec3& q) const {
  if (!(q.z < 0.0)) return std::nullopt;
  const double scale = focal_mm_ / -q.z;
  const double pitch = pixel_pitch_mm();
  const double col = (q.x * scale + 0.5 * sensor_mm_) / pitch;
  const double row = (0.5 * sensor_height_mm() - q.y * scale) / pitch;
  return ImagePoint{row, col};
}

}  // namespace surfelgrad
