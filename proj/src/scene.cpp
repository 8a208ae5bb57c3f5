#include "surfelgrad/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "surfelgrad/error.hpp"
#include "surfelgrad/parallel.hpp"

namespace surfelgrad {

std::string_view to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Sphere: return "sphere";
    case PrimitiveKind::Box: return "box";
    case PrimitiveKind::Cone: return "cone";
    case PrimitiveKind::Cylinder: return "cylinder";
  }
  return "unknown";
}

PrimitiveKind primitive_kind_from_string(std::string_view name) {
  if (name == "sphere") return PrimitiveKind::Sphere;
  if (name == "box") return PrimitiveKind::Box;
  if (name == "cone") return PrimitiveKind::Cone;
  if (name == "cylinder") return PrimitiveKind::Cylinder;
  throw Error(ErrorCode::InvalidParam, "unknown primitive kind '" + std::string(name) + "'");
}

Vec3 Primitive::direction_to_local(const Vec3& d) const {
  const Vec3 r = orientation.conjugate().rotate(d);
  return {r.x / scale.x, r.y / scale.y, r.z / scale.z};
}

Vec3 Primitive::to_local(const Vec3& p) const { return direction_to_local(p - center); }

double Primitive::bounding_radius() const {
  const double s = std::max({scale.x, scale.y, scale.z});
  switch (kind) {
    case PrimitiveKind::Sphere: return s;
    case PrimitiveKind::Box: return norm(scale);
    case PrimitiveKind::Cone:
    case PrimitiveKind::Cylinder: return std::hypot(std::max(scale.x, scale.z), scale.y);
  }
  return norm(scale) * 2.0;
}

bool Primitive::contains(const Vec3& world_point) const {
  const Vec3 p = to_local(world_point);
  switch (kind) {
    case PrimitiveKind::Sphere: return dot(p, p) <= 1.0;
    case PrimitiveKind::Box: return std::abs(p.x) <= 1.0 && std::abs(p.y) <= 1.0 && std::abs(p.z) <= 1.0;
    case PrimitiveKind::Cylinder: return std::abs(p.y) <= 1.0 && p.x * p.x + p.z * p.z <= 1.0;
    case PrimitiveKind::Cone: {
      const double r = 0.5 * (1.0 - p.y);
      return std::abs(p.y) <= 1.0 && p.x * p.x + p.z * p.z <= r * r;
    }
  }
  return false;
}

bool Room::contains(const Vec3& p) const {
  return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y && p.z > min.z && p.z < max.z;
}

void validate(const SceneSpec& scene) {
  if (!(scene.room.min.x < scene.room.max.x && scene.room.min.y < scene.room.max.y &&
        scene.room.min.z < scene.room.max.z))
    throw Error(ErrorCode::InvalidParam, "room min must be below max on every axis");
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const Primitive& o = scene.objects[i];
    const std::string tag = "object " + std::to_string(i) + ": ";
    if (!(o.scale.x > 0 && o.scale.y > 0 && o.scale.z > 0) || !o.scale.finite())
      throw Error(ErrorCode::InvalidParam, tag + "scale must be positive");
    if (std::abs(o.orientation.norm() - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidParam, tag + "orientation must be a unit quaternion");
    const double r = o.bounding_radius();
    for (int a = 0; a < 3; ++a)
      if (o.center[a] - r < scene.room.min[a] || o.center[a] + r > scene.room.max[a])
        throw Error(ErrorCode::InvalidParam, tag + "does not fit inside the room");
  }
  validate(scene.material);
  validate(scene.lights);
}

namespace {

struct Roots {
  int count = 0;
  double t[2] = {0, 0};
};

// Real roots of a t^2 + b t + c, ascending.
Roots solve_quadratic(double a, double b, double c) {
  Roots out;
  if (std::abs(a) < 1e-14) {
    if (std::abs(b) < 1e-300) return out;
    out.count = 1;
    out.t[0] = -c / b;
    return out;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return out;
  const double s = std::sqrt(disc);
  // Numerically stable form.
  const double q = -0.5 * (b + std::copysign(s, b));
  double t0 = q / a;
  double t1 = q != 0.0 ? c / q : t0;
  if (t0 > t1) std::swap(t0, t1);
  out.count = 2;
  out.t[0] = t0;
  out.t[1] = t1;
  return out;
}

void consider(std::optional<double>& best, double t, double t_min) {
  if (t > t_min && std::isfinite(t) && (!best || t < *best)) best = t;
}

// Cap disk at height y (local), radius^2 limit.
void consider_cap(std::optional<double>& best, const Vec3& o, const Vec3& d, double y, double radius2, double t_min) {
  if (d.y == 0.0) return;
  const double t = (y - o.y) / d.y;
  const double x = o.x + t * d.x;
  const double z = o.z + t * d.z;
  if (x * x + z * z <= radius2) consider(best, t, t_min);
}

}  // namespace

std::optional<double> intersect(const Primitive& prim, const Ray& ray, double t_min) {
  const Vec3 o = prim.to_local(ray.origin);
  const Vec3 d = prim.direction_to_local(ray.direction);
  std::optional<double> best;
  switch (prim.kind) {
    case PrimitiveKind::Sphere: {
      const Roots r = solve_quadratic(dot(d, d), 2.0 * dot(o, d), dot(o, o) - 1.0);
      for (int k = 0; k < r.count; ++k) consider(best, r.t[k], t_min);
      break;
    }
    case PrimitiveKind::Box: {
      double t_near = -std::numeric_limits<double>::infinity();
      double t_far = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
          if (std::abs(o[a]) > 1.0) return std::nullopt;
          continue;
        }
        double t0 = (-1.0 - o[a]) / d[a];
        double t1 = (1.0 - o[a]) / d[a];
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
      }
      if (t_near > t_far) return std::nullopt;
      consider(best, t_near, t_min);
      if (!best) consider(best, t_far, t_min);
      break;
    }
    case PrimitiveKind::Cylinder: {
      const Roots r = solve_quadratic(d.x * d.x + d.z * d.z, 2.0 * (o.x * d.x + o.z * d.z),
                                      o.x * o.x + o.z * o.z - 1.0);
      for (int k = 0; k < r.count; ++k)
        if (std::abs(o.y + r.t[k] * d.y) <= 1.0) consider(best, r.t[k], t_min);
      consider_cap(best, o, d, 1.0, 1.0, t_min);
      consider_cap(best, o, d, -1.0, 1.0, t_min);
      break;
    }
    case PrimitiveKind::Cone: {
      // x^2 + z^2 = ((1 - y) / 2)^2 for y in [-1, 1].
      const double w = 1.0 - o.y;
      const Roots r = solve_quadratic(d.x * d.x + d.z * d.z - 0.25 * d.y * d.y,
                                      2.0 * (o.x * d.x + o.z * d.z) + 0.5 * w * d.y,
                                      o.x * o.x + o.z * o.z - 0.25 * w * w);
      for (int k = 0; k < r.count; ++k)
        if (std::abs(o.y + r.t[k] * d.y) <= 1.0) consider(best, r.t[k], t_min);
      consider_cap(best, o, d, -1.0, 1.0, t_min);
      break;
    }
  }
  return best;
}

std::optional<double> intersect_room_interior(const Room& room, const Ray& ray) {
  double t_exit = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double d = ray.direction[a];
    if (d > 0.0) t_exit = std::min(t_exit, (room.max[a] - ray.origin[a]) / d);
    if (d < 0.0) t_exit = std::min(t_exit, (room.min[a] - ray.origin[a]) / d);
  }
  if (!(t_exit > 0.0) || !std::isfinite(t_exit)) return std::nullopt;
  return t_exit;
}

TraceResult trace(std::span<const Primitive> objects, const Room* room, const Camera& camera) {
  const Resolution res = camera.resolution();
  TraceResult out{DepthMap(res, 0.0), Mask(res, 0), Grid<int>(res, -1)};
  parallel_for(res.rows, [&](int begin, int end) {
    for (int r = begin; r < end; ++r)
      for (int c = 0; c < res.cols; ++c) {
        const Vec3 dir_cam = camera.camera_ray_direction(r, c);
        const Ray ray{camera.position(), camera.direction_to_world(dir_cam)};
        std::optional<double> best;
        int hit_object = -1;
        if (room != nullptr) best = intersect_room_interior(*room, ray);
        for (std::size_t k = 0; k < objects.size(); ++k) {
          const auto t = intersect(objects[k], ray);
          if (t && (!best || *t < *best)) {
            best = t;
            hit_object = static_cast<int>(k);
          }
        }
        if (!best) continue;
        out.depth(r, c) = *best * std::abs(dir_cam.z);
        out.hit(r, c) = 1;
        out.object(r, c) = hit_object;
      }
  });
  return out;
}

DepthMap trace_depth(const SceneSpec& scene, const Camera& camera) {
  if (!scene.room.contains(camera.position()))
    throw Error(ErrorCode::InvalidParam, "camera must be inside the room");
  TraceResult result = trace(scene.objects, &scene.room, camera);
  for (std::size_t i = 0; i < result.hit.size(); ++i)
    if (!result.hit[i] || !(result.depth[i] > 0.0))
      throw Error(ErrorCode::InternalError, "ray escaped the room at pixel " + std::to_string(i));
  return std::move(result.depth);
}

Vec3 sample_sphere_position(Rng& rng, PoseMode mode, double radius_min, double radius_max, const Vec3& center) {
  if (!(radius_min > 0.0) || radius_max < radius_min)
    throw Error(ErrorCode::InvalidParam, "radius range must satisfy 0 < min <= max");
  Vec3 dir = rng.unit_sphere();
  if (mode == PoseMode::OctantPatch) dir = {std::abs(dir.x), std::abs(dir.y), std::abs(dir.z)};
  const double radius = rng.uniform(radius_min, radius_max);
  return center + radius * dir;
}

Camera sample_camera_pose(Rng& rng, const PoseConfig& config) {
  const Vec3 position =
      sample_sphere_position(rng, config.mode, config.radius_min, config.radius_max, config.target);
  const double focal = rng.uniform(config.focal_min_mm, config.focal_max_mm);
  const Vec3 view = normalize(config.target - position);
  // World +y is up unless the view is nearly vertical.
  const Vec3 up = std::abs(view.y) > 0.99 ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
  return Camera::make(position, config.target, up, focal, config.sensor_mm, config.resolution);
}

PointLight make_normalized_light(const Vec3& position, const Rgb& color, const Vec3& reference) {
  const double dist = norm(position - reference);
  return PointLight{position, color, 0.0, 1.0 / (dist * dist)};
}

void validate(const SceneConfig& config) {
  if (config.n_objects < 1) throw Error(ErrorCode::InvalidParam, "n_objects must be at least 1");
  if (config.kinds.empty()) throw Error(ErrorCode::InvalidParam, "kinds must not be empty");
  if (!(config.scale_min > 0.0) || config.scale_max < config.scale_min)
    throw Error(ErrorCode::InvalidParam, "scale range must satisfy 0 < min <= max");
  if (config.n_lights < 0) throw Error(ErrorCode::InvalidParam, "n_lights must be non-negative");
  for (int a = 0; a < 3; ++a)
    if (!(config.room.min[a] < config.room.max[a]))
      throw Error(ErrorCode::InvalidParam, "room min must be below max on every axis");
}

SceneSpec sample_scene(Rng& rng, const SceneConfig& config) {
  validate(config);
  SceneSpec scene;
  scene.room = config.room;

  int rejections = 0;
  while (static_cast<int>(scene.objects.size()) < config.n_objects) {
    Primitive p;
    p.kind = config.kinds[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(config.kinds.size()) - 1))];
    if (config.uniform_scale || p.kind == PrimitiveKind::Sphere) {
      const double s = rng.uniform(config.scale_min, config.scale_max);
      p.scale = {s, s, s};
    } else {
      p.scale = rng.uniform_vec({config.scale_min, config.scale_min, config.scale_min},
                                {config.scale_max, config.scale_max, config.scale_max});
    }
    p.orientation = rng.rotation();
    p.center = rng.uniform_vec(config.placement_min, config.placement_max);
    const double radius = p.bounding_radius();
    bool ok = true;
    for (int a = 0; a < 3 && ok; ++a)
      ok = p.center[a] - radius > config.room.min[a] && p.center[a] + radius < config.room.max[a];
    for (const Primitive& q : scene.objects) {
      if (!ok) break;
      ok = norm(p.center - q.center) > radius + q.bounding_radius();
    }
    if (ok) {
      scene.objects.push_back(p);
    } else if (++rejections >= 1000) {
      throw Error(ErrorCode::PlacementFailure, "could not place " + std::to_string(config.n_objects) +
                                                   " objects after 1000 rejections");
    }
  }

  const Vec3 target = config.camera.target;
  Material material;
  material.albedo = rng.uniform_vec({0.5, 0.5, 0.5}, {0.9, 0.9, 0.9});
  material.specular = config.specular;
  scene.material = material;

  scene.lights.ambient = config.ambient;
  for (int j = 0; j < config.n_lights; ++j) {
    Vec3 pos;
    int tries = 0;
    do {
      pos = sample_sphere_position(rng, PoseMode::OctantPatch, config.light_radius_min, config.light_radius_max,
                                   target);
      if (++tries > 1000) throw Error(ErrorCode::PlacementFailure, "could not place a light outside the objects");
    } while (!config.room.contains(pos) ||
             std::any_of(scene.objects.begin(), scene.objects.end(),
                         [&](const Primitive& o) { return norm(pos - o.center) <= o.bounding_radius(); }));
    const Rgb color = rng.uniform_vec({0.5, 0.5, 0.5}, {1.0, 1.0, 1.0});
    scene.lights.lights.push_back(make_normalized_light(pos, color, target));
  }

  PoseConfig pose = config.camera;
  for (int tries = 0;; ++tries) {
    if (tries >= 1000) throw Error(ErrorCode::PlacementFailure, "could not place the camera outside the objects");
    Camera camera = sample_camera_pose(rng, pose);
    const bool clear =
        config.room.contains(camera.position()) &&
        std::none_of(scene.objects.begin(), scene.objects.end(), [&](const Primitive& o) {
          return norm(camera.position() - o.center) <= o.bounding_radius();
        });
    if (clear) {
      scene.camera = camera;
      break;
    }
  }
  return scene;
}

SceneSpec sample_scene(std::uint64_t seed, const SceneConfig& config) {
  Rng rng(seed);
  SceneSpec scene = sample_scene(rng, config);
  scene.seed = seed;
  return scene;
}

}  // namespace surfelgrad
