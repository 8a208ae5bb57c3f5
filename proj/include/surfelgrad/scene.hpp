#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "surfelgrad/camera.hpp"
#include "surfelgrad/rng.hpp"
#include "surfelgrad/shading.hpp"
#include "surfelgrad/surfel.hpp"

namespace surfelgrad {

enum class PrimitiveKind { Sphere, Box, Cone, Cylinder };

std::string_view to_string(PrimitiveKind kind);
PrimitiveKind primitive_kind_from_string(std::string_view name);

/// A unit primitive mapped to world space by scale, then rotation, then
/// translation. Unit shapes: sphere of radius 1; box [-1,1]^3; cylinder of
/// radius 1 over y in [-1,1]; cone with base radius 1 at y=-1 and apex at y=1.
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Sphere;
  Vec3 center;
  Vec3 scale{1, 1, 1};
  Quat orientation;

  Vec3 to_local(const Vec3& world_point) const;
  Vec3 direction_to_local(const Vec3& world_direction) const;
  double bounding_radius() const;
  bool contains(const Vec3& world_point) const;

  friend bool operator==(const Primitive&, const Primitive&) = default;
};

struct Room {
  Vec3 min{-4, -4, -4};
  Vec3 max{4, 4, 4};

  Vec3 center() const { return 0.5 * (min + max); }
  double diagonal() const { return norm(max - min); }
  bool contains(const Vec3& p) const;
};

struct SceneSpec {
  Room room;
  std::vector<Primitive> objects;
  Material material;
  LightingRig lights;
  Camera camera;
  std::uint64_t seed = 0;
};

void validate(const SceneSpec& scene);

// Ray parameter of the first intersection with t > t_min, if any.
std::optional<double> intersect(const Primitive& primitive, const Ray& ray, double t_min = 1e-9);
// Exit distance from inside the room.
std::optional<double> intersect_room_interior(const Room& room, const Ray& ray);

struct TraceResult {
  DepthMap depth;   // camera-space z-depth; zero on misses
  Mask hit;
  Grid<int> object;  // index into the object list, -1 for walls and misses
};

/// Nearest-hit ray casting of every pixel against the objects and, when
/// given, the interior walls of the room.
TraceResult trace(std::span<const Primitive> objects, const Room* room, const Camera& camera);

/// Ground-truth depth of a scene. The camera must be inside the room, so
/// every pixel hits something.
DepthMap trace_depth(const SceneSpec& scene, const Camera& camera);
inline DepthMap trace_depth(const SceneSpec& scene) { return trace_depth(scene, scene.camera); }

enum class PoseMode { OctantPatch, FullSphere };

struct PoseConfig {
  PoseMode mode = PoseMode::OctantPatch;
  double radius_min = 5.0;
  double radius_max = 6.0;
  Vec3 target;
  Resolution resolution{128, 128};
  double focal_min_mm = 18.0;
  double focal_max_mm = 25.0;
  double sensor_mm = 24.0;
};

/// Camera on a sphere around the target (positive octant patch or the full
/// sphere), looking at the target, with a uniformly drawn focal length.
Camera sample_camera_pose(Rng& rng, const PoseConfig& config);

/// Point on a sphere of radius [radius_min, radius_max] around `center`,
/// restricted to the positive octant in OctantPatch mode.
Vec3 sample_sphere_position(Rng& rng, PoseMode mode, double radius_min, double radius_max, const Vec3& center);

struct SceneConfig {
  int n_objects = 3;
  std::vector<PrimitiveKind> kinds{PrimitiveKind::Sphere, PrimitiveKind::Box, PrimitiveKind::Cone,
                                   PrimitiveKind::Cylinder};
  Room room;
  // Object centers are drawn inside this box (clipped to the room).
  Vec3 placement_min{-2.5, -2.5, -2.5};
  Vec3 placement_max{2.5, 2.5, 2.5};
  double scale_min = 0.4;
  double scale_max = 0.9;
  bool uniform_scale = false;
  int n_lights = 1;
  double light_radius_min = 3.0;
  double light_radius_max = 3.5;
  Rgb ambient{0.1, 0.1, 0.1};
  PoseConfig camera{PoseMode::OctantPatch, 3.0, 3.5, {}, {128, 128}, 18.0, 25.0, 24.0};
  std::optional<Specular> specular;
};

void validate(const SceneConfig& config);

/// Rejection-samples non-overlapping primitives (bounding spheres) inside the
/// room, plus lights and a camera. Deterministic in the generator state.
SceneSpec sample_scene(Rng& rng, const SceneConfig& config);
SceneSpec sample_scene(std::uint64_t seed, const SceneConfig& config);

/// Point light with k_l = 0 and k_q chosen so that the falloff equals 1 at
/// the distance to `reference`.
PointLight make_normalized_light(const Vec3& position, const Rgb& color, const Vec3& reference);

}  // namespace surfelgrad
