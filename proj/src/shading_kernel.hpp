#pragma once

// Per-surfel shading terms shared by the forward renderer and its backward
// pass. Everything here is in camera space.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "surfelgrad/error.hpp"
#include "surfelgrad/shading.hpp"

namespace surfelgrad::detail {

struct CameraLight {
  Vec3 position;
  Rgb color;
  double k_linear;
  double k_quadratic;
};

inline std::vector<CameraLight> lights_in_camera(const Camera& camera, const LightingRig& rig) {
  std::vector<CameraLight> out;
  out.reserve(rig.lights.size());
  for (const PointLight& l : rig.lights)
    out.push_back({camera.world_to_camera(l.position), l.color, l.k_linear, l.k_quadratic});
  return out;
}

inline double attenuation(const CameraLight& l, double dist) {
  return 1.0 / (l.k_linear * dist + l.k_quadratic * dist * dist);
}

[[noreturn]] inline void throw_light_at_surfel(std::size_t pixel, int cols) {
  throw Error(ErrorCode::LightAtSurfel, "light within " + std::to_string(kMinLightDistance) + " of surfel at pixel (" +
                                            std::to_string(pixel / cols) + ", " + std::to_string(pixel % cols) + ")");
}

// Radiance leaving one surfel toward the camera origin.
inline Rgb shade_surfel(const Vec3& p, const Vec3& n, const Rgb& albedo, const Rgb& ambient,
                        std::span<const CameraLight> lights, const Specular* specular, std::size_t pixel, int cols) {
  Rgb diffuse = ambient;
  Rgb highlight{};
  for (const CameraLight& l : lights) {
    const Vec3 d = l.position - p;
    const double dist = norm(d);
    if (dist < kMinLightDistance) throw_light_at_surfel(pixel, cols);
    const double atten = attenuation(l, dist);
    const double cosine = dot(n, d) / dist;
    if (!(cosine > 0.0)) continue;
    diffuse += (atten * l.color) * cosine;
    if (specular != nullptr) {
      const Vec3 u = d / dist;
      const Vec3 reflected = 2.0 * dot(u, n) * n - u;
      const Vec3 view = -p / norm(p);
      const double rv = dot(reflected, view);
      if (rv > 0.0) highlight += (atten * std::pow(rv, specular->shininess)) * hadamard(specular->k_s, l.color);
    }
  }
  return hadamard(albedo, diffuse) + highlight;
}

}  // namespace surfelgrad::detail
