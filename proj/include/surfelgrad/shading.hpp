#pragma once

#include <optional>
#include <vector>

#include "surfelgrad/camera.hpp"
#include "surfelgrad/grid.hpp"
#include "surfelgrad/surfel.hpp"
#include "surfelgrad/vec.hpp"

namespace surfelgrad {

// Linear RGB triple; channels map to x, y, z.
using Rgb = Vec3;
// Linear radiance image, unbounded above.
using Image = Grid<Rgb>;

struct PointLight {
  Vec3 position;  // world space
  Rgb color;
  double k_linear = 0.0;
  double k_quadratic = 1.0;
};

struct LightingRig {
  Rgb ambient;
  std::vector<PointLight> lights;
};

struct Specular {
  Rgb k_s;
  double shininess = 1.0;
};

struct Material {
  Rgb albedo{1.0, 1.0, 1.0};
  std::optional<Grid<Rgb>> albedo_map;  // overrides albedo when present
  std::optional<Specular> specular;
};

void validate(const LightingRig& rig);
void validate(const Material& material);

// Smallest light-to-surfel distance accepted by the shader.
inline constexpr double kMinLightDistance = 1e-8;

/// Builds the field's per-pixel albedo grid from a material.
Grid<Rgb> albedo_grid(const Material& material, Resolution res);

/// Lambertian shading with linear + quadratic light falloff per surfel.
/// Lights are given in world space and moved into the camera frame here.
Image shade(const SurfelField& field, const Camera& camera, const LightingRig& rig);

/// Lambertian shading plus the classic reflect-vector Phong highlight.
Image shade_phong(const SurfelField& field, const Camera& camera, const LightingRig& rig, const Specular& specular);

/// Back-projection, cross-product normals and shading in one pass. Uses the
/// Phong variant when the material carries a specular term.
Image render(const DepthMap& depth, const Camera& camera, const Material& material, const LightingRig& rig);

/// render() restricted to `valid` pixels; everything else stays black.
/// Normals only use valid neighbors. Used for isolated objects.
Image render_masked(const DepthMap& depth, const Mask& valid, const Camera& camera, const Material& material,
                    const LightingRig& rig);

/// Builds a surfel field from depth (back-projection + normals + albedo).
SurfelField make_surfel_field(const DepthMap& depth, const Camera& camera, const Material& material,
                              const Mask* valid = nullptr);

}  // namespace surfelgrad
