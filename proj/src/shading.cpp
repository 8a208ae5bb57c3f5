#include "surfelgrad/shading.hpp"

#include <cmath>
#include <string>

#include "shading_kernel.hpp"
#include "surfelgrad/error.hpp"
#include "surfelgrad/parallel.hpp"

namespace surfelgrad {

namespace {

bool non_negative(const Rgb& c) { return c.finite() && c.x >= 0.0 && c.y >= 0.0 && c.z >= 0.0; }
bool unit_range(const Rgb& c) { return non_negative(c) && c.x <= 1.0 && c.y <= 1.0 && c.z <= 1.0; }

Image shade_impl(const SurfelField& field, const Camera& camera, const LightingRig& rig, const Specular* specular,
                 const Mask* valid) {
  validate(rig);
  const Resolution res = field.positions.resolution();
  if (field.normals.resolution() != res || field.albedo.resolution() != res)
    throw Error(ErrorCode::ResolutionMismatch, "surfel field grids differ in size");
  const auto lights = detail::lights_in_camera(camera, rig);
  Image out(res, Rgb{});
  parallel_for(res.rows, [&](int begin, int end) {
    for (int r = begin; r < end; ++r)
      for (int c = 0; c < res.cols; ++c) {
        const std::size_t i = out.index(r, c);
        if (valid != nullptr && (*valid)[i] == 0) continue;
        const Rgb color = detail::shade_surfel(field.positions[i], field.normals[i], field.albedo[i], rig.ambient,
                                               lights, specular, i, res.cols);
        if (!color.finite())
          throw Error(ErrorCode::NonFiniteOutput,
                      "non-finite radiance at pixel (" + std::to_string(r) + ", " + std::to_string(c) + ")");
        out[i] = color;
      }
  });
  return out;
}

}  // namespace

void validate(const LightingRig& rig) {
  if (!non_negative(rig.ambient)) throw Error(ErrorCode::InvalidParam, "ambient must be finite and non-negative");
  for (std::size_t j = 0; j < rig.lights.size(); ++j) {
    const PointLight& l = rig.lights[j];
    const std::string tag = "light " + std::to_string(j) + ": ";
    if (!l.position.finite()) throw Error(ErrorCode::InvalidParam, tag + "position must be finite");
    if (!non_negative(l.color)) throw Error(ErrorCode::InvalidParam, tag + "color must be non-negative");
    if (!(l.k_linear >= 0.0) || !(l.k_quadratic >= 0.0) || !std::isfinite(l.k_linear) ||
        !std::isfinite(l.k_quadratic))
      throw Error(ErrorCode::InvalidParam, tag + "attenuation coefficients must be non-negative");
    if (!(l.k_linear + l.k_quadratic > 0.0)) throw Error(ErrorCode::InvalidParam, tag + "k_l + k_q must be positive");
  }
}

void validate(const Material& material) {
  if (!unit_range(material.albedo)) throw Error(ErrorCode::InvalidParam, "albedo must lie in [0,1]^3");
  if (material.albedo_map)
    for (const Rgb& a : material.albedo_map->values())
      if (!unit_range(a)) throw Error(ErrorCode::InvalidParam, "albedo map values must lie in [0,1]^3");
  if (material.specular) {
    if (!unit_range(material.specular->k_s)) throw Error(ErrorCode::InvalidParam, "k_s must lie in [0,1]^3");
    if (!(material.specular->shininess > 0.0) || !std::isfinite(material.specular->shininess))
      throw Error(ErrorCode::InvalidParam, "shininess must be positive");
  }
}

Grid<Rgb> albedo_grid(const Material& material, Resolution res) {
  if (material.albedo_map) {
    if (material.albedo_map->resolution() != res)
      throw Error(ErrorCode::ResolutionMismatch, "albedo map resolution differs from the camera");
    return *material.albedo_map;
  }
  return Grid<Rgb>(res, material.albedo);
}

Image shade(const SurfelField& field, const Camera& camera, const LightingRig& rig) {
  return shade_impl(field, camera, rig, nullptr, nullptr);
}

Image shade_phong(const SurfelField& field, const Camera& camera, const LightingRig& rig, const Specular& specular) {
  return shade_impl(field, camera, rig, &specular, nullptr);
}

SurfelField make_surfel_field(const DepthMap& depth, const Camera& camera, const Material& material,
                              const Mask* valid) {
  validate(material);
  SurfelField field;
  if (valid == nullptr) {
    field.positions = backproject(depth, camera);
  } else {
    if (depth.resolution() != camera.resolution() || valid->resolution() != camera.resolution())
      throw Error(ErrorCode::ResolutionMismatch, "depth map, mask and camera resolutions differ");
    const PositionGrid scales = ray_scales(camera);
    field.positions = PositionGrid(depth.resolution());
    for (std::size_t i = 0; i < depth.size(); ++i) {
      if ((*valid)[i] == 0) continue;
      if (!(depth[i] > 0.0) || !std::isfinite(depth[i]))
        throw Error(ErrorCode::NonPositiveDepth, "depth must be positive inside the mask");
      field.positions[i] = depth[i] * scales[i];
    }
  }
  NormalEstimate normals = estimate_normals(field.positions, valid);
  field.normals = std::move(normals.normals);
  field.degenerate = std::move(normals.degenerate);
  field.albedo = albedo_grid(material, depth.resolution());
  return field;
}

Image render(const DepthMap& depth, const Camera& camera, const Material& material, const LightingRig& rig) {
  const SurfelField field = make_surfel_field(depth, camera, material);
  return material.specular ? shade_phong(field, camera, rig, *material.specular) : shade(field, camera, rig);
}

Image render_masked(const DepthMap& depth, const Mask& valid, const Camera& camera, const Material& material,
                    const LightingRig& rig) {
  const SurfelField field = make_surfel_field(depth, camera, material, &valid);
  const Specular* specular = material.specular ? &*material.specular : nullptr;
  return shade_impl(field, camera, rig, specular, &valid);
}

}  // namespace surfelgrad
