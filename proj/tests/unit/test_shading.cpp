#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "surfelgrad/error.hpp"
#include "surfelgrad/rng.hpp"
#include "surfelgrad/scene.hpp"
#include "surfelgrad/shading.hpp"

using namespace surfelgrad;

namespace {

SurfelField single_surfel(const Vec3& p, const Vec3& n, const Rgb& albedo) {
  SurfelField f;
  f.positions = PositionGrid({1, 1}, p);
  f.normals = NormalGrid({1, 1}, n);
  f.albedo = Grid<Rgb>({1, 1}, albedo);
  f.degenerate = Mask({1, 1}, 0);
  return f;
}

double max_abs_diff(const Image& a, const Image& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) worst = std::max(worst, std::abs(a[i][ch] - b[i][ch]));
  return worst;
}

struct SphereScene {
  SceneSpec scene;
  DepthMap depth;
};

SphereScene sphere_in_room(int size, int n_lights) {
  SphereScene s;
  s.scene.objects.push_back({PrimitiveKind::Sphere, {0, 0, 0}, {1, 1, 1}, {}});
  s.scene.camera = Camera::make({2.5, 1.5, 2.5}, {0, 0, 0}, {0, 1, 0}, 22.0, 24.0, {size, size});
  s.scene.material.albedo = {0.8, 0.6, 0.4};
  s.scene.lights.ambient = {0.05, 0.05, 0.05};
  const Vec3 positions[2] = {{2.5, 3, 1}, {-1, 2.5, 3}};
  for (int i = 0; i < n_lights; ++i)
    s.scene.lights.lights.push_back(make_normalized_light(positions[i], {1, 0.9, 0.8}, {0, 0, 0}));
  s.depth = trace_depth(s.scene);
  return s;
}

}  // namespace

TEST_CASE("ambient-only lighting gives a constant image") {
  const Camera cam = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20, 24, {6, 6});
  Rng rng(1);
  DepthMap d(cam.resolution());
  for (double& v : d.values()) v = rng.uniform(1, 3);
  LightingRig rig{{0.1, 0.1, 0.1}, {}};
  const Image img = render(d, cam, Material{}, rig);
  for (const Rgb& px : img.values()) CHECK(px == Rgb{0.1, 0.1, 0.1});
}

TEST_CASE("unit-distance light along the normal") {
  const Camera cam;
  const SurfelField f = single_surfel({0, 0, -2}, {0, 0, 1}, {1, 0, 0});
  LightingRig rig{{0, 0, 0}, {{{0, 0, -1}, {1, 1, 1}, 1.0, 0.0}}};
  const Image img = shade(f, cam, rig);
  CHECK(img[0] == Rgb{1, 0, 0});
}

TEST_CASE("light behind the surface contributes nothing") {
  const Camera cam;
  const SurfelField f = single_surfel({0, 0, -2}, {0, 0, 1}, {1, 1, 1});
  LightingRig rig{{0, 0, 0}, {{{0, 0, -3}, {1, 1, 1}, 0.0, 1.0}}};
  CHECK(shade(f, cam, rig)[0] == Rgb{0, 0, 0});
}

TEST_CASE("sphere-in-room with two lights matches the transcribed shading equation bit for bit") {
  const SphereScene s = sphere_in_room(64, 2);
  const SurfelField f = make_surfel_field(s.depth, s.scene.camera, s.scene.material);
  const Image img = shade(f, s.scene.camera, s.scene.lights);
  const Image ref = oracle::shade_reference(f.positions, f.normals, s.scene.material.albedo, s.scene.camera,
                                            s.scene.lights, nullptr);
  CHECK(img == ref);
}

TEST_CASE("Phong term agrees with the transcription") {
  SphereScene s = sphere_in_room(48, 2);
  const Specular spec{{0.5, 0.5, 0.5}, 20.0};
  const SurfelField f = make_surfel_field(s.depth, s.scene.camera, s.scene.material);
  const Image img = shade_phong(f, s.scene.camera, s.scene.lights, spec);
  const Image ref =
      oracle::shade_reference(f.positions, f.normals, s.scene.material.albedo, s.scene.camera, s.scene.lights, &spec);
  CHECK(max_abs_diff(img, ref) < 1e-12);
}

TEST_CASE("zero specular coefficient reproduces Lambertian shading") {
  const SphereScene s = sphere_in_room(32, 1);
  const SurfelField f = make_surfel_field(s.depth, s.scene.camera, s.scene.material);
  CHECK(shade_phong(f, s.scene.camera, s.scene.lights, {{0, 0, 0}, 10.0}) == shade(f, s.scene.camera, s.scene.lights));
}

TEST_CASE("mirror configuration returns the light color") {
  const Camera cam;
  const SurfelField f = single_surfel({0, 0, -2}, {0, 0, 1}, {0, 0, 0});
  LightingRig rig{{0, 0, 0}, {{{0, 0, -1}, {0.3, 0.6, 0.9}, 1.0, 0.0}}};
  const Image img = shade_phong(f, cam, rig, {{1, 1, 1}, 7.0});
  CHECK(img[0] == Rgb{0.3, 0.6, 0.9});
}

TEST_CASE("the specular lobe shrinks as shininess grows") {
  SphereScene s = sphere_in_room(96, 1);
  s.scene.material.albedo = {0, 0, 0};
  s.scene.lights.ambient = {0, 0, 0};
  int previous = 1 << 30;
  for (double alpha : {8.0, 32.0, 128.0}) {
    s.scene.material.specular = Specular{{1, 1, 1}, alpha};
    const Image img = render(s.depth, s.scene.camera, s.scene.material, s.scene.lights);
    double peak = 0.0;
    for (const Rgb& px : img.values()) peak = std::max(peak, px.x);
    int above = 0;
    for (const Rgb& px : img.values()) above += px.x > 0.5 * peak;
    CHECK(above > 0);
    CHECK(above < previous);
    previous = above;
  }
}

TEST_CASE("render equals the manual composition") {
  const SphereScene s = sphere_in_room(40, 2);
  const PositionGrid p = backproject(s.depth, s.scene.camera);
  SurfelField f;
  f.positions = p;
  const NormalEstimate n = estimate_normals(p);
  f.normals = n.normals;
  f.degenerate = n.degenerate;
  f.albedo = Grid<Rgb>(p.resolution(), s.scene.material.albedo);
  CHECK(render(s.depth, s.scene.camera, s.scene.material, s.scene.lights) == shade(f, s.scene.camera, s.scene.lights));
}

TEST_CASE("linearity, additivity and albedo scaling") {
  const SphereScene s = sphere_in_room(32, 2);
  const Camera& cam = s.scene.camera;
  const LightingRig both = s.scene.lights;
  LightingRig a = both, b = both, none = both;
  a.lights = {both.lights[0]};
  b.lights = {both.lights[1]};
  none.lights.clear();
  const Material& mat = s.scene.material;
  const Image amb = render(s.depth, cam, mat, none);
  const Image ia = render(s.depth, cam, mat, a);
  const Image ib = render(s.depth, cam, mat, b);
  const Image iab = render(s.depth, cam, mat, both);
  for (std::size_t i = 0; i < iab.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) CHECK(std::abs(iab[i][ch] - (ia[i][ch] + ib[i][ch] - amb[i][ch])) < 1e-9);

  LightingRig scaled = a;
  scaled.lights[0].color = 2.5 * scaled.lights[0].color;
  const Image is = render(s.depth, cam, mat, scaled);
  for (std::size_t i = 0; i < is.size(); ++i)
    for (int ch = 0; ch < 3; ++ch)
      CHECK(std::abs(is[i][ch] - (amb[i][ch] + 2.5 * (ia[i][ch] - amb[i][ch]))) < 1e-9);

  Material half = mat;
  half.albedo = 0.5 * mat.albedo;
  const Image ih = render(s.depth, cam, half, both);
  for (std::size_t i = 0; i < ih.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) CHECK(std::abs(ih[i][ch] - 0.5 * iab[i][ch]) < 1e-9);
}

TEST_CASE("black images from zero albedo or zero light") {
  const SphereScene s = sphere_in_room(16, 2);
  Material black;
  black.albedo = {0, 0, 0};
  const Image unlit = render(s.depth, s.scene.camera, black, s.scene.lights);
  for (const Rgb& px : unlit.values()) CHECK(px == Rgb{0, 0, 0});
  const LightingRig dark{{0, 0, 0}, {}};
  const Image dim = render(s.depth, s.scene.camera, s.scene.material, dark);
  for (const Rgb& px : dim.values()) CHECK(px == Rgb{0, 0, 0});
}

TEST_CASE("rotating camera and lights together leaves the image unchanged") {
  const SphereScene s = sphere_in_room(32, 2);
  const Camera& cam = s.scene.camera;
  const Quat q = Quat::from_axis_angle({0.3, -1, 0.4}, 1.1);
  const Camera rotated = Camera::make(q.rotate(cam.position()), q.rotate(cam.look_at()), q.rotate(cam.up()),
                                      cam.focal_mm(), cam.sensor_mm(), cam.resolution());
  LightingRig rig = s.scene.lights;
  for (PointLight& l : rig.lights) l.position = q.rotate(l.position);
  const Image a = render(s.depth, cam, s.scene.material, s.scene.lights);
  const Image b = render(s.depth, rotated, s.scene.material, rig);
  CHECK(max_abs_diff(a, b) < 1e-9);
}

TEST_CASE("per-pixel albedo maps override the uniform albedo") {
  const SphereScene s = sphere_in_room(16, 1);
  Material m = s.scene.material;
  m.albedo_map = Grid<Rgb>(s.depth.resolution(), s.scene.material.albedo);
  CHECK(render(s.depth, s.scene.camera, m, s.scene.lights) ==
        render(s.depth, s.scene.camera, s.scene.material, s.scene.lights));
}

TEST_CASE("shading errors") {
  const Camera cam;
  const SurfelField f = single_surfel({0, 0, -2}, {0, 0, 1}, {1, 1, 1});
  try {
    shade(f, cam, {{0, 0, 0}, {{{0, 0, -2}, {1, 1, 1}, 0.0, 1.0}}});
    FAIL("expected LightAtSurfel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LightAtSurfel);
    CHECK(std::string(e.what()).find("(0, 0)") != std::string::npos);
  }
  try {
    shade(f, cam, {{0, 0, 0}, {{{0, 0, 0}, {1, 1, 1}, 0.0, 0.0}}});
    FAIL("expected InvalidParam");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParam);
  }
  Material m;
  m.albedo = {1.5, 0, 0};
  CHECK_THROWS_AS(validate(m), Error);
}
