#include "surfelgrad/json_io.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

#include "surfelgrad/error.hpp"

namespace surfelgrad {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where, "expected a number");
  return j.get<double>();
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) parse_fail(where, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) parse_fail(where, "out of range");
  return static_cast<int>(v);
}

std::uint64_t as_u64(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) parse_fail(where, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool as_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) parse_fail(where, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) parse_fail(where, "expected a string");
  return j.get<std::string>();
}

Vec3 as_vec3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) parse_fail(where, "expected [x, y, z]");
  return {as_double(j[0], where), as_double(j[1], where), as_double(j[2], where)};
}

Quat as_quat(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) parse_fail(where, "expected [w, x, y, z]");
  return {as_double(j[0], where), as_double(j[1], where), as_double(j[2], where), as_double(j[3], where)};
}

Resolution as_resolution(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) parse_fail(where, "expected [rows, cols]");
  return {as_int(j[0], where), as_int(j[1], where)};
}

// Visits the keys of one JSON object and rejects the ones nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) parse_fail(where_, "expected an object");
  }

  const Json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& require(const char* key) {
    const Json* v = find(key);
    if (v == nullptr) parse_fail(where_, std::string("missing key '") + key + "'");
    return *v;
  }
  std::string at(const char* key) const { return where_ + "." + key; }

  void read(const char* key, double& out) {
    if (const Json* v = find(key)) out = as_double(*v, at(key));
  }
  void read(const char* key, int& out) {
    if (const Json* v = find(key)) out = as_int(*v, at(key));
  }
  void read(const char* key, bool& out) {
    if (const Json* v = find(key)) out = as_bool(*v, at(key));
  }
  void read(const char* key, std::uint64_t& out) {
    if (const Json* v = find(key)) out = as_u64(*v, at(key));
  }
  void read(const char* key, Vec3& out) {
    if (const Json* v = find(key)) out = as_vec3(*v, at(key));
  }
  void read(const char* key, Resolution& out) {
    if (const Json* v = find(key)) out = as_resolution(*v, at(key));
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.contains(item.key())) parse_fail(where_, "unknown key '" + item.key() + "'");
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Json resolution_json(Resolution r) { return Json::array({r.rows, r.cols}); }

Json specular_json(const Specular& s) { return {{"k_s", to_json(s.k_s)}, {"shininess", s.shininess}}; }

Specular specular_from(const Json& j, const std::string& where) {
  ObjectReader in(j, where);
  Specular s;
  in.read("k_s", s.k_s);
  in.read("shininess", s.shininess);
  in.finish();
  return s;
}

Room room_from(const Json& j, const std::string& where) {
  ObjectReader in(j, where);
  Room room;
  in.read("min", room.min);
  in.read("max", room.max);
  in.finish();
  return room;
}

std::string_view pose_mode_name(PoseMode mode) { return mode == PoseMode::OctantPatch ? "octant" : "sphere"; }

PoseConfig pose_from(const Json& j, const std::string& where) {
  ObjectReader in(j, where);
  PoseConfig c;
  if (const Json* v = in.find("mode")) {
    const std::string mode = as_string(*v, in.at("mode"));
    if (mode == "octant")
      c.mode = PoseMode::OctantPatch;
    else if (mode == "sphere")
      c.mode = PoseMode::FullSphere;
    else
      throw Error(ErrorCode::InvalidParam, in.at("mode") + ": expected 'octant' or 'sphere'");
  }
  in.read("radius_min", c.radius_min);
  in.read("radius_max", c.radius_max);
  in.read("target", c.target);
  in.read("resolution", c.resolution);
  in.read("focal_min_mm", c.focal_min_mm);
  in.read("focal_max_mm", c.focal_max_mm);
  in.read("sensor_mm", c.sensor_mm);
  in.finish();
  if (!(c.radius_min > 0.0) || c.radius_max < c.radius_min)
    throw Error(ErrorCode::InvalidParam, where + ": radius range must satisfy 0 < min <= max");
  if (!(c.focal_min_mm > 0.0) || c.focal_max_mm < c.focal_min_mm || !(c.sensor_mm > 0.0))
    throw Error(ErrorCode::InvalidParam, where + ": focal range and sensor must be positive");
  if (c.resolution.rows < 1 || c.resolution.cols < 1)
    throw Error(ErrorCode::InvalidParam, where + ": resolution must be positive");
  return c;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    const auto colon = what.find("syntax error");
    if (colon != std::string::npos) what = what.substr(colon);
    throw Error(ErrorCode::ParseError,
                std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }
Json to_json(const Quat& q) { return Json::array({q.w, q.x, q.y, q.z}); }

Json to_json(const Camera& camera) {
  return {{"position", to_json(camera.position())},
          {"look_at", to_json(camera.look_at())},
          {"up", to_json(camera.up())},
          {"focal_mm", camera.focal_mm()},
          {"sensor_mm", camera.sensor_mm()},
          {"resolution", resolution_json(camera.resolution())}};
}

Json to_json(const PointLight& light) {
  return {{"position", to_json(light.position)},
          {"color", to_json(light.color)},
          {"k_linear", light.k_linear},
          {"k_quadratic", light.k_quadratic}};
}

Json to_json(const LightingRig& rig) {
  Json lights = Json::array();
  for (const PointLight& l : rig.lights) lights.push_back(to_json(l));
  return {{"ambient", to_json(rig.ambient)}, {"lights", std::move(lights)}};
}

Json to_json(const Material& material) {
  Json j = {{"albedo", to_json(material.albedo)}};
  if (material.specular) j["specular"] = specular_json(*material.specular);
  return j;
}

Json to_json(const Primitive& p) {
  return {{"kind", std::string(to_string(p.kind))},
          {"center", to_json(p.center)},
          {"scale", to_json(p.scale)},
          {"orientation", to_json(p.orientation)}};
}

Json to_json(const Room& room) { return {{"min", to_json(room.min)}, {"max", to_json(room.max)}}; }

Json to_json(const SceneSpec& scene) {
  Json objects = Json::array();
  for (const Primitive& p : scene.objects) objects.push_back(to_json(p));
  return {{"seed", scene.seed},
          {"room", to_json(scene.room)},
          {"objects", std::move(objects)},
          {"material", to_json(scene.material)},
          {"lights", to_json(scene.lights)},
          {"camera", to_json(scene.camera)}};
}

Json to_json(const PoseConfig& c) {
  return {{"mode", std::string(pose_mode_name(c.mode))},
          {"radius_min", c.radius_min},
          {"radius_max", c.radius_max},
          {"target", to_json(c.target)},
          {"resolution", resolution_json(c.resolution)},
          {"focal_min_mm", c.focal_min_mm},
          {"focal_max_mm", c.focal_max_mm},
          {"sensor_mm", c.sensor_mm}};
}

Json to_json(const SceneConfig& c) {
  Json kinds = Json::array();
  for (PrimitiveKind k : c.kinds) kinds.push_back(std::string(to_string(k)));
  Json j = {{"n_objects", c.n_objects},
            {"kinds", std::move(kinds)},
            {"room", to_json(c.room)},
            {"placement_min", to_json(c.placement_min)},
            {"placement_max", to_json(c.placement_max)},
            {"scale_min", c.scale_min},
            {"scale_max", c.scale_max},
            {"uniform_scale", c.uniform_scale},
            {"n_lights", c.n_lights},
            {"light_radius_min", c.light_radius_min},
            {"light_radius_max", c.light_radius_max},
            {"ambient", to_json(c.ambient)},
            {"camera", to_json(c.camera)}};
  if (c.specular) j["specular"] = specular_json(*c.specular);
  return j;
}

Json to_json(const ReconConfig& c) {
  return {{"max_iters", c.max_iters},
          {"step_size", c.step_size},
          {"smoothness_weight", c.smoothness_weight},
          {"init_depth", c.init_depth},
          {"optimizer", std::string(to_string(c.optimizer))},
          {"convergence_tol", c.convergence_tol},
          {"depth_min", c.depth_min},
          {"depth_max", c.depth_max},
          {"momentum", c.momentum},
          {"beta2", c.beta2},
          {"levels", c.levels},
          {"level_iters", c.level_iters}};
}

Json to_json(const IqttConfig& c) {
  return {{"cube_count", c.cube_count},
          {"image_size", c.image_size},
          {"n_lights", c.n_lights},
          {"ambient", to_json(c.ambient)},
          {"albedo", to_json(c.albedo)}};
}

Json to_json(const IqttProvenance& p) {
  Json candidates = Json::array();
  for (const IqttCandidate& c : p.candidates)
    candidates.push_back({{"shape", c.shape}, {"rotation", to_json(c.rotation)}, {"mirrored", c.mirrored}});
  return {{"reference_shape", p.reference_shape},
          {"reference_rotation", to_json(p.reference_rotation)},
          {"candidates", std::move(candidates)}};
}

Json to_json(const GradcheckConfig& c) {
  return {{"seed", c.seed},
          {"trials", c.trials},
          {"min_size", c.min_size},
          {"max_size", c.max_size},
          {"tolerance", c.tolerance},
          {"relative_step", c.relative_step},
          {"kink_margin", c.kink_margin},
          {"specular", c.specular}};
}

Json to_json(const GradcheckReport& r) {
  Json seeds = Json::array();
  Json trials = Json::array();
  for (const GradcheckTrial& t : r.trials) {
    seeds.push_back(t.seed);
    trials.push_back(
        {{"seed", t.seed}, {"size", t.size}, {"max_rel_err", t.max_rel_err}, {"kink_excluded", t.kink_excluded}});
  }
  return {{"seed", r.config.seed},
          {"seeds", std::move(seeds)},
          {"max_rel_err", r.max_rel_err},
          {"mean_rel_err", r.mean_rel_err},
          {"kink_excluded_count", r.kink_excluded_count},
          {"compared_count", r.compared_count},
          {"tolerance", r.config.tolerance},
          {"pass", r.pass},
          {"config", to_json(r.config)},
          {"trials", std::move(trials)}};
}

Vec3 vec3_from_json(const Json& j) { return as_vec3(j, "vector"); }
Quat quat_from_json(const Json& j) { return as_quat(j, "quaternion"); }

Camera camera_from_json(const Json& j) {
  ObjectReader in(j, "camera");
  const Vec3 position = as_vec3(in.require("position"), in.at("position"));
  const Vec3 look_at = as_vec3(in.require("look_at"), in.at("look_at"));
  Vec3 up{0, 1, 0};
  double focal = 20.0;
  double sensor = 24.0;
  Resolution res{128, 128};
  in.read("up", up);
  in.read("focal_mm", focal);
  in.read("sensor_mm", sensor);
  in.read("resolution", res);
  in.finish();
  return Camera::make(position, look_at, up, focal, sensor, res);
}

LightingRig lighting_from_json(const Json& j) {
  ObjectReader in(j, "lights");
  LightingRig rig;
  in.read("ambient", rig.ambient);
  if (const Json* list = in.find("lights")) {
    if (!list->is_array()) parse_fail(in.at("lights"), "expected an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      ObjectReader li((*list)[i], in.at("lights") + "[" + std::to_string(i) + "]");
      PointLight light;
      light.position = as_vec3(li.require("position"), li.at("position"));
      light.color = as_vec3(li.require("color"), li.at("color"));
      li.read("k_linear", light.k_linear);
      li.read("k_quadratic", light.k_quadratic);
      li.finish();
      rig.lights.push_back(light);
    }
  }
  in.finish();
  validate(rig);
  return rig;
}

Material material_from_json(const Json& j) {
  ObjectReader in(j, "material");
  Material m;
  in.read("albedo", m.albedo);
  if (const Json* s = in.find("specular"); s != nullptr && !s->is_null()) m.specular = specular_from(*s, in.at("specular"));
  in.finish();
  validate(m);
  return m;
}

Primitive primitive_from_json(const Json& j) {
  ObjectReader in(j, "object");
  Primitive p;
  p.kind = primitive_kind_from_string(as_string(in.require("kind"), in.at("kind")));
  p.center = as_vec3(in.require("center"), in.at("center"));
  in.read("scale", p.scale);
  if (const Json* q = in.find("orientation")) p.orientation = as_quat(*q, in.at("orientation"));
  in.finish();
  return p;
}

SceneSpec scene_from_json(const Json& j) {
  ObjectReader in(j, "scene");
  SceneSpec scene;
  in.read("seed", scene.seed);
  if (const Json* room = in.find("room")) scene.room = room_from(*room, in.at("room"));
  if (const Json* objects = in.find("objects")) {
    if (!objects->is_array()) parse_fail(in.at("objects"), "expected an array");
    for (const Json& o : *objects) scene.objects.push_back(primitive_from_json(o));
  }
  if (const Json* m = in.find("material")) scene.material = material_from_json(*m);
  scene.lights = lighting_from_json(in.require("lights"));
  scene.camera = camera_from_json(in.require("camera"));
  in.finish();
  validate(scene);
  return scene;
}

SceneConfig scene_config_from_json(const Json& j) {
  ObjectReader in(j, "config");
  SceneConfig c;
  in.read("n_objects", c.n_objects);
  if (const Json* kinds = in.find("kinds")) {
    if (!kinds->is_array()) parse_fail(in.at("kinds"), "expected an array");
    c.kinds.clear();
    for (const Json& k : *kinds) c.kinds.push_back(primitive_kind_from_string(as_string(k, in.at("kinds"))));
  }
  if (const Json* room = in.find("room")) c.room = room_from(*room, in.at("room"));
  in.read("placement_min", c.placement_min);
  in.read("placement_max", c.placement_max);
  in.read("scale_min", c.scale_min);
  in.read("scale_max", c.scale_max);
  in.read("uniform_scale", c.uniform_scale);
  in.read("n_lights", c.n_lights);
  in.read("light_radius_min", c.light_radius_min);
  in.read("light_radius_max", c.light_radius_max);
  in.read("ambient", c.ambient);
  if (const Json* cam = in.find("camera")) c.camera = pose_from(*cam, in.at("camera"));
  if (const Json* s = in.find("specular"); s != nullptr && !s->is_null()) c.specular = specular_from(*s, in.at("specular"));
  in.finish();
  validate(c);
  return c;
}

ReconConfig recon_config_from_json(const Json& j) {
  ObjectReader in(j, "config");
  ReconConfig c;
  in.read("max_iters", c.max_iters);
  in.read("step_size", c.step_size);
  in.read("smoothness_weight", c.smoothness_weight);
  in.read("init_depth", c.init_depth);
  if (const Json* o = in.find("optimizer")) c.optimizer = optimizer_from_string(as_string(*o, in.at("optimizer")));
  in.read("convergence_tol", c.convergence_tol);
  in.read("depth_min", c.depth_min);
  in.read("depth_max", c.depth_max);
  in.read("momentum", c.momentum);
  in.read("beta2", c.beta2);
  in.read("levels", c.levels);
  in.read("level_iters", c.level_iters);
  in.finish();
  validate(c);
  return c;
}

IqttConfig iqtt_config_from_json(const Json& j) {
  ObjectReader in(j, "config");
  IqttConfig c;
  in.read("cube_count", c.cube_count);
  in.read("image_size", c.image_size);
  in.read("n_lights", c.n_lights);
  in.read("ambient", c.ambient);
  in.read("albedo", c.albedo);
  in.finish();
  validate(c);
  return c;
}

GradcheckConfig gradcheck_config_from_json(const Json& j) {
  ObjectReader in(j, "config");
  GradcheckConfig c;
  in.read("seed", c.seed);
  in.read("trials", c.trials);
  in.read("min_size", c.min_size);
  in.read("max_size", c.max_size);
  in.read("tolerance", c.tolerance);
  in.read("relative_step", c.relative_step);
  in.read("kink_margin", c.kink_margin);
  in.read("specular", c.specular);
  in.finish();
  if (c.trials < 1 || c.min_size < 3 || c.max_size < c.min_size)
    throw Error(ErrorCode::InvalidParam, "gradcheck needs trials >= 1 and 3 <= min_size <= max_size");
  if (!(c.tolerance >= 0.0) || !(c.relative_step > 0.0) || !(c.kink_margin >= 0.0))
    throw Error(ErrorCode::InvalidParam, "gradcheck tolerance, step and margin must be non-negative");
  return c;
}

}  // namespace surfelgrad
