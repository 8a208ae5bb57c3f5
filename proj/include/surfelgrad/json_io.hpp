#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "surfelgrad/camera.hpp"
#include "surfelgrad/grad.hpp"
#include "surfelgrad/polycube.hpp"
#include "surfelgrad/recon.hpp"
#include "surfelgrad/scene.hpp"
#include "surfelgrad/shading.hpp"

namespace surfelgrad {

using Json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become ParseError carrying
/// "<source>:<line>:<column>".
Json parse_json(std::string_view text, std::string_view source = "<input>");

// Vectors and quaternions are arrays: [x, y, z] and [w, x, y, z].
Json to_json(const Vec3& v);
Json to_json(const Quat& q);
Json to_json(const Camera& camera);
Json to_json(const PointLight& light);
Json to_json(const LightingRig& rig);
Json to_json(const Material& material);  // albedo maps are not serialized
Json to_json(const Primitive& primitive);
Json to_json(const Room& room);
Json to_json(const SceneSpec& scene);
Json to_json(const PoseConfig& config);
Json to_json(const SceneConfig& config);
Json to_json(const ReconConfig& config);
Json to_json(const IqttConfig& config);
Json to_json(const IqttProvenance& provenance);
Json to_json(const GradcheckConfig& config);
Json to_json(const GradcheckReport& report);

// Readers throw ParseError on wrong types or unknown keys and InvalidParam on
// values that fail validation. Missing keys keep their defaults except where
// a value has none (vectors inside lights, primitives, cameras).
Vec3 vec3_from_json(const Json& j);
Quat quat_from_json(const Json& j);
Camera camera_from_json(const Json& j);
LightingRig lighting_from_json(const Json& j);
Material material_from_json(const Json& j);
Primitive primitive_from_json(const Json& j);
SceneSpec scene_from_json(const Json& j);
SceneConfig scene_config_from_json(const Json& j);
ReconConfig recon_config_from_json(const Json& j);
IqttConfig iqtt_config_from_json(const Json& j);
GradcheckConfig gradcheck_config_from_json(const Json& j);

/// Canonical text form used for every file the tools write: two-space
/// indentation and a trailing newline.
std::string dump(const Json& j);

}  // namespace surfelgrad
