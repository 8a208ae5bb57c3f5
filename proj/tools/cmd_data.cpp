#include <iostream>

#include "commands.hpp"
#include "surfelgrad/error.hpp"
#include "surfelgrad/polycube.hpp"
#include "surfelgrad/rng.hpp"
#include "surfelgrad/scene.hpp"
#include "surfelgrad/shading.hpp"
#include "surfelgrad/surfel.hpp"

namespace cli {

using namespace surfelgrad;

namespace {

struct Rendered {
  DepthMap depth;
  NormalGrid normals;
  Image rgb;
};

Rendered render_scene(const SceneSpec& scene, const Camera& camera) {
  Rendered out;
  out.depth = trace_depth(scene, camera);
  out.normals = estimate_normals(backproject(out.depth, camera)).normals;
  out.rgb = render(out.depth, camera, scene.material, scene.lights);
  return out;
}

}  // namespace

int run_gen_scenes(const GlobalOptions& global, const GenScenesOptions& options) {
  if (options.count < 0) throw Error(ErrorCode::InvalidParam, "count must be non-negative");
  Manifest manifest("gen-scenes", global);
  const SceneConfig config = scene_config_from_json(load_config(global));
  Json echo = to_json(config);
  echo["count"] = options.count;
  manifest.config(echo);
  for (const char* pattern : {"scene_%06d.json", "rgb_%06d.png", "depth_%06d.pfm", "normals_%06d.pfm"})
    manifest.output(pattern);
  manifest.set("count", options.count);

  for (int i = 0; i < options.count; ++i) {
    const SceneSpec scene =
        manifest.stage("sample", [&] { return sample_scene(child_seed(global.seed, static_cast<std::uint64_t>(i)), config); });
    const Rendered r = manifest.stage("render", [&] { return render_scene(scene, scene.camera); });
    manifest.stage("write", [&] {
      write_text_file(global.out / numbered("scene_%06lld.json", i), dump(to_json(scene)));
      write_png(global.out / numbered("rgb_%06lld.png", i), to_srgb8(r.rgb));
      write_pfm(global.out / numbered("depth_%06lld.pfm", i), r.depth);
      write_pfm(global.out / numbered("normals_%06lld.pfm", i), r.normals);
    });
  }
  manifest.write();
  return 0;
}

int run_render(const GlobalOptions& global, const RenderOptions& options) {
  Manifest manifest("render", global);
  manifest.input("scene", options.scene);
  const SceneSpec scene = scene_from_json(load_json_file(options.scene));
  Camera camera = scene.camera;
  if (!options.camera.empty()) {
    manifest.input("camera", options.camera);
    camera = camera_from_json(load_json_file(options.camera));
  }
  Json echo = Json::object();
  echo["camera"] = to_json(camera);
  manifest.config(echo);

  const Rendered r = manifest.stage("render", [&] { return render_scene(scene, camera); });
  manifest.stage("write", [&] {
    write_png(global.out / "rgb.png", to_srgb8(r.rgb));
    write_pfm(global.out / "depth.pfm", r.depth);
    write_pfm(global.out / "normals.pfm", r.normals);
  });
  for (const char* name : {"rgb.png", "depth.pfm", "normals.pfm"}) manifest.output(name);
  manifest.write();
  return 0;
}

int run_gen_iqtt(const GlobalOptions& global, const GenIqttOptions& options) {
  if (options.count < 0) throw Error(ErrorCode::InvalidParam, "count must be non-negative");
  Manifest manifest("gen-iqtt", global);
  const IqttConfig config = iqtt_config_from_json(load_config(global));
  Json echo = to_json(config);
  echo["count"] = options.count;
  manifest.config(echo);
  for (const char* pattern : {"question_%06d/ref.png", "question_%06d/a0.png", "question_%06d/a1.png",
                              "question_%06d/a2.png", "labels.jsonl"})
    manifest.output(pattern);
  manifest.set("count", options.count);

  std::string labels;
  for (int i = 0; i < options.count; ++i) {
    Rng rng(child_seed(global.seed, static_cast<std::uint64_t>(i)));
    const IqttQuestion q = manifest.stage("generate", [&] { return gen_iqtt(rng, config); });
    const std::string id = numbered("question_%06lld", i);
    manifest.stage("write", [&] {
      const fs::path dir = global.out / id;
      fs::create_directories(dir);
      write_png(dir / "ref.png", to_srgb8(q.reference));
      for (int k = 0; k < 3; ++k) write_png(dir / numbered("a%lld.png", k), to_srgb8(q.candidates[k]));
    });
    Json line = Json::object();
    line["id"] = id;
    line["answer"] = q.answer_index;
    line["provenance"] = to_json(q.provenance);
    labels += line.dump() + "\n";
  }
  write_text_file(global.out / "labels.jsonl", labels);
  manifest.write();
  return 0;
}

}  // namespace cli
