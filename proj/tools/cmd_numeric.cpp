#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <thread>

#include "commands.hpp"
#include "surfelgrad/error.hpp"
#include "surfelgrad/grad.hpp"
#include "surfelgrad/metrics.hpp"
#include "surfelgrad/parallel.hpp"
#include "surfelgrad/recon.hpp"
#include "surfelgrad/rng.hpp"
#include "surfelgrad/scene.hpp"

namespace cli {

using namespace surfelgrad;

namespace {

bool has_extension(const std::string& path, const char* ext) {
  std::string e = fs::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e == ext;
}

Image load_image(const std::string& path) {
  if (has_extension(path, ".pfm")) return read_pfm_rgb(path);
  if (has_extension(path, ".png")) return from_srgb8(read_png(path));
  throw Error(ErrorCode::InvalidParam, "unsupported image type: " + path + " (expected .png or .pfm)");
}

Json ms_summary(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const auto at = [&](double q) {
    const std::size_t i = std::min(samples.size() - 1, static_cast<std::size_t>(q * (samples.size() - 1) + 0.5));
    return samples[i] * 1e3;
  };
  Json j = Json::object();
  j["median"] = at(0.5);
  j["p95"] = at(0.95);
  return j;
}

template <class F>
std::vector<double> time_runs(int iters, F&& body) {
  for (int i = 0; i < std::min(iters, 3); ++i) body();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(iters));
  for (int i = 0; i < iters; ++i) {
    const auto start = std::chrono::steady_clock::now();
    body();
    out.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return out;
}

// Side-by-side preview: target | rendered | depth | normals.
Grid<Rgb8> side_by_side(const Image& target, const Image& rendered, const DepthMap& depth, const NormalGrid& normals) {
  const Resolution res = target.resolution();
  const std::array<Grid<Rgb8>, 4> panels{to_srgb8(target), to_srgb8(rendered), depth_to_rgb8(depth),
                                         normals_to_rgb8(normals)};
  Grid<Rgb8> out({res.rows, 4 * res.cols});
  for (int p = 0; p < 4; ++p)
    for (int r = 0; r < res.rows; ++r)
      for (int c = 0; c < res.cols; ++c) out(r, p * res.cols + c) = panels[p](r, c);
  return out;
}

Json metrics_json(const ReconMetrics& m) {
  Json j = Json::object();
  j["mse_depth"] = m.mse_depth;
  j["chamfer"] = m.chamfer;
  j["hausdorff"] = m.hausdorff;
  return j;
}

Mask positive(const DepthMap& d) {
  Mask m(d.resolution(), 0);
  for (std::size_t i = 0; i < d.size(); ++i) m[i] = d[i] > 0.0;
  return m;
}

PointSet depth_points(const DepthMap& depth, const Camera& camera) {
  if (depth.resolution() != camera.resolution())
    throw Error(ErrorCode::ResolutionMismatch, "depth map size does not match the camera resolution");
  // Zero depth marks missing pixels; lift a placeholder and mask it out.
  const Mask valid = positive(depth);
  DepthMap filled = depth;
  for (std::size_t i = 0; i < filled.size(); ++i)
    if (!valid[i]) filled[i] = 1.0;
  return surfels_to_pointset(backproject(filled, camera), &valid);
}

}  // namespace

int run_gradcheck(const GlobalOptions& global, const GradcheckOptions& options) {
  Manifest manifest("gradcheck", global);
  GradcheckConfig config = gradcheck_config_from_json(load_config(global));
  config.seed = global.seed;
  if (options.trials >= 0) config.trials = options.trials;
  if (options.min_size >= 0) config.min_size = options.min_size;
  if (options.max_size >= 0) config.max_size = options.max_size;
  if (options.tolerance >= 0.0) config.tolerance = options.tolerance;
  if (options.specular) config.specular = true;
  manifest.config(to_json(config));

  const GradcheckReport report = manifest.stage("gradcheck", [&] { return run_gradcheck(config); });
  const std::string text = dump(to_json(report));
  write_text(manifest, global.out, "gradcheck.json", text);
  manifest.set("pass", report.pass);
  manifest.write();
  std::cout << text;
  return report.pass ? 0 : kExitCheckFailed;
}

int run_bench(const GlobalOptions& global, const BenchOptions& options) {
  if (options.iters < 1) throw Error(ErrorCode::InvalidParam, "iters must be at least 1");
  if (options.sizes.empty()) throw Error(ErrorCode::InvalidParam, "need at least one size");
  Manifest manifest("bench", global);
  const int multi = global.threads > 0 ? global.threads : std::max(1u, std::thread::hardware_concurrency());
  Json echo = Json::object();
  echo["sizes"] = options.sizes;
  echo["iters"] = options.iters;
  manifest.config(echo);

  Json out = Json::object();
  out["build_profile"] = SURFELGRAD_BUILD_PROFILE;
  out["hardware_threads"] = std::thread::hardware_concurrency();
  out["iters"] = options.iters;
  out["results"] = Json::array();

  Rng rng(global.seed);
  for (int size : options.sizes) {
    if (size < 2) throw Error(ErrorCode::InvalidParam, "sizes must be at least 2");
    const Camera camera = Camera::make({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 20.0, 24.0, {size, size});
    DepthMap depth(camera.resolution());
    for (double& v : depth.values()) v = rng.uniform(1.0, 3.0);
    Material material;
    material.albedo = {0.8, 0.6, 0.4};
    LightingRig rig;
    rig.ambient = {0.05, 0.05, 0.05};
    rig.lights.push_back(PointLight{{0.5, 1.0, 1.0}, {1, 1, 1}, 0.0, 0.25});
    const Image target(camera.resolution(), Rgb{0.3, 0.3, 0.3});

    for (int threads : {1, multi}) {
      set_thread_count(threads);
      Json row = Json::object();
      row["rows"] = size;
      row["cols"] = size;
      row["threads"] = threads;
      manifest.stage("bench", [&] {
        row["forward_ms"] = ms_summary(time_runs(options.iters, [&] { (void)render(depth, camera, material, rig); }));
        row["forward_backward_ms"] = ms_summary(time_runs(options.iters, [&] {
          const Image rendered = render(depth, camera, material, rig);
          (void)render_backward(depth, camera, material, rig, image_loss_and_grad(rendered, target).grad);
        }));
      });
      out["results"].push_back(row);
      if (multi == 1) break;
    }
  }
  set_thread_count(global.threads);
  const std::string text = dump(out);
  write_text(manifest, global.out, "bench.json", text);
  manifest.write();
  std::cout << text;
  return 0;
}

int run_reconstruct(const GlobalOptions& global, const ReconstructOptions& options) {
  Manifest manifest("reconstruct", global);
  manifest.input("target", options.target);
  manifest.input("scene", options.scene);
  const SceneSpec scene = scene_from_json(load_json_file(options.scene));
  const Json config_json = load_config(global);
  ReconConfig config = recon_config_from_json(config_json);
  // Unset bounds follow the scene: start at the distance to the room center
  // and allow depths up to twice the room diagonal.
  if (!config_json.contains("init_depth")) config.init_depth = norm(scene.camera.position() - scene.room.center());
  if (!config_json.contains("depth_max")) config.depth_max = 2.0 * scene.room.diagonal();
  if (options.max_iters >= 0) config.max_iters = options.max_iters;
  validate(config);
  manifest.config(to_json(config));

  const Image target = load_image(options.target);
  if (target.resolution() != scene.camera.resolution())
    throw Error(ErrorCode::ResolutionMismatch, "target image size does not match the scene camera");
  std::optional<DepthMap> truth;
  if (!options.truth.empty()) {
    manifest.input("truth", options.truth);
    truth = read_pfm_gray(options.truth);
  }

  const ReconReport report = manifest.stage("optimize", [&] {
    return reconstruct_depth(target, scene.camera, scene.material, scene.lights, config, truth ? &*truth : nullptr);
  });

  const Image rendered = render(report.depth, scene.camera, scene.material, scene.lights);
  const NormalGrid normals = estimate_normals(backproject(report.depth, scene.camera)).normals;
  std::string csv = "iteration,data,smoothness,total\n";
  char line[160];
  for (std::size_t i = 0; i < report.trace.size(); ++i) {
    const LossTerms& t = report.trace[i];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", i, t.data, t.smoothness, t.total());
    csv += line;
  }

  Json summary = Json::object();
  summary["iterations"] = report.trace.size();
  summary["best_iteration"] = report.best_iteration;
  const LossTerms& best = report.trace.at(static_cast<std::size_t>(report.best_iteration));
  summary["data_loss"] = best.data;
  summary["smoothness_loss"] = best.smoothness;
  if (report.metrics) summary["metrics"] = metrics_json(*report.metrics);
  if (report.baseline) summary["baseline"] = metrics_json(*report.baseline);

  manifest.stage("write", [&] {
    write_pfm(global.out / "depth.pfm", report.depth);
    manifest.output("depth.pfm");
    write_text(manifest, global.out, "loss.csv", csv);
    write_png(global.out / "side_by_side.png", side_by_side(target, rendered, report.depth, normals));
    manifest.output("side_by_side.png");
    write_text(manifest, global.out, "recon.json", dump(summary));
  });
  manifest.write();
  std::cout << dump(summary);
  return 0;
}

int run_metrics(const GlobalOptions& global, const MetricsOptions& options) {
  Manifest manifest("metrics", global);
  manifest.input("a", options.a);
  manifest.input("b", options.b);
  if (options.hausdorff != "sym" && options.hausdorff != "F" && options.hausdorff != "R")
    throw Error(ErrorCode::InvalidParam, "hausdorff mode must be sym, F or R");
  Json echo = Json::object();
  echo["hausdorff"] = options.hausdorff;
  manifest.config(echo);

  PointSet a;
  PointSet b;
  Json mse = nullptr;
  const bool depth_input = has_extension(options.a, ".pfm");
  if (depth_input != has_extension(options.b, ".pfm"))
    throw Error(ErrorCode::InvalidParam, "compare two depth maps or two point files");
  if (depth_input) {
    if (options.camera.empty()) throw Error(ErrorCode::InvalidParam, "depth maps need --camera");
    manifest.input("camera", options.camera);
    const Json cj = load_json_file(options.camera);
    const Camera camera = camera_from_json(cj.contains("camera") ? cj.at("camera") : cj);
    const DepthMap da = read_pfm_gray(options.a);
    const DepthMap db = read_pfm_gray(options.b);
    if (da.resolution() != db.resolution()) throw Error(ErrorCode::ResolutionMismatch, "depth maps differ in size");
    Mask both = positive(da);
    const Mask vb = positive(db);
    for (std::size_t i = 0; i < both.size(); ++i) both[i] = both[i] && vb[i];
    mse = mse_depth(da, db, &both);
    a = depth_points(da, camera);
    b = depth_points(db, camera);
  } else {
    a = read_points(options.a);
    b = read_points(options.b);
  }

  Json out = Json::object();
  manifest.stage("metrics", [&] {
    out["chamfer"] = chamfer(a, b);
    if (options.hausdorff == "F")
      out["hausdorff"] = hausdorff_directed(a, b);
    else if (options.hausdorff == "R")
      out["hausdorff"] = hausdorff_directed(b, a);
    else
      out["hausdorff"] = hausdorff(a, b);
  });
  out["mse"] = mse;
  out["hausdorff_mode"] = options.hausdorff;
  const std::string text = dump(out);
  write_text(manifest, global.out, "metrics.json", text);
  manifest.write();
  std::cout << text;
  return 0;
}

}  // namespace cli
