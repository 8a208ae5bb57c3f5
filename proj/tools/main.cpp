#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "commands.hpp"
#include "surfelgrad/error.hpp"
#include "surfelgrad/parallel.hpp"

namespace {

using surfelgrad::ErrorCode;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 1;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Diverged:
    case ErrorCode::NonFiniteOutput:
      return kExitNumeric;
    case ErrorCode::IoError:
      return kExitIo;
    case ErrorCode::InternalError:
      return kExitInternal;
    default:
      return kExitConfig;
  }
}

int report(std::string_view kind, std::string_view message, int code) {
  surfelgrad::Json line = surfelgrad::Json::object();
  line["error"] = kind;
  line["message"] = message;
  line["exit"] = code;
  std::cerr << line.dump() << std::endl;
  return code;
}

void apply_seed_override(cli::GlobalOptions& options) {
  const char* env = std::getenv("SURFELGRAD_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || *env == '-')
    throw surfelgrad::Error(ErrorCode::InvalidParam, std::string("SURFELGRAD_SEED is not an unsigned integer: ") + env);
  options.seed = v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"surfelgrad: surfel rendering, gradients, reconstruction and dataset tools"};
  app.set_version_flag("--version", std::string(SURFELGRAD_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  cli::GlobalOptions global;
  app.add_option("--seed", global.seed, "Random seed (SURFELGRAD_SEED overrides)");
  app.add_option("--threads", global.threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--out", global.out, "Output directory");
  app.add_option("--config", global.config, "JSON config file");

  cli::GenScenesOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-scenes", "Sample scenes and write RGB, depth and normal maps");
  gen_cmd->add_option("--count", gen.count, "Number of scenes");

  cli::RenderOptions render;
  auto* render_cmd = app.add_subcommand("render", "Render a scene JSON to rgb.png, depth.pfm, normals.pfm");
  render_cmd->add_option("scene", render.scene, "Scene JSON")->required();
  render_cmd->add_option("--camera", render.camera, "Camera JSON replacing the scene camera");

  cli::GenIqttOptions iqtt;
  auto* iqtt_cmd = app.add_subcommand("gen-iqtt", "Generate mental-rotation questions");
  iqtt_cmd->add_option("--count", iqtt.count, "Number of questions");

  cli::GradcheckOptions gradcheck;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  grad_cmd->add_option("--trials", gradcheck.trials, "Number of random depth maps");
  grad_cmd->add_option("--min-size", gradcheck.min_size, "Smallest map side");
  grad_cmd->add_option("--max-size", gradcheck.max_size, "Largest map side");
  grad_cmd->add_option("--tolerance", gradcheck.tolerance, "Maximum relative error");
  grad_cmd->add_flag("--specular", gradcheck.specular, "Include a Phong highlight");

  cli::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time forward and backward passes");
  bench_cmd->add_option("--sizes", bench.sizes, "Square resolutions")->delimiter(',');
  bench_cmd->add_option("--iters", bench.iters, "Timed repetitions per case");

  cli::ReconstructOptions recon;
  auto* recon_cmd = app.add_subcommand("reconstruct", "Recover depth from an image by gradient descent");
  recon_cmd->add_option("--target", recon.target, "Target image (.png or .pfm)")->required();
  recon_cmd->add_option("--scene", recon.scene, "Scene JSON with camera, lights and material")->required();
  recon_cmd->add_option("--truth", recon.truth, "Ground-truth depth PFM for metrics");
  recon_cmd->add_option("--max-iters", recon.max_iters, "Iteration cap");

  cli::MetricsOptions metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Chamfer, Hausdorff and depth MSE between two inputs");
  metrics_cmd->add_option("a", metrics.a, "Depth PFM or point file")->required();
  metrics_cmd->add_option("b", metrics.b, "Depth PFM or point file")->required();
  metrics_cmd->add_option("--camera", metrics.camera, "Camera (or scene) JSON for depth maps");
  metrics_cmd->add_option("--hausdorff", metrics.hausdorff, "sym, F (a to b) or R (b to a)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report("UsageError", e.what(), kExitConfig);
  }

  try {
    apply_seed_override(global);
    surfelgrad::set_thread_count(global.threads);
    std::filesystem::create_directories(global.out);
    if (*gen_cmd) return cli::run_gen_scenes(global, gen);
    if (*render_cmd) return cli::run_render(global, render);
    if (*iqtt_cmd) return cli::run_gen_iqtt(global, iqtt);
    if (*grad_cmd) return cli::run_gradcheck(global, gradcheck);
    if (*bench_cmd) return cli::run_bench(global, bench);
    if (*recon_cmd) return cli::run_reconstruct(global, recon);
    if (*metrics_cmd) return cli::run_metrics(global, metrics);
    return report("UsageError", "no subcommand", kExitConfig);
  } catch (const surfelgrad::Error& e) {
    std::string_view message = e.what();
    const std::string_view kind = surfelgrad::to_string(e.code());
    if (message.starts_with(kind) && message.substr(kind.size()).starts_with(": ")) message.remove_prefix(kind.size() + 2);
    return report(kind, message, exit_code(e.code()));
  } catch (const std::filesystem::filesystem_error& e) {
    return report("IoError", e.what(), kExitIo);
  } catch (const nlohmann::json::exception& e) {
    return report("ParseError", e.what(), kExitConfig);
  } catch (const std::exception& e) {
    return report("InternalError", e.what(), kExitInternal);
  }
}
