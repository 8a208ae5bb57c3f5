#pragma once

#include <string>
#include <vector>

#include "common.hpp"

namespace cli {

struct GenScenesOptions {
  int count = 10;
};

struct RenderOptions {
  std::string scene;
  std::string camera;
};

struct GenIqttOptions {
  int count = 10;
};

struct GradcheckOptions {
  int trials = -1;
  int min_size = -1;
  int max_size = -1;
  double tolerance = -1.0;
  bool specular = false;
};

struct BenchOptions {
  std::vector<int> sizes{64, 128, 256};
  int iters = 50;
};

struct ReconstructOptions {
  std::string target;
  std::string scene;
  std::string truth;
  int max_iters = -1;
};

struct MetricsOptions {
  std::string a;
  std::string b;
  std::string camera;
  std::string hausdorff = "sym";
};

int run_gen_scenes(const GlobalOptions& global, const GenScenesOptions& options);
int run_render(const GlobalOptions& global, const RenderOptions& options);
int run_gen_iqtt(const GlobalOptions& global, const GenIqttOptions& options);
int run_gradcheck(const GlobalOptions& global, const GradcheckOptions& options);
int run_bench(const GlobalOptions& global, const BenchOptions& options);
int run_reconstruct(const GlobalOptions& global, const ReconstructOptions& options);
int run_metrics(const GlobalOptions& global, const MetricsOptions& options);

}  // namespace cli
