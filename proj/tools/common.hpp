#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include "surfelgrad/io.hpp"
#include "surfelgrad/json_io.hpp"

namespace cli {

namespace fs = std::filesystem;
using surfelgrad::Json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  fs::path out = ".";
  std::string config;
};

// Check failures that are not errors (gradcheck over tolerance).
constexpr int kExitCheckFailed = 1;

// Parsed --config file, or an empty object when none was given.
Json load_config(const GlobalOptions& options);
Json load_json_file(const fs::path& path);

// manifest.json: tool version, config echo, seed, paths and per-stage
// wall-times. Everything except "wall_times" is deterministic.
class Manifest {
 public:
  Manifest(std::string command, const GlobalOptions& options);

  void config(Json echo) { json_["config"] = std::move(echo); }
  void input(const std::string& name, const fs::path& path) { json_["inputs"][name] = path.generic_string(); }
  void output(const std::string& name) { json_["outputs"].push_back(name); }
  void set(const std::string& key, Json value) { json_[key] = std::move(value); }

  template <class F>
  auto stage(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      Manifest* self;
      std::string name;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        self->add_time(name, dt.count());
      }
    } record{this, name, start};
    return body();
  }

  void write() const;

 private:
  void add_time(const std::string& name, double seconds);

  fs::path out_;
  Json json_;
  Json times_ = Json::object();
};

// Writes into the output directory and records the relative name.
void write_text(Manifest& manifest, const fs::path& out, const std::string& name, const std::string& text);

std::string numbered(const char* pattern, long long n);

}  // namespace cli
