#include "common.hpp"

#include <cstdio>

namespace cli {

Json load_json_file(const fs::path& path) {
  return surfelgrad::parse_json(surfelgrad::read_text_file(path), path.generic_string());
}

Json load_config(const GlobalOptions& options) {
  if (options.config.empty()) return Json::object();
  return load_json_file(options.config);
}

Manifest::Manifest(std::string command, const GlobalOptions& options) : out_(options.out) {
  json_["tool"] = "surfelgrad";
  json_["version"] = SURFELGRAD_VERSION;
  json_["command"] = std::move(command);
  json_["seed"] = options.seed;
  json_["config"] = Json::object();
  json_["inputs"] = Json::object();
  if (!options.config.empty()) json_["inputs"]["config"] = options.config;
  json_["outputs"] = Json::array();
}

void Manifest::add_time(const std::string& name, double seconds) {
  times_[name] = times_.value(name, 0.0) + seconds;
}

void Manifest::write() const {
  Json j = json_;
  j["wall_times"] = times_;
  surfelgrad::write_text_file(out_ / "manifest.json", surfelgrad::dump(j));
}

void write_text(Manifest& manifest, const fs::path& out, const std::string& name, const std::string& text) {
  surfelgrad::write_text_file(out / name, text);
  manifest.output(name);
}

std::string numbered(const char* pattern, long long n) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, n);
  return buf;
}

}  // namespace cli
