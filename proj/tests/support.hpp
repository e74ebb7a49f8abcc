#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "proviq/gateway.hpp"
#include "proviq/mock_world.hpp"
#include "proviq/primitives.hpp"

namespace testsupport {

inline std::filesystem::path source_dir() { return PROVIQ_SOURCE_DIR; }
inline std::filesystem::path suite_dir() { return source_dir() / "data" / "mock_suite"; }
inline std::filesystem::path cli_path() { return PROVIQ_CLI; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("proviq_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline nlohmann::json jbox(double x1, double y1, double x2, double y2) { return {x1, y1, x2, y2}; }

/// Minimal valid world with `n` frames at 1 fps, captions "frame i".
inline nlohmann::json blank_world(const std::string& id, int n, const std::string& fps = "1") {
  nlohmann::json frames = nlohmann::json::array();
  for (int i = 0; i < n; ++i) frames.push_back({{"caption", "frame " + std::to_string(i)}});
  return {{"video_id", id}, {"fps", fps}, {"frame_count", n}, {"frames", frames}};
}

inline const std::vector<std::string>& property_questions() {
  static const std::vector<std::string> q = {"Is it daytime?", "Is a dog present?", "Is someone running?"};
  return q;
}
inline const std::vector<std::string>& object_names() {
  static const std::vector<std::string> o = {"dog", "car", "person"};
  return o;
}
inline const std::vector<std::string>& yes_no_forms() {
  static const std::vector<std::string> f = {"yes", "Yes.", "YES, clearly", "no", "No.", "nope", "yes!", "unsure"};
  return f;
}

inline nlohmann::json random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 0.8);
  std::uniform_real_distribution<double> s(0.05, 0.2);
  const double x = u(rng), y = u(rng);
  return jbox(x, y, x + s(rng), y + s(rng));
}

/// Random world over the fixed property questions (answered through free-form qa strings)
/// and object names (random boxes and scores).
inline nlohmann::json random_world(std::mt19937_64& rng, const std::string& id, int n) {
  std::uniform_int_distribution<int> form(0, static_cast<int>(yes_no_forms().size()) - 1);
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  const int fps_choice = std::uniform_int_distribution<int>(0, 2)(rng);
  const std::string fps = fps_choice == 0 ? "30" : fps_choice == 1 ? "30000/1001" : "12.5";
  nlohmann::json frames = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    nlohmann::json f = {{"caption", "frame " + std::to_string(i)}};
    for (const auto& q : property_questions()) f["qa"][q] = yes_no_forms()[form(rng)];
    nlohmann::json objects = nlohmann::json::object();
    for (const auto& o : object_names()) {
      nlohmann::json boxes = nlohmann::json::array();
      for (int k = count(rng); k > 0; --k) boxes.push_back({{"box", random_box(rng)}, {"score", score(rng)}});
      if (!boxes.empty()) objects[o] = boxes;
    }
    if (!objects.empty()) f["objects"] = objects;
    frames.push_back(f);
  }
  return {{"video_id", id}, {"fps", fps}, {"frame_count", n}, {"frames", frames}};
}

/// A mock backend, gateway and primitives over a set of worlds.
struct MockRig {
  explicit MockRig(const std::vector<nlohmann::json>& docs, proviq::PrimitiveConfig cfg = {},
                   std::size_t concurrency = 4)
      : gateway(proviq::GatewayOptions{concurrency}) {
    backend = std::make_shared<proviq::MockBackend>();
    for (const auto& d : docs) {
      auto w = std::make_shared<const proviq::MockWorld>(proviq::parse_mock_world(d));
      sources.push_back(w->source());
      backend->add_world(w);
    }
    gateway.add_backend(backend);
    prims = std::make_unique<proviq::Primitives>(gateway, cfg);
  }
  explicit MockRig(const nlohmann::json& doc, proviq::PrimitiveConfig cfg = {}, std::size_t concurrency = 4)
      : MockRig(std::vector<nlohmann::json>{doc}, cfg, concurrency) {}

  std::shared_ptr<proviq::MockBackend> backend;
  proviq::Gateway gateway;
  std::unique_ptr<proviq::Primitives> prims;
  std::vector<std::shared_ptr<const proviq::SourceVideo>> sources;
};

}  // namespace testsupport
