#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "proviq/clip.hpp"
#include "proviq/gateway.hpp"

namespace proviq {

struct CropQA {
  Box box;
  std::map<std::string, std::string> qa;  // canonical question -> answer
};

struct MockFrame {
  std::string caption;
  std::map<std::string, std::vector<ScoredBox>> objects;  // canonical object name -> boxes
  std::map<std::string, bool> predicates;                // canonical question -> truth
  std::map<std::string, std::string> qa;                 // canonical question -> answer
  std::vector<CropQA> crop_qa;
};

struct LlmRule {
  enum class Kind { Exact, Contains, PromptSha256 };
  Kind kind = Kind::Contains;
  std::string pattern;
  std::string response;
};

/// A fully tabulated stand-in for one video and every backend answer about it.
struct MockWorld {
  std::string video_id;
  Rational fps{30};
  std::int64_t frame_count = 0;
  std::optional<std::string> transcript;  // served through TRANSCRIBE
  std::vector<MockFrame> frames;
  std::vector<std::string> chunk_captions;  // consecutive 1-second chunks
  std::vector<LlmRule> llm;
  std::string fingerprint;

  std::shared_ptr<const SourceVideo> source() const;
};

/// Parses and validates a world document; throws SchemaError with a JSON-pointer path.
MockWorld parse_mock_world(const nlohmann::json& doc);
MockWorld load_mock_world(const std::filesystem::path& path);

enum class Corruption { WrongAnswer, DropDetection, GarbleCaption };
Corruption parse_corruption(std::string_view name);
const char* to_string(Corruption c) noexcept;

struct FaultSpec {
  Capability capability = Capability::ImageQA;
  Corruption corruption = Corruption::WrongAnswer;
  double rate = 0.0;                          // per-item probability when `frames` is empty
  std::set<std::int64_t> frames;              // explicit frames (chunk indices for chunk captions)
  std::uint64_t seed = 0;
};

/// Returns a derived world with seeded, deterministic corruptions. The input is not modified.
MockWorld inject_fault(const MockWorld& world, const FaultSpec& spec);

/// Answers every capability from tabulated worlds.
class MockBackend : public Backend {
 public:
  MockBackend() = default;
  explicit MockBackend(std::vector<std::shared_ptr<const MockWorld>> worlds);

  void add_world(std::shared_ptr<const MockWorld> world);
  bool supports(Capability cap) const override;
  CapabilityResponse call(const CapabilityRequest& request) override;
  std::string fingerprint() const override;

  const MockWorld& world(const std::string& video_id) const;

 private:
  std::map<std::string, std::shared_ptr<const MockWorld>> worlds_;
  std::vector<std::string> order_;
};

}  // namespace proviq
