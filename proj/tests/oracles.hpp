#pragma once

// Brute-force reference answers computed straight from raw world documents.

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace testsupport {

inline std::string oracle_lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Lowercase, drop surrounding blanks and any trailing run of . ! ? , ; : and blanks.
inline std::string oracle_vote_key(const std::string& raw) {
  std::string s = oracle_lower(raw);
  const std::string strip = " \t\n\r.!?,;:";
  std::size_t b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.size();
  while (e > b && strip.find(s[e - 1]) != std::string::npos) --e;
  return s.substr(b, e - b);
}

inline bool oracle_yes(const std::string& raw) { return oracle_vote_key(raw).rfind("yes", 0) == 0; }

/// Frames (of `indices`) whose answer to `question` is affirmative.
inline std::vector<std::int64_t> oracle_filter_property(const nlohmann::json& world, const std::string& question,
                                                        const std::vector<std::int64_t>& indices) {
  std::vector<std::int64_t> out;
  for (auto i : indices) {
    if (oracle_yes(world["frames"][static_cast<std::size_t>(i)]["qa"].at(question).get<std::string>())) out.push_back(i);
  }
  return out;
}

/// Frames (of `indices`) with at least one `object` detection scoring >= threshold.
inline std::vector<std::int64_t> oracle_filter_object(const nlohmann::json& world, const std::string& object,
                                                      const std::vector<std::int64_t>& indices,
                                                      double threshold = 0.35) {
  std::vector<std::int64_t> out;
  for (auto i : indices) {
    const auto& f = world["frames"][static_cast<std::size_t>(i)];
    if (!f.contains("objects") || !f["objects"].contains(object)) continue;
    for (const auto& d : f["objects"][object]) {
      if (d["score"].get<double>() >= threshold) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

/// Vote table in first-occurrence order.
inline std::vector<std::pair<std::string, std::int64_t>> oracle_votes(const std::vector<std::string>& answers) {
  std::vector<std::pair<std::string, std::int64_t>> out;
  for (const auto& a : answers) {
    const auto k = oracle_vote_key(a);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == k; });
    if (it == out.end()) {
      out.emplace_back(k, 1);
    } else {
      ++it->second;
    }
  }
  return out;
}

/// Highest count; the earliest key wins ties.
inline std::string oracle_argmax(const std::vector<std::pair<std::string, std::int64_t>>& votes) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < votes.size(); ++i) {
    if (votes[i].second > votes[best].second) best = i;
  }
  return votes.at(best).first;
}

}  // namespace testsupport
