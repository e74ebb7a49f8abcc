#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "proviq/geometry.hpp"

namespace proviq {

struct Detection {
  std::int64_t frame = 0;
  Box box;
  double score = 0;
};

/// Constant-velocity state over (center x, center y, aspect w/h, height) and their rates.
struct MotionState {
  using Vector = Eigen::Matrix<double, 8, 1>;
  using Matrix = Eigen::Matrix<double, 8, 8>;

  Vector mean = Vector::Zero();
  Matrix covariance = Matrix::Identity();

  double cx() const { return mean(0); }
  double cy() const { return mean(1); }
  double aspect() const { return mean(2); }
  double height() const { return mean(3); }
  Box box() const;
};

/// Standard deviations scale with box height; weights follow the usual xyah Kalman setup.
struct KalmanParams {
  double std_weight_position = 1.0 / 20;
  double std_weight_velocity = 1.0 / 160;
};

/// Kalman filter on box measurements (cx, cy, a, h).
class BoxKalmanFilter {
 public:
  using Measurement = Eigen::Matrix<double, 4, 1>;

  explicit BoxKalmanFilter(KalmanParams params = {}) : params_(params) {}

  static Measurement to_measurement(const Box& box);

  MotionState initiate(const Box& box) const;
  void predict(MotionState& state) const;
  void update(MotionState& state, const Box& box) const;

 private:
  KalmanParams params_;
};

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (row, col), sorted by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Optimal one-to-one assignment. Entries above `gate` are forbidden. Among all matchings
/// over permitted pairs, returns one of maximum size and, among those, minimum total cost.
Assignment assign(const Eigen::MatrixXd& cost, double gate);

enum class TrackStatus { Tentative, Active, Lost, Removed };
const char* to_string(TrackStatus status) noexcept;

struct TrackPoint {
  std::int64_t frame = 0;
  Box box;
  double score = 0;
  std::size_t detection = 0;  // position in that frame's detection list
};

struct Track {
  int track_id = 0;  // assigned on activation, from 1
  std::vector<TrackPoint> points;
  MotionState state;
  TrackStatus status = TrackStatus::Tentative;
  int frames_since_update = 0;
  int hits = 0;
};

struct TrackerParams {
  double high_threshold = 0.6;
  double low_threshold = 0.1;
  double match_gate = 0.2;  // minimum IoU for an association
  int max_age = 30;
  int min_hits = 3;
  std::size_t min_track_len = 5;
  bool second_stage = true;
  KalmanParams kalman;
};

/// Two-stage tracking-by-association. `per_frame[i]` holds the detections of the i-th
/// presented frame; frames must be strictly increasing.
std::vector<Track> track_objects(const std::vector<std::vector<Detection>>& per_frame,
                                 const TrackerParams& params = {});

/// One JSON line per (track_id, frame, box, score).
std::string export_tracks_jsonl(const std::vector<Track>& tracks);

}  // namespace proviq
