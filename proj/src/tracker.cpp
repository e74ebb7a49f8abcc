#include "proviq/tracker.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "proviq/errors.hpp"

namespace proviq {

Box MotionState::box() const {
  const double h = mean(3);
  const double w = mean(2) * h;
  return Box{mean(0) - w / 2, mean(1) - h / 2, mean(0) + w / 2, mean(1) + h / 2};
}

BoxKalmanFilter::Measurement BoxKalmanFilter::to_measurement(const Box& box) {
  Measurement z;
  z << box.cx(), box.cy(), box.width() / box.height(), box.height();
  return z;
}

MotionState BoxKalmanFilter::initiate(const Box& box) const {
  MotionState s;
  const Measurement z = to_measurement(box);
  s.mean.head<4>() = z;
  s.mean.tail<4>().setZero();
  const double h = z(3);
  const double wp = params_.std_weight_position;
  const double wv = params_.std_weight_velocity;
  MotionState::Vector std;
  std << 2 * wp * h, 2 * wp * h, 1e-2, 2 * wp * h, 10 * wv * h, 10 * wv * h, 1e-5, 10 * wv * h;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

void BoxKalmanFilter::predict(MotionState& s) const {
  const double h = s.mean(3);
  const double wp = params_.std_weight_position;
  const double wv = params_.std_weight_velocity;
  MotionState::Vector std;
  std << wp * h, wp * h, 1e-2, wp * h, wv * h, wv * h, 1e-5, wv * h;
  MotionState::Matrix motion = MotionState::Matrix::Identity();
  motion.topRightCorner<4, 4>().setIdentity();
  s.mean = motion * s.mean;
  s.covariance = motion * s.covariance * motion.transpose();
  s.covariance.diagonal() += std.array().square().matrix();
}

void BoxKalmanFilter::update(MotionState& s, const Box& box) const {
  const Measurement z = to_measurement(box);
  const double h = s.mean(3);
  const double wp = params_.std_weight_position;
  Measurement std;
  std << wp * h, wp * h, 1e-1, wp * h;
  Eigen::Matrix<double, 4, 8> project = Eigen::Matrix<double, 4, 8>::Zero();
  project.leftCols<4>().setIdentity();

  const Eigen::Matrix4d innovation_cov =
      project * s.covariance * project.transpose() +
      Eigen::Matrix4d(std.array().square().matrix().asDiagonal());
  const Eigen::Matrix<double, 8, 4> pht = s.covariance * project.transpose();
  // gain = P H^T S^-1, solved through S = L L^T.
  const Eigen::Matrix<double, 8, 4> gain =
      innovation_cov.llt().solve(pht.transpose()).transpose();
  s.mean += gain * (z - project * s.mean);
  s.covariance -= gain * innovation_cov * gain.transpose();
}

// ---------------------------------------------------------------------------

Assignment assign(const Eigen::MatrixXd& cost, double gate) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  Assignment out;
  if (rows == 0 || cols == 0) {
    for (int r = 0; r < rows; ++r) out.unmatched_rows.push_back(r);
    for (int c = 0; c < cols; ++c) out.unmatched_cols.push_back(c);
    return out;
  }

  // Forbidden and padding cells share one cost larger than any permitted total, so the
  // optimum first maximizes the number of permitted pairs, then minimizes their cost.
  double permitted_sum = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (cost(r, c) <= gate) permitted_sum += std::abs(cost(r, c));
    }
  }
  const double big = 2 * permitted_sum + 1;
  const int n = std::max(rows, cols);
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, big);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (cost(r, c) <= gate) a(r, c) = cost(r, c);
    }
  }

  // Shortest augmenting path Hungarian method with potentials, 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int r = p[j] - 1;
    const int c = j - 1;
    if (r < rows && c < cols && cost(r, c) <= gate) row_to_col[r] = c;
  }
  std::vector<char> col_used(cols, 0);
  for (int r = 0; r < rows; ++r) {
    if (row_to_col[r] >= 0) {
      out.matches.emplace_back(r, row_to_col[r]);
      col_used[row_to_col[r]] = 1;
    } else {
      out.unmatched_rows.push_back(r);
    }
  }
  for (int c = 0; c < cols; ++c) {
    if (!col_used[c]) out.unmatched_cols.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(TrackStatus status) noexcept {
  switch (status) {
    case TrackStatus::Tentative: return "tentative";
    case TrackStatus::Active: return "active";
    case TrackStatus::Lost: return "lost";
    case TrackStatus::Removed: return "removed";
  }
  return "?";
}

namespace {

class Tracker {
 public:
  explicit Tracker(const TrackerParams& params) : params_(params), kf_(params.kalman) {}

  void step(const std::vector<Detection>& dets) {
    for (auto& t : tracks_) {
      if (t.status == TrackStatus::Removed) continue;
      if (t.status == TrackStatus::Lost) t.state.mean(7) = 0;  // freeze height rate while unobserved
      kf_.predict(t.state);
    }

    std::vector<std::size_t> high, low;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (dets[i].score >= params_.high_threshold) {
        high.push_back(i);
      } else if (dets[i].score >= params_.low_threshold) {
        low.push_back(i);
      }
    }

    std::vector<std::size_t> confirmed, tentative;
    for (std::size_t k = 0; k < tracks_.size(); ++k) {
      const auto st = tracks_[k].status;
      if (st == TrackStatus::Active || st == TrackStatus::Lost) confirmed.push_back(k);
      if (st == TrackStatus::Tentative) tentative.push_back(k);
    }

    // Stage 1: confirmed tracks against high-score detections.
    auto [unmatched_tracks, unmatched_high] = associate(confirmed, high, dets, [&](Track& t, std::size_t d) {
      observe(t, dets, d);
      t.status = TrackStatus::Active;
    });

    // Stage 2: still-active tracks against low-score detections.
    std::vector<std::size_t> leftover;
    if (params_.second_stage) {
      std::vector<std::size_t> active;
      for (auto k : unmatched_tracks) {
        if (tracks_[k].status == TrackStatus::Active) {
          active.push_back(k);
        } else {
          leftover.push_back(k);
        }
      }
      auto [still_unmatched, unused_low] = associate(active, low, dets, [&](Track& t, std::size_t d) {
        observe(t, dets, d);
      });
      leftover.insert(leftover.end(), still_unmatched.begin(), still_unmatched.end());
    } else {
      leftover = unmatched_tracks;
    }
    for (auto k : leftover) {
      auto& t = tracks_[k];
      t.status = TrackStatus::Lost;
      if (++t.frames_since_update >= params_.max_age) t.status = TrackStatus::Removed;
    }

    // Stage 3: tentative tracks against the remaining high-score detections.
    auto [dead, fresh] = associate(tentative, unmatched_high, dets, [&](Track& t, std::size_t d) {
      observe(t, dets, d);
      if (t.hits >= params_.min_hits) activate(t);
    });
    for (auto k : dead) tracks_[k].status = TrackStatus::Removed;

    for (auto d : fresh) {
      Track t;
      t.state = kf_.initiate(dets[d].box);
      t.points.push_back({dets[d].frame, dets[d].box, dets[d].score, d});
      t.hits = 1;
      if (params_.min_hits <= 1) activate(t);
      tracks_.push_back(std::move(t));
    }
  }

  std::vector<Track> finish() const {
    std::vector<Track> out;
    for (const auto& t : tracks_) {
      if (t.track_id > 0 && t.points.size() >= params_.min_track_len) out.push_back(t);
    }
    std::sort(out.begin(), out.end(), [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
    return out;
  }

 private:
  template <typename OnMatch>
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> associate(
      const std::vector<std::size_t>& track_ids, const std::vector<std::size_t>& det_ids,
      const std::vector<Detection>& dets, OnMatch on_match) {
    Eigen::MatrixXd cost(track_ids.size(), det_ids.size());
    for (std::size_t r = 0; r < track_ids.size(); ++r) {
      const Box predicted = tracks_[track_ids[r]].state.box();
      for (std::size_t c = 0; c < det_ids.size(); ++c) {
        cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            1.0 - iou(predicted, dets[det_ids[c]].box);
      }
    }
    const auto result = assign(cost, 1.0 - params_.match_gate);
    for (const auto& [r, c] : result.matches) on_match(tracks_[track_ids[r]], det_ids[c]);
    std::vector<std::size_t> rows, cols;
    for (int r : result.unmatched_rows) rows.push_back(track_ids[r]);
    for (int c : result.unmatched_cols) cols.push_back(det_ids[c]);
    return {rows, cols};
  }

  void observe(Track& t, const std::vector<Detection>& dets, std::size_t d) {
    kf_.update(t.state, dets[d].box);
    t.points.push_back({dets[d].frame, dets[d].box, dets[d].score, d});
    t.frames_since_update = 0;
    ++t.hits;
  }

  void activate(Track& t) {
    t.status = TrackStatus::Active;
    t.track_id = next_id_++;
  }

  const TrackerParams& params_;
  BoxKalmanFilter kf_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
};

}  // namespace

std::vector<Track> track_objects(const std::vector<std::vector<Detection>>& per_frame,
                                 const TrackerParams& params) {
  Tracker tracker(params);
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  for (const auto& frame : per_frame) {
    for (const auto& d : frame) {
      if (!is_valid(d.box)) throw InvalidArgument("track_objects: invalid detection box");
    }
    if (!frame.empty()) {
      const auto f = frame.front().frame;
      for (const auto& d : frame) {
        if (d.frame != f) throw InvalidArgument("track_objects: mixed frame indices in one frame list");
      }
      if (f <= last) throw InvalidArgument("track_objects: frames must be strictly increasing");
      last = f;
    }
    tracker.step(frame);
  }
  return tracker.finish();
}

std::string export_tracks_jsonl(const std::vector<Track>& tracks) {
  std::ostringstream os;
  for (const auto& t : tracks) {
    for (const auto& p : t.points) {
      nlohmann::json line{{"track_id", t.track_id},
                          {"frame", p.frame},
                          {"box", {p.box.x1, p.box.y1, p.box.x2, p.box.y2}},
                          {"score", p.score}};
      os << line.dump() << '\n';
    }
  }
  return os.str();
}

}  // namespace proviq
