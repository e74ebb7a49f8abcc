#include <Eigen/Eigenvalues>

#include <random>

#include "doctest.h"
#include "proviq/errors.hpp"
#include "proviq/tracker.hpp"
#include "scenes.hpp"

using namespace proviq;
using namespace testsupport;

TEST_CASE("assign matches exhaustive search up to 6x6") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 600; ++trial) {
    const int rows = static_cast<int>(rng() % 7), cols = static_cast<int>(rng() % 7);
    Eigen::MatrixXd cost(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) cost(r, c) = trial % 5 == 0 ? std::round(u(rng) * 3) / 3 : u(rng);
    }
    const double gate = 0.3 + 0.7 * u(rng);
    const auto got = assign(cost, gate);
    const auto best = brute_assign(cost, gate);

    std::set<int> rs, cs;
    double total = 0;
    for (const auto& [r, c] : got.matches) {
      CHECK(cost(r, c) <= gate);
      CHECK(rs.insert(r).second);
      CHECK(cs.insert(c).second);
      total += cost(r, c);
    }
    CHECK(static_cast<int>(got.matches.size()) == best.size);
    CHECK(total == doctest::Approx(best.cost).epsilon(1e-9));
    CHECK(got.matches.size() + got.unmatched_rows.size() == static_cast<std::size_t>(rows));
    CHECK(got.matches.size() + got.unmatched_cols.size() == static_cast<std::size_t>(cols));
    CHECK(std::is_sorted(got.matches.begin(), got.matches.end()));
  }
}

TEST_CASE("assign prefers more matches over cheaper ones") {
  Eigen::MatrixXd cost(2, 2);
  cost << 0.1, 0.5, 0.5, 2.0;  // (1,1) is gated out
  const auto a = assign(cost, 1.0);
  CHECK(a.matches == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
  const auto none = assign(Eigen::MatrixXd::Constant(3, 2, 5.0), 1.0);
  CHECK(none.matches.empty());
  CHECK(none.unmatched_rows.size() == 3);
  CHECK(assign(Eigen::MatrixXd(0, 4), 1.0).unmatched_cols.size() == 4);
}

TEST_CASE("kalman filter follows constant motion") {
  BoxKalmanFilter kf;
  Box b{0.1, 0.2, 0.2, 0.35};
  auto s = kf.initiate(b);
  CHECK(nearly_equal(s.box(), b, 1e-12));
  for (int i = 0; i < 20; ++i) {
    kf.predict(s);
    b = Box{b.x1 + 0.01, b.y1 + 0.005, b.x2 + 0.01, b.y2 + 0.005};
    kf.update(s, b);
  }
  kf.predict(s);
  const Box next{b.x1 + 0.01, b.y1 + 0.005, b.x2 + 0.01, b.y2 + 0.005};
  CHECK(iou(s.box(), next) > 0.95);
  CHECK(s.mean(4) == doctest::Approx(0.01).epsilon(0.05));
  CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<MotionState::Matrix> eig(s.covariance);
  CHECK(eig.eigenvalues().minCoeff() > 0);
}

TEST_CASE("scenes track without identity switches and recover low-score detections") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int objects = 2 + trial % 4;
    const auto scene = make_scene(rng, objects, 50, 0.2);
    const auto tracks = track_objects(scene.frames);
    const auto score = score_tracks(scene, tracks);
    CHECK(tracks.size() == static_cast<std::size_t>(objects));
    CHECK(score.id_switches == 0);
    CHECK(score.impure_tracks == 0);
    CHECK(score.covered == objects * 50);
    CHECK(score.low_covered == scene.low_detections);
  }
}

TEST_CASE("without the second stage low detections are lost") {
  std::mt19937_64 rng(78);
  const auto scene = make_scene(rng, 3, 50, 0.2);
  REQUIRE(scene.low_detections > 0);
  TrackerParams p;
  p.second_stage = false;
  const auto score = score_tracks(scene, track_objects(scene.frames, p));
  CHECK(score.low_covered == 0);
  CHECK(score.covered == 150 - scene.low_detections);
}

TEST_CASE("track ids are dense and points are time ordered") {
  std::mt19937_64 rng(79);
  const auto scene = make_scene(rng, 4, 30, 0.1);
  const auto tracks = track_objects(scene.frames);
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    CHECK(tracks[i].track_id == static_cast<int>(i) + 1);
    for (std::size_t k = 1; k < tracks[i].points.size(); ++k) {
      CHECK(tracks[i].points[k].frame > tracks[i].points[k - 1].frame);
    }
  }
  const auto jsonl = export_tracks_jsonl(tracks);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 120);
  CHECK(jsonl.rfind(R"({"box":)", 0) == 0);
}

TEST_CASE("short-lived and low-only objects produce no track") {
  std::vector<std::vector<Detection>> frames(20);
  for (int f = 0; f < 20; ++f) {
    if (f < 3) frames[f].push_back({f, Box{0.1, 0.1, 0.2, 0.2}, 0.9});  // too short
    frames[f].push_back({f, Box{0.6, 0.6, 0.7, 0.7}, 0.3});             // never high
  }
  CHECK(track_objects(frames).empty());
}

TEST_CASE("invalid input is rejected") {
  std::vector<std::vector<Detection>> frames = {{{2, Box{0.1, 0.1, 0.2, 0.2}, 0.9}},
                                                {{1, Box{0.1, 0.1, 0.2, 0.2}, 0.9}}};
  CHECK_THROWS_AS(track_objects(frames), InvalidArgument);
  frames = {{{0, Box{0.3, 0.1, 0.2, 0.2}, 0.9}}};
  CHECK_THROWS_AS(track_objects(frames), InvalidArgument);
  frames = {{{0, Box{0.1, 0.1, 0.2, 0.2}, 0.9}, {1, Box{0.1, 0.1, 0.2, 0.2}, 0.9}}};
  CHECK_THROWS_AS(track_objects(frames), InvalidArgument);
}
