#pragma once

#include <algorithm>
#include <cmath>

namespace proviq {

/// Axis-aligned box, corners (x1, y1) top-left and (x2, y2) bottom-right.
/// Coordinates are normalized to [0, 1] everywhere inside the engine.
struct Box {
  double x1 = 0;
  double y1 = 0;
  double x2 = 0;
  double y2 = 0;

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  double area() const noexcept { return std::max(0.0, width()) * std::max(0.0, height()); }
  double cx() const noexcept { return 0.5 * (x1 + x2); }
  double cy() const noexcept { return 0.5 * (y1 + y2); }

  friend bool operator==(const Box&, const Box&) = default;
};

inline bool is_valid(const Box& b) noexcept { return b.x1 < b.x2 && b.y1 < b.y2; }

inline bool is_normalized(const Box& b) noexcept {
  return b.x1 >= 0 && b.y1 >= 0 && b.x2 <= 1 && b.y2 <= 1;
}

inline bool nearly_equal(const Box& a, const Box& b, double tol = 1e-6) noexcept {
  return std::abs(a.x1 - b.x1) <= tol && std::abs(a.y1 - b.y1) <= tol &&
         std::abs(a.x2 - b.x2) <= tol && std::abs(a.y2 - b.y2) <= tol;
}

/// Intersection over union; 0 when either box is degenerate.
inline double iou(const Box& a, const Box& b) noexcept {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

struct ScoredBox {
  Box box;
  double score = 0;
  friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

}  // namespace proviq
