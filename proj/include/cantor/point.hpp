// Eventually periodic points of the binary Cantor set.
//
// A point is pre · per · per · per · ...  Canonical form: the period is
// primitive (not a power of a shorter word) and the preperiod is as short
// as possible (its last symbol never matches the last symbol of the
// period, after rotating the period accordingly).  Equality of canonical
// forms is therefore equality of points.

#pragma once

#include <string>

#include "cantor/core.hpp"

namespace cantor {

// Guard against unbounded growth when points are pushed through long
// compositions; generous for every workload in this library.
inline constexpr std::size_t kMaxPointBits = 1 << 20;

class Point {
 public:
  Point() : per_("0") {}  // 000...
  Point(std::string pre, std::string per);

  const std::string& pre() const { return pre_; }
  const std::string& per() const { return per_; }

  int bit(std::size_t i) const {  // 0-based
    if (i < pre_.size()) return pre_[i] - '0';
    return per_[(i - pre_.size()) % per_.size()] - '0';
  }

  // drop the first n bits
  Point shift(std::size_t n) const;

  // w · x
  Point prepend(const Word& w) const;

  bool starts_with(const Word& w) const;

  friend bool operator==(const Point& a, const Point& b) {
    return a.pre_ == b.pre_ && a.per_ == b.per_;
  }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
  friend bool operator<(const Point& a, const Point& b) {
    if (a.pre_ != b.pre_) return a.pre_ < b.pre_;
    return a.per_ < b.per_;
  }

  std::string str() const { return pre_ + "(" + per_ + ")"; }

 private:
  std::string pre_, per_;  // over '0'/'1'
};

// 1/n for the first disagreement at 1-based position n; 0 when equal.
Rat dist(const Point& a, const Point& b);

}  // namespace cantor
