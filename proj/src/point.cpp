#include "cantor/point.hpp"

#include <algorithm>
#include <numeric>

namespace cantor {

namespace {

bool binary(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

// smallest d | n such that s is (s[0..d))^{n/d}
std::size_t primitive_len(const std::string& s) {
  std::size_t n = s.size();
  for (std::size_t d = 1; d <= n / 2; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = s[i] == s[i - d];
    if (ok) return d;
  }
  return n;
}

}  // namespace

Point::Point(std::string pre, std::string per) : pre_(std::move(pre)), per_(std::move(per)) {
  if (per_.empty()) throw DomainError("point needs a nonempty period");
  if (!binary(pre_) || !binary(per_)) throw DomainError("point words must be binary");
  if (pre_.size() + per_.size() > kMaxPointBits)
    throw DomainError("point exceeds size budget");
  per_.resize(primitive_len(per_));
  // absorb a preperiod tail that already matches the period
  while (!pre_.empty() && pre_.back() == per_.back()) {
    pre_.pop_back();
    std::rotate(per_.rbegin(), per_.rbegin() + 1, per_.rend());
  }
}

Point Point::shift(std::size_t n) const {
  if (n <= pre_.size()) return Point(pre_.substr(n), per_);
  std::size_t k = (n - pre_.size()) % per_.size();
  return Point("", per_.substr(k) + per_.substr(0, k));
}

Point Point::prepend(const Word& w) const {
  return Point(w.str() + pre_, per_);
}

bool Point::starts_with(const Word& w) const {
  for (int i = 0; i < w.size(); ++i)
    if (bit(i) != w.bit(i)) return false;
  return true;
}

Rat dist(const Point& a, const Point& b) {
  if (a == b) return Rat::zero();
  std::size_t bound = std::max(a.pre().size(), b.pre().size()) +
                      std::lcm(a.per().size(), b.per().size());
  for (std::size_t i = 0; i < bound; ++i)
    if (a.bit(i) != b.bit(i)) return Rat::one_over((long long)i + 1);
  throw ContractViolation("dist: unequal points agree beyond the periodic bound");
}

}  // namespace cantor
