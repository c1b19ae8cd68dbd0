// Exact arithmetic and binary words for dynamics on the binary Cantor set.
//
// Points of the space are infinite binary sequences; the metric is
// d(x,y) = 1/n where n is the 1-based position of the first disagreement
// (0 when equal).  Every distance that occurs is therefore 0 or 1/n, and
// all computations in this library are exact.

#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cantor {

// ---------------------------------------------------------------------------
// errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A rule source / cylinder word would exceed the depth cap.  Callers are
// expected to coarsen their inputs; nothing is silently truncated.
struct DepthOverflow : Error {
  using Error::Error;
};

// Invalid argument at an API boundary (empty clopen where nonempty required,
// non-antichain rule sources, etc).
struct DomainError : Error {
  using Error::Error;
};

// An internal invariant that the construction theorems guarantee failed to
// hold.  Seeing this means a bug, not bad input.
struct ContractViolation : Error {
  using Error::Error;
};

// Raised by the generic-map generators when the next stage cannot be
// materialized within the depth/size limits.  Carries how far we got.
struct StageOverflow : DepthOverflow {
  int achieved_m;
  StageOverflow(const std::string& msg, int achieved)
      : DepthOverflow(msg), achieved_m(achieved) {}
};

// ---------------------------------------------------------------------------
// depth cap

// Hard build-time bound on word length (bits).  The runtime cap can be
// lowered (never raised) via set_depth_cap, e.g. from CANTOR_DEPTH_CAP.
inline constexpr int kMaxDepth = 120;

int depth_cap();
void set_depth_cap(int cap);  // throws DomainError unless 1 <= cap <= kMaxDepth

// ---------------------------------------------------------------------------
// Rat: exact nonnegative rational, small magnitudes only

struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n, long long d) : num(n), den(d) {
    if (d == 0) throw DomainError("Rat: zero denominator");
    if (d < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
  }
  static Rat zero() { return Rat(); }
  static Rat one_over(long long n) { return Rat(1, n); }

  bool is_zero() const { return num == 0; }
  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return Rat(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat(a.num * b.num, a.den * b.den);
  }
  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    long long l = a.num * b.den, r = b.num * a.den;
    return l <=> r;
  }
  std::string str() const {
    if (num == 0) return "0";
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// Parses "0", "1" or "1/n".
Rat parse_rat(std::string_view s);

// ---------------------------------------------------------------------------
// Word: finite binary word, packed into 128 bits
//
// Bit i (0-based from the left end of the word) is stored at position
// 127 - i of bits_, so unsigned comparison of bits_ is lexicographic
// comparison of the words (with the shorter word, a prefix, ordered first
// when bits agree).

class Word {
 public:
  Word() = default;

  static Word from_string(std::string_view s);

  int size() const { return len_; }
  bool empty() const { return len_ == 0; }

  int bit(int i) const {  // 0-based
    return (int)((bits_ >> (127 - i)) & 1);
  }

  Word append(int b) const {
    check_room(1);
    Word w = *this;
    if (b) w.bits_ |= ((unsigned __int128)1) << (127 - len_);
    w.len_ = (std::uint8_t)(len_ + 1);
    return w;
  }

  Word append(const Word& o) const {
    check_room(o.len_);
    Word w = *this;
    if (o.len_ > 0) w.bits_ |= o.bits_ >> len_;
    w.len_ = (std::uint8_t)(len_ + o.len_);
    return w;
  }

  Word prefix(int n) const {
    Word w;
    w.len_ = (std::uint8_t)n;
    w.bits_ = bits_ & mask(n);
    return w;
  }

  // drop the first n bits
  Word suffix_from(int n) const {
    Word w;
    w.len_ = (std::uint8_t)(len_ - n);
    w.bits_ = (n >= 128) ? 0 : (bits_ << n) & mask(w.len_);
    return w;
  }

  bool is_prefix_of(const Word& o) const {
    return len_ <= o.len_ && (o.bits_ & mask(len_)) == bits_;
  }

  int lcp(const Word& o) const {
    int m = len_ < o.len_ ? len_ : o.len_;
    unsigned __int128 x = bits_ ^ o.bits_;
    if (x == 0) return m;
    int lead = (x >> 64) ? __builtin_clzll((unsigned long long)(x >> 64))
                         : 64 + __builtin_clzll((unsigned long long)x);
    return lead < m ? lead : m;
  }

  // flip the last bit
  Word sibling() const {
    Word w = *this;
    w.bits_ ^= ((unsigned __int128)1) << (128 - len_);
    return w;
  }

  int last_bit() const { return bit(len_ - 1); }

  std::string str() const {
    std::string s;
    s.reserve(len_);
    for (int i = 0; i < len_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
  }

  friend bool operator==(const Word& a, const Word& b) {
    return a.len_ == b.len_ && a.bits_ == b.bits_;
  }
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.bits_ != b.bits_) return a.bits_ < b.bits_ ? std::strong_ordering::less
                                                     : std::strong_ordering::greater;
    return a.len_ <=> b.len_;
  }

 private:
  static unsigned __int128 mask(int n) {
    if (n == 0) return 0;
    return (~(unsigned __int128)0) << (128 - n);
  }
  void check_room(int extra) const;

  unsigned __int128 bits_ = 0;
  std::uint8_t len_ = 0;
};

inline int comparable_longer_is(const Word& a, const Word& b, bool& comparable) {
  // helper for cylinder intersection: returns which word is the longer one
  // (0 for a, 1 for b) when one is a prefix of the other
  if (a.is_prefix_of(b)) { comparable = true; return 1; }
  if (b.is_prefix_of(a)) { comparable = true; return 0; }
  comparable = false;
  return -1;
}

}  // namespace cantor
