// Clopen subsets of the Cantor set as canonical antichains of cylinder words.
//
// Canonical form: the list of words is sorted, no word is a prefix of
// another, and no two sibling words w0, w1 are both present (they merge
// into w).  The empty list is the empty set; the single empty word is the
// whole space.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cantor/core.hpp"
#include "cantor/point.hpp"

namespace cantor {

// Deterministic choice stream used wherever a construction has harmless
// freedom (which cylinder to split, how to group).  Seeded once per
// generator call, so identical seeds give identical artifacts.
class ChoiceStream {
 public:
  explicit ChoiceStream(std::uint64_t seed) : eng_(seed) {}
  std::size_t next(std::size_t n) {  // uniform in [0, n)
    if (n <= 1) return 0;
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
  }
 private:
  std::mt19937_64 eng_;
};

class Clopen {
 public:
  Clopen() = default;                          // empty set
  explicit Clopen(const Word& w) : cyl_{w} {}  // one cylinder
  explicit Clopen(std::vector<Word> words);    // canonicalizes

  static Clopen whole() { return Clopen(Word()); }
  static Clopen empty() { return Clopen(); }

  const std::vector<Word>& cyls() const { return cyl_; }
  bool is_empty() const { return cyl_.empty(); }
  bool is_whole() const { return cyl_.size() == 1 && cyl_[0].empty(); }

  bool contains(const Point& x) const;
  bool covers_word(const Word& w) const;  // [w] subset of this

  friend bool operator==(const Clopen& a, const Clopen& b) { return a.cyl_ == b.cyl_; }
  friend bool operator!=(const Clopen& a, const Clopen& b) { return !(a == b); }
  friend bool operator<(const Clopen& a, const Clopen& b) { return a.cyl_ < b.cyl_; }

  std::string str() const;

 private:
  std::vector<Word> cyl_;
};

Clopen set_union(const Clopen& a, const Clopen& b);
Clopen set_intersect(const Clopen& a, const Clopen& b);
Clopen set_subtract(const Clopen& a, const Clopen& b);
Clopen set_complement(const Clopen& a);
bool subset(const Clopen& a, const Clopen& b);
bool overlaps(const Clopen& a, const Clopen& b);

// diameter: 1/(L+1) where L is the length of the longest common prefix of
// all points of the set (for a single cylinder [w], L = |w|).
Rat diam(const Clopen& a);  // throws DomainError on the empty set

// Longest common prefix word shared by every point of the set.
Word common_prefix(const Clopen& a);

// canonical representative point: lexicographically first cylinder + 000...
Point pick_point(const Clopen& a);

// For a pairwise prefix-incomparable word list: true iff the cylinders cover
// the whole space.  Checked in linear time by the exact measure identity
// sum 2^-|w| = 1 (binary carries must resolve with no remainder).
bool antichain_covers_space(const std::vector<Word>& ws);

// Grow a cylinder antichain to n entries by repeatedly splitting the
// shallowest cylinder (ties toward the lexicographically smallest) into its
// two children.  The result is sorted.
void grow_by_splitting(std::vector<Word>& v, std::size_t n);

// Split a into k disjoint nonempty clopen pieces (their union is a).  When
// min_prefix > 0, every piece lies inside a single cylinder of depth
// min_prefix, so its diameter is at most 1/(min_prefix+1).  A null rng makes
// the construction fully deterministic.
std::vector<Clopen> split_clopen(const Clopen& a, std::size_t k,
                                 std::size_t min_prefix = 0,
                                 ChoiceStream* rng = nullptr);

}  // namespace cantor
