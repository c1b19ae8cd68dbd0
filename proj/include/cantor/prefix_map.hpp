// Prefix-substitution maps on the Cantor set.
//
// A map is a finite rule system {src_i -> dst_i} whose source words form a
// complete antichain (their cylinders partition the space); the semantics is
// f(src_i · w) = dst_i · w for every infinite suffix w.  Such a map is
// continuous; it is a homeomorphism exactly when the destination words also
// form a complete antichain.

#pragma once

#include <string>
#include <vector>

#include "cantor/partition.hpp"

namespace cantor {

struct Rule {
  Word src, dst;
  friend bool operator==(const Rule&, const Rule&) = default;
  friend auto operator<=>(const Rule&, const Rule&) = default;
};

class PrefixMap {
 public:
  // Validates that the sources form a complete antichain, then
  // canonicalizes: rules sorted by source, and sibling rules
  // (w0 -> z0, w1 -> z1) merged into (w -> z).
  explicit PrefixMap(std::vector<Rule> rules);

  static PrefixMap identity() { return PrefixMap({Rule{Word(), Word()}}); }

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }

  // destinations form a complete antichain
  bool is_homeo() const;
  // destinations form an antichain (map injective, image may be proper)
  bool is_injective() const;
  // union of destination cylinders = image of the whole space
  Clopen range() const;

  std::string str() const;

  friend bool operator==(const PrefixMap& a, const PrefixMap& b) {
    return a.rules_ == b.rules_;
  }

 private:
  std::vector<Rule> rules_;
};

Point apply(const PrefixMap& f, const Point& x);
Clopen image(const PrefixMap& f, const Clopen& a);
Clopen preimage(const PrefixMap& f, const Clopen& a);

// rule system of g∘f (apply f first); throws DepthOverflow if a refined
// source would exceed the depth cap
PrefixMap compose(const PrefixMap& f, const PrefixMap& g);
PrefixMap iterate(const PrefixMap& f, int n);  // n >= 0; iterate(f,0) = identity

PrefixMap inverse(const PrefixMap& f);  // throws DomainError unless f is a homeomorphism

// exact value of max over points x of dist(f(x), g(x))
Rat sup_dist(const PrefixMap& f, const PrefixMap& g);

// true iff f(x) and g(x) lie in the same cell of P for every point x
bool sim_p(const PrefixMap& f, const PrefixMap& g, const Partition& P);

// Exact fixed-point set of f: a clopen part (cylinders fixed pointwise by
// identity rules) plus finitely many isolated fixed points.
struct FixedPoints {
  Clopen cells;
  std::vector<Point> points;
  bool empty() const { return cells.is_empty() && points.empty(); }
};
FixedPoints fixed_points(const PrefixMap& f);

// A canonical partial rule system carrying [x] homeomorphically onto [y]
// (x, y nonempty clopen).  The cylinder lists are balanced to equal length
// by splitting the shallowest cylinder, then paired in sorted order.
std::vector<Rule> match_clopens(const Clopen& x, const Clopen& y);

// rules of f refined so that every source cylinder lies inside [a]
// (the partial system f|_a)
std::vector<Rule> restrict_rules(const PrefixMap& f, const Clopen& a);

// images of the cells of P under f, in cell order (a partition again when f
// is a homeomorphism)
std::vector<Clopen> image_cells(const PrefixMap& f, const Partition& P);

}  // namespace cantor
