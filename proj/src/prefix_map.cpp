#include "cantor/prefix_map.hpp"

#include <algorithm>

namespace cantor {

namespace {

void validate_sources(const std::vector<Rule>& rules) {
  if (rules.empty()) throw DomainError("prefix map: no rules");
  std::vector<Word> srcs;
  srcs.reserve(rules.size());
  for (const Rule& r : rules) srcs.push_back(r.src);
  std::sort(srcs.begin(), srcs.end());
  for (std::size_t i = 0; i + 1 < srcs.size(); ++i)
    if (srcs[i].is_prefix_of(srcs[i + 1]))
      throw DomainError("prefix map: source cylinders overlap");
  if (!antichain_covers_space(srcs))
    throw DomainError("prefix map: source cylinders do not cover the space");
}

bool antichain(std::vector<Word> v) {
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i].is_prefix_of(v[i + 1])) return false;
  return true;
}

}  // namespace

PrefixMap::PrefixMap(std::vector<Rule> rules) : rules_(std::move(rules)) {
  validate_sources(rules_);
  std::sort(rules_.begin(), rules_.end());
  // merge sibling rules (w0 -> z0, w1 -> z1) into (w -> z); the output stack
  // re-merges cascading parents in a single pass
  std::vector<Rule> m;
  m.reserve(rules_.size());
  auto mergeable = [](const Rule& a, const Rule& b) {
    return !a.src.empty() && !a.dst.empty() && a.src.size() == b.src.size() &&
           a.dst.size() == b.dst.size() && a.src.last_bit() == 0 &&
           a.dst.last_bit() == 0 && a.src.sibling() == b.src && a.dst.sibling() == b.dst;
  };
  for (const Rule& r : rules_) {
    m.push_back(r);
    while (m.size() >= 2 && mergeable(m[m.size() - 2], m.back())) {
      Rule a = m[m.size() - 2];
      m.pop_back();
      m.back() = Rule{a.src.prefix(a.src.size() - 1), a.dst.prefix(a.dst.size() - 1)};
    }
  }
  rules_.swap(m);
}

bool PrefixMap::is_injective() const {
  std::vector<Word> dsts;
  for (const Rule& r : rules_) dsts.push_back(r.dst);
  return antichain(std::move(dsts));
}

bool PrefixMap::is_homeo() const {
  std::vector<Word> dsts;
  for (const Rule& r : rules_) dsts.push_back(r.dst);
  if (!antichain(dsts)) return false;
  return Clopen(std::move(dsts)).is_whole();
}

Clopen PrefixMap::range() const {
  std::vector<Word> dsts;
  for (const Rule& r : rules_) dsts.push_back(r.dst);
  return Clopen(std::move(dsts));
}

std::string PrefixMap::str() const {
  std::string s = "{";
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (i) s += ", ";
    s += (rules_[i].src.empty() ? "e" : rules_[i].src.str()) + "->" +
         (rules_[i].dst.empty() ? "e" : rules_[i].dst.str());
  }
  return s + "}";
}

Point apply(const PrefixMap& f, const Point& x) {
  for (const Rule& r : f.rules())
    if (x.starts_with(r.src)) return x.shift(r.src.size()).prepend(r.dst);
  throw ContractViolation("apply: no rule matched");
}

namespace {

// Rules are sorted by source, and sources form a complete antichain, so the
// rules meeting [w] are either a contiguous run of source-extensions of w or
// the single rule whose source is a prefix of w (the predecessor of that run).
template <typename OnExtension, typename OnPrefix>
void for_rules_meeting(const std::vector<Rule>& rs, const Word& w,
                       OnExtension on_ext, OnPrefix on_pre) {
  auto lo = std::lower_bound(
      rs.begin(), rs.end(), w,
      [](const Rule& r, const Word& x) { return r.src < x; });
  bool hit = false;
  for (auto it = lo; it != rs.end() && w.is_prefix_of(it->src); ++it) {
    on_ext(*it);
    hit = true;
  }
  if (hit) return;
  if (lo == rs.begin() || !std::prev(lo)->src.is_prefix_of(w))
    throw ContractViolation("prefix map: no rule comparable with cylinder");
  on_pre(*std::prev(lo));
}

}  // namespace

Clopen image(const PrefixMap& f, const Clopen& a) {
  std::vector<Word> out;
  for (const Word& w : a.cyls())
    for_rules_meeting(
        f.rules(), w, [&](const Rule& r) { out.push_back(r.dst); },
        [&](const Rule& r) {
          out.push_back(r.dst.append(w.suffix_from(r.src.size())));
        });
  return Clopen(std::move(out));
}

Clopen preimage(const PrefixMap& f, const Clopen& a) {
  std::vector<Word> out;
  for (const Rule& r : f.rules())
    for (const Word& w : a.cyls()) {
      if (r.dst.is_prefix_of(w))
        out.push_back(r.src.append(w.suffix_from(r.dst.size())));
      else if (w.is_prefix_of(r.dst))
        out.push_back(r.src);
    }
  return Clopen(std::move(out));
}

PrefixMap compose(const PrefixMap& f, const PrefixMap& g) {
  std::vector<Rule> out;
  for (const Rule& rf : f.rules())
    for (const Rule& rg : g.rules()) {
      if (rg.src.is_prefix_of(rf.dst)) {
        out.push_back(Rule{rf.src, rg.dst.append(rf.dst.suffix_from(rg.src.size()))});
      } else if (rf.dst.is_prefix_of(rg.src)) {
        // refine rf's source until its image lands inside [rg.src]
        Word ext = rg.src.suffix_from(rf.dst.size());
        out.push_back(Rule{rf.src.append(ext), rg.dst});
      }
    }
  return PrefixMap(std::move(out));
}

PrefixMap iterate(const PrefixMap& f, int n) {
  if (n < 0) throw DomainError("iterate: negative power");
  PrefixMap g = PrefixMap::identity();
  for (int i = 0; i < n; ++i) g = compose(f, g);
  return g;
}

PrefixMap inverse(const PrefixMap& f) {
  if (!f.is_homeo()) throw DomainError("inverse: map is not a homeomorphism");
  std::vector<Rule> out;
  for (const Rule& r : f.rules()) out.push_back(Rule{r.dst, r.src});
  return PrefixMap(std::move(out));
}

namespace {

// On each cell of the common source refinement of f and g, the two outputs
// are A·u and B·u for finite words A, B and the shared free suffix u.
// Working over std::string avoids the 128-bit word cap (A can be longer than
// a single rule word).
struct OutputPair {
  std::string a, b;
};

std::vector<OutputPair> common_refinement_outputs(const PrefixMap& f, const PrefixMap& g) {
  std::vector<OutputPair> out;
  for (const Rule& rf : f.rules())
    for (const Rule& rg : g.rules()) {
      const Word *shorter = &rf.src, *longer = &rg.src;
      if (rf.src.size() > rg.src.size()) std::swap(shorter, longer);
      if (!shorter->is_prefix_of(*longer)) continue;
      std::string t = longer->str();
      out.push_back({rf.dst.str() + t.substr(rf.src.size()),
                     rg.dst.str() + t.substr(rg.src.size())});
    }
  return out;
}

}  // namespace

Rat sup_dist(const PrefixMap& f, const PrefixMap& g) {
  Rat best = Rat::zero();
  for (const OutputPair& p : common_refinement_outputs(f, g)) {
    std::size_t m = std::min(p.a.size(), p.b.size());
    std::size_t i = 0;
    while (i < m && p.a[i] == p.b[i]) ++i;
    Rat d;
    if (i < m) {
      d = Rat::one_over((long long)i + 1);  // forced disagreement at position i+1
    } else if (p.a.size() != p.b.size()) {
      d = Rat::one_over((long long)m + 1);  // free suffix can disagree right after
    } else {
      continue;  // identical outputs on this cell
    }
    if (best < d) best = d;
  }
  return best;
}

namespace {

// index of the P-cell containing every extension of the bit string s, or -1
// when s is too short to decide
int cell_of_string(const Partition& P, const std::string& s) {
  for (std::size_t i = 0; i < P.size(); ++i)
    for (const Word& w : P.cell(i).cyls()) {
      std::string ws = w.str();
      if (ws.size() <= s.size() && s.compare(0, ws.size(), ws) == 0) return (int)i;
    }
  return -1;
}

bool same_cell_rec(const Partition& P, std::string a, std::string b, int depth) {
  if (a == b) return true;
  int ca = cell_of_string(P, a), cb = cell_of_string(P, b);
  if (ca >= 0 && cb >= 0) return ca == cb;
  if (depth > 2 * kMaxDepth)
    throw ContractViolation("sim_p: cell recursion did not terminate");
  return same_cell_rec(P, a + "0", b + "0", depth + 1) &&
         same_cell_rec(P, a + "1", b + "1", depth + 1);
}

}  // namespace

bool sim_p(const PrefixMap& f, const PrefixMap& g, const Partition& P) {
  for (const OutputPair& p : common_refinement_outputs(f, g))
    if (!same_cell_rec(P, p.a, p.b, 0)) return false;
  return true;
}

FixedPoints fixed_points(const PrefixMap& f) {
  FixedPoints fp;
  std::vector<Word> cells;
  for (const Rule& r : f.rules()) {
    if (r.src == r.dst) {
      cells.push_back(r.src);
    } else if (r.src.is_prefix_of(r.dst)) {
      // f(src·u) = dst·u fixes exactly u = e^∞ with e the extension
      Word e = r.dst.suffix_from(r.src.size());
      fp.points.emplace_back(r.src.str(), e.str());
    } else if (r.dst.is_prefix_of(r.src)) {
      Word e = r.src.suffix_from(r.dst.size());
      fp.points.emplace_back(r.dst.str(), e.str());
    }
    // incomparable src/dst: outputs disagree with inputs inside the source
    // cylinder, so no fixed point there
  }
  fp.cells = Clopen(std::move(cells));
  return fp;
}

std::vector<Rule> match_clopens(const Clopen& x, const Clopen& y) {
  if (x.is_empty() || y.is_empty())
    throw DomainError("match_clopens: empty operand");
  if (x.cyls().size() == 1 && y.cyls().size() == 1)
    return {Rule{x.cyls()[0], y.cyls()[0]}};
  std::vector<Word> a = x.cyls(), b = y.cyls();
  grow_by_splitting(a, b.size());
  grow_by_splitting(b, a.size());
  std::vector<Rule> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(Rule{a[i], b[i]});
  return out;
}

std::vector<Rule> restrict_rules(const PrefixMap& f, const Clopen& a) {
  std::vector<Rule> out;
  for (const Word& w : a.cyls())
    for_rules_meeting(
        f.rules(), w, [&](const Rule& r) { out.push_back(r); },
        [&](const Rule& r) {
          out.push_back(Rule{w, r.dst.append(w.suffix_from(r.src.size()))});
        });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Clopen> image_cells(const PrefixMap& f, const Partition& P) {
  std::vector<Clopen> out;
  out.reserve(P.size());
  for (const Clopen& c : P.cells()) out.push_back(image(f, c));
  return out;
}

}  // namespace cantor
