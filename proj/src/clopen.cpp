#include "cantor/clopen.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace cantor {

namespace {

void canonicalize(std::vector<Word>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  // drop words covered by an earlier (shorter) word: after sorting, a word
  // covering others immediately precedes them
  // merge sibling pairs w0,w1 -> w as they meet on the output stack; upward
  // cascades re-merge immediately, and words covered by a merged parent are
  // still dropped because the parent is a prefix of them
  std::vector<Word> out;
  out.reserve(v.size());
  for (const Word& w : v) {
    if (!out.empty() && out.back().is_prefix_of(w)) continue;
    out.push_back(w);
    while (out.size() >= 2) {
      const Word& a = out[out.size() - 2];
      const Word& b = out.back();
      if (a.empty() || a.size() != b.size() || a.last_bit() != 0 || a.sibling() != b)
        break;
      out.pop_back();
      out.back() = out.back().prefix(out.back().size() - 1);
    }
  }
  v.swap(out);
}

}  // namespace

Clopen::Clopen(std::vector<Word> words) : cyl_(std::move(words)) {
  canonicalize(cyl_);
}

bool Clopen::contains(const Point& x) const {
  for (const Word& w : cyl_)
    if (x.starts_with(w)) return true;
  return false;
}

bool Clopen::covers_word(const Word& w) const {
  // [w] is covered iff some cylinder is a prefix of w, or the cylinders
  // extending w cover [w] entirely; with a canonical (fully merged)
  // antichain the extensions of w cover [w] iff their union canonicalizes
  // back to exactly {w}.
  std::vector<Word> ext;
  for (const Word& c : cyl_) {
    if (c.is_prefix_of(w)) return true;
    if (w.is_prefix_of(c)) ext.push_back(c);
  }
  if (ext.empty()) return false;
  canonicalize(ext);
  return ext.size() == 1 && ext[0] == w;
}

std::string Clopen::str() const {
  std::string s = "{";
  for (std::size_t i = 0; i < cyl_.size(); ++i) {
    if (i) s += ",";
    s += cyl_[i].empty() ? "e" : cyl_[i].str();
  }
  return s + "}";
}

Clopen set_union(const Clopen& a, const Clopen& b) {
  std::vector<Word> v = a.cyls();
  v.insert(v.end(), b.cyls().begin(), b.cyls().end());
  return Clopen(std::move(v));
}

Clopen set_intersect(const Clopen& a, const Clopen& b) {
  std::vector<Word> v;
  for (const Word& u : a.cyls())
    for (const Word& w : b.cyls()) {
      if (u.is_prefix_of(w)) v.push_back(w);
      else if (w.is_prefix_of(u)) v.push_back(u);
    }
  return Clopen(std::move(v));
}

namespace {

// [w] minus b, appended to out
void subtract_word(const Word& w, const Clopen& b, std::vector<Word>& out) {
  bool any_ext = false;
  for (const Word& c : b.cyls()) {
    if (c.is_prefix_of(w)) return;  // fully removed
    if (w.is_prefix_of(c)) any_ext = true;
  }
  if (!any_ext) {
    out.push_back(w);
    return;
  }
  subtract_word(w.append(0), b, out);
  subtract_word(w.append(1), b, out);
}

}  // namespace

Clopen set_subtract(const Clopen& a, const Clopen& b) {
  std::vector<Word> v;
  for (const Word& w : a.cyls()) subtract_word(w, b, v);
  return Clopen(std::move(v));
}

Clopen set_complement(const Clopen& a) {
  return set_subtract(Clopen::whole(), a);
}

bool subset(const Clopen& a, const Clopen& b) {
  for (const Word& w : a.cyls())
    if (!b.covers_word(w)) return false;
  return true;
}

bool overlaps(const Clopen& a, const Clopen& b) {
  for (const Word& u : a.cyls())
    for (const Word& w : b.cyls())
      if (u.is_prefix_of(w) || w.is_prefix_of(u)) return true;
  return false;
}

Word common_prefix(const Clopen& a) {
  if (a.is_empty()) throw DomainError("common_prefix of empty set");
  if (a.cyls().size() == 1) return a.cyls()[0];
  // sorted list: the common prefix of all words is lcp(first, last)
  int L = a.cyls().front().lcp(a.cyls().back());
  return a.cyls().front().prefix(L);
}

Rat diam(const Clopen& a) {
  if (a.is_empty()) throw DomainError("diam of empty set");
  return Rat::one_over(common_prefix(a).size() + 1);
}

Point pick_point(const Clopen& a) {
  if (a.is_empty()) throw DomainError("pick_point of empty set");
  return Point(a.cyls()[0].str(), "0");
}

bool antichain_covers_space(const std::vector<Word>& ws) {
  if (ws.empty()) return false;
  std::size_t maxd = 0;
  for (const Word& w : ws) maxd = std::max(maxd, (std::size_t)w.size());
  std::vector<unsigned long long> cnt(maxd + 1, 0);
  for (const Word& w : ws) ++cnt[w.size()];
  unsigned long long carry = 0;
  for (std::size_t d = maxd; d > 0; --d) {
    unsigned long long t = cnt[d] + carry;
    if (t & 1) return false;
    carry = t >> 1;
  }
  return cnt[0] + carry == 1;
}

void grow_by_splitting(std::vector<Word>& v, std::size_t n) {
  struct Deeper {  // min-heap on (depth, word)
    bool operator()(const Word& a, const Word& b) const {
      return a.size() != b.size() ? a.size() > b.size() : b < a;
    }
  };
  std::priority_queue<Word, std::vector<Word>, Deeper> q(Deeper{}, std::move(v));
  std::size_t sz = q.size();
  while (sz < n) {
    Word w = q.top();
    q.pop();
    q.push(w.append(0));  // throws DepthOverflow at the cap
    q.push(w.append(1));
    ++sz;
  }
  v.clear();
  v.reserve(sz);
  while (!q.empty()) {
    v.push_back(q.top());
    q.pop();
  }
  std::sort(v.begin(), v.end());
}

std::vector<Clopen> split_clopen(const Clopen& a, std::size_t k,
                                 std::size_t min_prefix, ChoiceStream* rng) {
  if (a.is_empty()) throw DomainError("split of empty set");
  if (k == 0) throw DomainError("split into zero pieces");
  if (k == 1 && min_prefix == 0) return {a};

  // atoms: cylinders of depth >= min_prefix
  std::vector<Word> atoms;
  {
    std::vector<Word> todo(a.cyls().begin(), a.cyls().end());
    while (!todo.empty()) {
      Word w = todo.back();
      todo.pop_back();
      if ((std::size_t)w.size() >= min_prefix) {
        atoms.push_back(w);
      } else {
        todo.push_back(w.append(0));
        todo.push_back(w.append(1));
      }
    }
    std::sort(atoms.begin(), atoms.end());
  }

  // group atoms by their depth-min_prefix prefix; pieces never cross groups
  auto group_of = [&](const Word& w) {
    return min_prefix == 0 ? Word() : w.prefix((int)min_prefix);
  };
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end)
  for (std::size_t i = 0; i < atoms.size();) {
    std::size_t j = i;
    while (j < atoms.size() && group_of(atoms[j]) == group_of(atoms[i])) ++j;
    groups.push_back({i, j});
    i = j;
  }
  if (groups.size() > k)
    throw DomainError("split: need at least " + std::to_string(groups.size()) +
                      " pieces to meet the diameter bound");

  // how many pieces each group provides
  std::vector<std::size_t> want(groups.size(), 1);
  std::size_t total = groups.size();
  while (total < k) {
    std::size_t g = rng ? rng->next(groups.size()) : total % groups.size();
    ++want[g];
    ++total;
  }

  std::vector<Clopen> out;
  out.reserve(k);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<Word> ga(atoms.begin() + groups[g].first, atoms.begin() + groups[g].second);
    // ensure enough atoms: split the chosen (default: shallowest) atom
    if (rng) {
      while (ga.size() < want[g]) {
        std::size_t pick = rng->next(ga.size());
        Word w = ga[pick];
        ga[pick] = w.append(0);  // throws DepthOverflow at the cap
        ga.push_back(w.append(1));
        std::sort(ga.begin(), ga.end());
      }
    } else if (ga.size() < want[g]) {
      grow_by_splitting(ga, want[g]);
    }
    // contiguous runs of atoms; run boundaries are deterministic
    std::size_t n = ga.size(), parts = want[g];
    std::size_t base = n / parts, extra = n % parts, pos = 0;
    for (std::size_t p = 0; p < parts; ++p) {
      std::size_t len = base + (p < extra ? 1 : 0);
      std::vector<Word> piece(ga.begin() + pos, ga.begin() + pos + len);
      pos += len;
      out.emplace_back(std::move(piece));
    }
  }
  return out;
}

}  // namespace cantor
