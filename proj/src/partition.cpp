#include "cantor/partition.hpp"

#include <algorithm>

namespace cantor {

Partition::Partition(std::vector<Clopen> cells)
    : cells_(std::make_shared<const std::vector<Clopen>>(std::move(cells))) {
  std::vector<Word> all;
  for (const Clopen& c : *cells_) {
    if (c.is_empty()) throw DomainError("partition: empty cell");
    all.insert(all.end(), c.cyls().begin(), c.cyls().end());
  }
  // disjointness: across the combined sorted list, no word may be a prefix
  // of another (within a single canonical clopen that already holds)
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i + 1 < all.size(); ++i)
    if (all[i].is_prefix_of(all[i + 1]))
      throw DomainError("partition: cells overlap");
  if (!antichain_covers_space(all))
    throw DomainError("partition: cells do not cover the space");
}

std::size_t Partition::locate(const Point& x) const {
  for (std::size_t i = 0; i < cells_->size(); ++i)
    if ((*cells_)[i].contains(x)) return i;
  throw ContractViolation("partition: point in no cell");
}

std::size_t Partition::locate_word(const Word& w) const {
  for (std::size_t i = 0; i < cells_->size(); ++i)
    if ((*cells_)[i].covers_word(w)) return i;
  throw DomainError("partition: cylinder not inside a single cell");
}

std::string Partition::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < cells_->size(); ++i) {
    if (i) s += " ";
    s += (*cells_)[i].str();
  }
  return s + "]";
}

Rat mesh(const Partition& P) { return mesh(P.cells()); }

Rat mesh(const std::vector<Clopen>& cells) {
  if (cells.empty()) throw DomainError("mesh of empty collection");
  Rat m = Rat::zero();
  for (const Clopen& c : cells) {
    Rat d = diam(c);
    if (m < d) m = d;
  }
  return m;
}

Rat min_gap(const Partition& P) {
  if (P.size() < 2) throw DomainError("min_gap needs at least two cells");
  // longest common prefix over cylinder words from distinct cells
  struct Tagged {
    Word w;
    std::size_t cell;
  };
  std::vector<Tagged> v;
  for (std::size_t i = 0; i < P.size(); ++i)
    for (const Word& w : P.cell(i).cyls()) v.push_back({w, i});
  std::sort(v.begin(), v.end(), [](const Tagged& a, const Tagged& b) { return a.w < b.w; });
  int best = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i].cell == v[j].cell) continue;
      int l = v[i].w.lcp(v[j].w);
      if (l > best) best = l;
    }
  return Rat::one_over(best + 1);
}

bool refines(const Partition& Q, const Partition& P) {
  for (const Clopen& q : Q.cells()) {
    bool inside = false;
    for (const Clopen& p : P.cells())
      if (subset(q, p)) {
        inside = true;
        break;
      }
    if (!inside) return false;
  }
  return true;
}

std::vector<std::size_t> refinement_map(const Partition& Q, const Partition& P) {
  std::vector<std::size_t> m(Q.size());
  for (std::size_t i = 0; i < Q.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < P.size(); ++j)
      if (subset(Q.cell(i), P.cell(j))) {
        m[i] = j;
        found = true;
        break;
      }
    if (!found) throw DomainError("refinement_map: Q does not refine P");
  }
  return m;
}

Partition meet(const Partition& P, const Partition& Q) {
  std::vector<Clopen> cells;
  for (const Clopen& p : P.cells())
    for (const Clopen& q : Q.cells()) {
      Clopen x = set_intersect(p, q);
      if (!x.is_empty()) cells.push_back(std::move(x));
    }
  return Partition(std::move(cells));
}

CellLookup::CellLookup(const Partition& P) {
  for (std::size_t i = 0; i < P.size(); ++i)
    for (const Word& w : P.cell(i).cyls()) entries_.push_back({w, i});
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.w < b.w; });
}

std::vector<std::size_t> CellLookup::cells_meeting(const Word& w) const {
  std::vector<std::size_t> out;
  auto less = [](const Entry& e, const Word& x) { return e.w < x; };
  // entries whose word extends w form a contiguous sorted range
  auto it = std::lower_bound(entries_.begin(), entries_.end(), w, less);
  for (auto j = it; j != entries_.end() && w.is_prefix_of(j->w); ++j)
    out.push_back(j->cell);
  // otherwise at most one entry is a strict prefix of w, and since the words
  // are sorted and pairwise incomparable it is the predecessor of the range
  if (out.empty() && it != entries_.begin() && std::prev(it)->w.is_prefix_of(w))
    out.push_back(std::prev(it)->cell);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cantor
