// Finite clopen partitions of the Cantor set.

#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "cantor/clopen.hpp"

namespace cantor {

// An ordered list of pairwise disjoint nonempty clopen sets whose union is
// the whole space.  Construction validates disjointness and coverage.
class Partition {
 public:
  explicit Partition(std::vector<Clopen> cells);

  const std::vector<Clopen>& cells() const { return *cells_; }
  std::size_t size() const { return cells_->size(); }
  const Clopen& cell(std::size_t i) const { return (*cells_)[i]; }

  // index of the unique cell containing the point / the cylinder [w]
  std::size_t locate(const Point& x) const;
  std::size_t locate_word(const Word& w) const;  // throws DomainError if [w] straddles cells

  std::string str() const;

 private:
  // cells are immutable after validation, so copies of a partition share them
  std::shared_ptr<const std::vector<Clopen>> cells_;
};

// max cell diameter
Rat mesh(const Partition& P);
Rat mesh(const std::vector<Clopen>& cells);  // every member nonempty

// min over distinct cells A != B and points x in A, y in B of d(x,y);
// equals 1/(L+1) where L is the longest common prefix length over pairs of
// cylinder words taken from distinct cells.
Rat min_gap(const Partition& P);

// every cell of Q lies inside some cell of P
bool refines(const Partition& Q, const Partition& P);

// for each cell of Q, the index of the P-cell containing it
std::vector<std::size_t> refinement_map(const Partition& Q, const Partition& P);

// common refinement: all nonempty intersections of a P-cell with a Q-cell,
// ordered by (P index, Q index)
Partition meet(const Partition& P, const Partition& Q);

// Fast cylinder-to-cell index for a partition: maps a word to the cell whose
// cylinders meet [w], using the prefix structure.
class CellLookup {
 public:
  explicit CellLookup(const Partition& P);

  // all cell indices whose intersection with [w] is nonempty
  std::vector<std::size_t> cells_meeting(const Word& w) const;

 private:
  struct Entry {
    Word w;
    std::size_t cell;
  };
  std::vector<Entry> entries_;  // sorted by word
};

}  // namespace cantor
