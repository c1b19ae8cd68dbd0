// Staged conjugacy machinery: schedules of graph maps between the transition
// digraphs of two maps, the commuting-with-refinements characterizations,
// finite-stage conjugators with exact residual bounds, and the back-and-forth
// constructions between generic homeomorphisms / continuous maps.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cantor/digraph.hpp"
#include "cantor/generic.hpp"

namespace cantor {

// A stage-indexed family of graph maps between gr(f, P_n) and gr(g, Q_n).
// In iso mode every stage holds an isomorphism gr(f,P_n) -> gr(g,Q_n); in
// alternating mode odd stages map gr(f,P_n) -> gr(g,Q_n), even stages map
// gr(g,Q_n) -> gr(f,P_n), and the maps are only required to be surjective.
// All digraphs must carry their partitions as labels.
struct ConjugacySchedule {
  bool alternating = false;
  std::vector<GraphMap> nus;  // stage n lives at index n-1

  std::size_t size() const { return nus.size(); }
  // true when the f side is the source of stage n (1-based)
  bool f_source(std::size_t n) const { return !alternating || n % 2 == 1; }
  Partition P(std::size_t n) const;  // f-side partition of stage n
  Partition Q(std::size_t n) const;  // g-side partition of stage n
};

// Structural sanity: stages present and labeled, every stage a surjective
// graph map (bijective in iso mode), both partition chains decreasing.
// Throws DomainError with the first violation.
void validate_schedule(const ConjugacySchedule& s);

struct CommuteWitness {
  bool ok = true;
  std::size_t n = 0, m = 0, cell = 0;  // first violation; stages are 1-based
  std::string detail;
  explicit operator bool() const { return ok; }
};

// The three equivalent formulations of "(nu_n) commutes with refinements".
// commutes_check evaluates the inclusion families (condition (ii)) and is the
// primary checker; the other two evaluate the stage squares (condition (i))
// and the closure equalities (condition (iii)) independently, so agreement
// can be tested rather than assumed.
CommuteWitness commutes_check(const ConjugacySchedule& s);
CommuteWitness commutes_cond_i(const ConjugacySchedule& s);
CommuteWitness commutes_cond_iii(const ConjugacySchedule& s);

// Closure families: per stage n, the accumulated image of every source-side
// cell across the deeper stages of the schedule, and the family meshes.
struct NuClosure {
  std::vector<std::vector<Clopen>> sets;  // sets[n-1][cell]
  std::vector<Rat> meshes;                // meshes[n-1] = mesh(sets[n-1])
};
NuClosure nu_closure(const ConjugacySchedule& s);

// mesh of every stage's closure family <= the supplied per-stage bound
bool asym_commutes_check(const ConjugacySchedule& s,
                         const std::vector<Rat>& bound_per_stage);

// swaps the two sides of an iso-mode schedule; DomainError otherwise
ConjugacySchedule inverse_schedule(const ConjugacySchedule& s);

// A homeomorphism h with  union of h(a) over a in nu^{-1}(c)  =  c  for every
// target cell c (so h(a) is contained in nu(a) for every source cell a).
// When nu is a bijection on cells this reduces to h(a) = nu(a) exactly.
// Deterministic: fibers are ordered by cell index and matched onto
// lexicographically split pieces of the target cell.
PrefixMap stage_hom(const GraphMap& nu);

struct ConjugatorResult {
  PrefixMap h;                      // the deepest f->g stage homeomorphism
  std::vector<std::size_t> stages;  // schedule stages the h_n were built from
  std::vector<Rat> residuals;       // sup_dist(h_n after f, g after h_n)
  std::vector<Rat> residual_bounds;  // mesh(Q_n) + mesh(g(Q_n))
  // cauchy[i][j - i - 1] = sup_dist(h_i, h_j) for j > i (indices into stages)
  std::vector<std::vector<Rat>> cauchy;
  std::vector<Rat> cauchy_bounds;  // closure mesh at each used stage
};

// Builds the stage homeomorphisms of a commuting schedule and certifies the
// finite-stage conjugacy evidence: every residual obeys its mesh bound and
// the pairwise distances obey the stage closure meshes.  DomainError when the
// schedule fails commutes_check.
ConjugatorResult conjugator(const ConjugacySchedule& s, const PrefixMap& f,
                            const PrefixMap& g);

// Alternating schedules between two property-(P) homeomorphisms (dumbbell
// stages, bars aligned, per-type component surjections) and between two
// property-(Q) continuous maps (balloon stages, initial-vertex types).
// DomainError on witness shortage or when a component class on the source
// side is smaller than its target class.
ConjugacySchedule back_and_forth_hom(const PrefixMap& f,
                                     const std::vector<HomWitness>& wf,
                                     const PrefixMap& g,
                                     const std::vector<HomWitness>& wg,
                                     std::size_t stages);
ConjugacySchedule back_and_forth_cont(const PrefixMap& f,
                                      const std::vector<ContWitness>& wf,
                                      const PrefixMap& g,
                                      const std::vector<ContWitness>& wg,
                                      std::size_t stages);

}  // namespace cantor
