// Finite-stage generators and checkers for the generic conjugacy classes:
//  - homeomorphisms whose transition digraphs are balanced dumbbells with
//    factorial plate weights and exact left/right loop certificates,
//  - continuous maps whose transition digraphs are strict balloons of
//    factorial type,
//  - the bar-increasing refinement methods and the subdumbbell/subballoon
//    classification used to align nested witnesses.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cantor/digraph.hpp"

namespace cantor {

// Left/right loop certificate of one dumbbell component: a lies in the
// first left-plate cell with h^r(a) = a, b in the first right-plate cell
// with h^t(b) = b (r, t the plate weights).
struct LoopPair {
  Clopen a, b;
};

// One stage of the dumbbell hierarchy: a partition of mesh < 1/m and a
// multiple q of m such that every component of gr(h,P) is a balanced
// dumbbell of plate weight q! carrying the recorded loops (one pair per
// component, in component order).
struct HomWitness {
  Partition P;
  long long q = 0;
  std::vector<LoopPair> loops;
};

struct HomGeneric {
  PrefixMap h;
  std::vector<HomWitness> witnesses;  // witnesses[m-1] certifies stage m
};

// One stage of the balloon hierarchy: every component of gr(f,P) is a
// balloon of type (q!, q!) that is strict relative to f.
struct ContWitness {
  Partition P;
  long long q = 0;
};

struct ContGeneric {
  PrefixMap f;
  std::vector<ContWitness> witnesses;
};

struct CheckResult {
  bool ok = false;
  std::string reason;  // nonempty when !ok
  explicit operator bool() const { return ok; }
};

enum class Side { Left, Right };

// Redefines g on the last left and right plate of every dumbbell component
// of gr(g,P) so that each component gains exact set-return loops
// (h^r(a) = a, h^t(b) = b) while gr(h,P) = gr(g,P).  Requires g a
// homeomorphism whose components are all dumbbells.
struct AttachResult {
  PrefixMap h;
  std::vector<LoopPair> loops;  // per component, in component order
};
AttachResult attach_loops_certified(const PrefixMap& g, const Partition& P);
PrefixMap attach_loops(const PrefixMap& g, const Partition& P);

// Deterministic generator of a homeomorphism with nested dumbbell witnesses
// for stages 1..m_max: mesh(P_m) < 1/m, q_m the least multiple of
// m·q_{m-1} that is >= 2, plate weight q_m!, P_{m+1} refines P_m, and one
// final map serves every stage.  Throws StageOverflow (with the largest
// achievable stage recorded) when a stage would exceed the depth cap or
// the size limits.
HomGeneric generic_hom(int m_max, std::uint64_t seed);

// Verifies a stage witness exactly: mesh < 1/m, m | q, all components
// balanced dumbbells of plate weight q!, and the recorded loop sets return
// exactly under q! iterations.
CheckResult check_property_P(const PrefixMap& h, const HomWitness& w, int m);

// The bar-increasing refinement: replaces one plate cell of the chosen
// dumbbell component by its two preimage/image parts, producing a partition
// whose corresponding component has bar length +1 and unchanged plate
// weights.  comp indexes components(build_gr(h, P)).
Partition increase_bar(const PrefixMap& h, const Partition& P, std::size_t comp,
                       Side side);

// Common plate weight when every component of gr(h,P) is a balanced
// dumbbell with certified left and right loops; absent otherwise.  Loop
// existence is decided by a bounded greatest-fixed-set iteration.
std::optional<long long> h_regular(const PrefixMap& h, const Partition& P);

// Classification of a fine dumbbell component inside a coarse one:
// type 1 = contained in the left plates, type 2 = in the right plates,
// type 3 = meets the bar.  The fine partition is normalized by bar
// increases so that u'_1 lies in u_1 (type 1/3), u'_1 lies in w_1 (type 2),
// w'_1 lies in w_1 and the bar flanks are centered (type 3).
struct SubdumbbellType {
  int type = 0;
  Partition P;       // the normalized fine partition
  std::size_t comp;  // index of the normalized component within it
  long long flank;   // type 3: cells on each side of the aligned bar core
};
SubdumbbellType subdumbbell_type(const PrefixMap& h, const Partition& fine,
                                 const Partition& coarse, std::size_t comp_fine,
                                 std::size_t comp_coarse);

// Deterministic generator of a continuous (non-surjective) map with nested
// strict-balloon witnesses for stages 1..m_max; same q schedule and
// overflow behaviour as generic_hom.
ContGeneric generic_cont(int m_max, std::uint64_t seed);

// Verifies a balloon stage witness: mesh < 1/m, m | q, all components
// balloons of type (q!, q!), each strict relative to f.
CheckResult check_property_Q(const PrefixMap& f, const ContWitness& w, int m);

// Exact strictness of one balloon component: f(v_i) proper in v_{i+1},
// f(w_j) proper in w_{j+1}, and f(v_s) ∪ f(w_t) proper in w_1.
CheckResult strict_check(const PrefixMap& f, const Partition& P, std::size_t comp);

// Common type k when every component of gr(f,P) is a strict balloon of
// type (k,k); absent otherwise.
std::optional<long long> f_admissible(const PrefixMap& f, const Partition& P);

// The cell of the coarse partition containing the initial vertex of the
// fine balloon component; returned as a coarse cell index.
std::size_t subballoon_type(const PrefixMap& f, const Partition& fine,
                            const Partition& coarse, std::size_t comp_fine,
                            std::size_t comp_coarse);

}  // namespace cantor
