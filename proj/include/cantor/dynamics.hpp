// Dynamical certificates over dumbbell / balloon stage witnesses:
// trajectories and pseudo-orbits, a shadowing solver, Li-Yorke pair
// exclusion, odometer limit-set covers, recurrence classification,
// chain-continuity moduli, and the non-equicontinuity defect certificate.
//
// Every infinitary statement (limit sets, infinite intersections, liminf /
// limsup behaviour) is replaced here by a finite-stage certificate with an
// explicit horizon; operations report how far they verified rather than
// overclaiming.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cantor/digraph.hpp"
#include "cantor/generic.hpp"

namespace cantor {

// ---------------------------------------------------------------------------
// pseudo-orbits

// A finite window (x_{start}, ..., x_{start+k}) of a delta-pseudotrajectory:
// dist(f(x_n), x_{n+1}) <= delta for consecutive entries.  Negative start
// indices are meaningful for homeomorphisms only.
struct PseudoOrbit {
  long long start = 0;  // index of points.front()
  std::vector<Point> points;
  Rat delta;
};

// max over consecutive pairs of dist(f(x_n), x_{n+1}); Rat::zero() for
// windows shorter than two points
Rat pseudo_orbit_defect(const PrefixMap& f, const PseudoOrbit& po);

// ---------------------------------------------------------------------------
// orbits

// x, f(x), ..., f^n(x)  (n + 1 points).  DepthOverflow reports the number of
// steps achieved when a point outgrows the budget.
std::vector<Point> trajectory(const PrefixMap& f, const Point& x, long long n);

// cell indices of the trajectory under P
std::vector<std::size_t> itinerary(const PrefixMap& f, const Point& x,
                                   long long n, const Partition& P);

// ---------------------------------------------------------------------------
// shadowing

struct ShadowResult {
  // cell-sequence class of the pseudo-orbit within its dumbbell:
  // 1 = crosses the bar, 2 = left loop throughout, 3 = right loop throughout
  int kind = 0;
  Point x;    // real orbit point: dist(po.points[k], h^{start+k}(x)) <= bound
  Rat bound;  // mesh(w.P); the shadowing distance, verified index by index
};

// Requires po.delta < min_gap(w.P) and a valid dumbbell witness; classifies
// the cell itinerary of the window and produces a real orbit through the
// matching phase (bar cell, left-loop core, or right-loop core).
ShadowResult shadow(const PrefixMap& h, const HomWitness& w,
                    const PseudoOrbit& po);

// ---------------------------------------------------------------------------
// Li-Yorke exclusion

enum class LiYorkeVerdict {
  SameCellTail,       // cells merge at merge_index and never split again
  Separated,          // never share a cell within the window
  InconclusiveDepth,  // point budget exhausted before the window ended
};

struct LiYorkeReport {
  LiYorkeVerdict verdict = LiYorkeVerdict::Separated;
  long long merge_index = -1;  // first step with both orbits in one cell
  long long steps = 0;         // steps actually examined
};

// Both orbits' itineraries to n steps.  On a witnessed map a merge is
// permanent (the once-split property of dumbbells / balloons); a split after
// a merge would contradict the witness and raises ContractViolation.
LiYorkeReport li_yorke_exclusion(const PrefixMap& h, const HomWitness& w,
                                 const Point& x, const Point& y, long long n);
LiYorkeReport li_yorke_exclusion(const PrefixMap& f, const ContWitness& w,
                                 const Point& x, const Point& y, long long n);

// True iff for every vertex and every pair of equal-length walks from it,
// the coincidence times form a prefix interval; decided by exhaustive
// enumeration to length 2 * |vertices|.  The component must classify as a
// loop, balloon, or dumbbell (DomainError otherwise).
bool walk_prefix_coincidence(const Digraph& comp);

// ---------------------------------------------------------------------------
// odometers

// Finite stage data alpha(1), alpha(2), ... of an odometer, every entry >= 2.
struct OdometerSpec {
  std::vector<long long> alpha;
};

void validate_odometer(const OdometerSpec& spec);  // DomainError on bad entry

// m_i = alpha(1) * ... * alpha(i); DomainError on overflow
std::vector<long long> stage_periods(const OdometerSpec& spec);

// exact "+1" with carries; x has one coordinate per stage, each within range
std::vector<long long> odometer_step(const OdometerSpec& spec,
                                     std::vector<long long> x);

// Prime-power content of the stage data.  `saturated` marks a count that is
// only a lower bound (more stages pending beyond the finite data).
struct PrimeProfile {
  struct Entry {
    long long count = 0;
    bool saturated = false;
  };
  std::map<long long, Entry> primes;  // support restricted to primes <= bound
  long long bound = 0;
  bool pending = false;  // more stages exist beyond the recorded alpha
};

// Counts p-adic valuations across the finite alpha for all primes <= bound;
// `pending` marks every entry saturated (data truncates an infinite stream).
PrimeProfile M_profile(const OdometerSpec& spec, long long prime_bound,
                       bool pending = false);

enum class BsVerdict { Equal, Different, Inconclusive };

// Finite-data conjugacy comparison of two odometers: equal prime content
// means conjugate.  Saturated counts are lower bounds, so the comparison
// returns Inconclusive whenever saturation prevents an exact verdict and
// Different only on a certain disagreement.
BsVerdict bs_compare(const PrimeProfile& a, const PrimeProfile& b);

// ---------------------------------------------------------------------------
// limit-set covers

struct OmegaCovers {
  // covers[i] = the q_{i+1}!-cycle of clopen sets cyclically permuted by h
  // that traps the orbit tail at stage i+1
  std::vector<std::vector<Clopen>> covers;
  OdometerSpec alpha;                   // alpha(1) = q_1!, then ratios
  std::vector<Rat> meshes;              // max diam per stage (decreasing)
  std::vector<long long> settle_steps;  // first orbit index inside the cover
  std::vector<int> sides;               // 0 = left loop, 1 = right loop
  bool universal_divisibility = true;   // m! divides alpha(m+1) for all m
};

// Per stage, the loop certificate family eventually containing the orbit of
// x, verified to permute cyclically and to refine the previous stage.
// DomainError reports the stage and iteration count when the orbit has not
// settled into a certified loop within the horizon.
OmegaCovers omega_covers(const PrefixMap& h,
                         const std::vector<HomWitness>& ws, const Point& x,
                         std::size_t stages, long long horizon = 256);

// ---------------------------------------------------------------------------
// recurrence

struct NonrecurrentCert {
  std::size_t comp = 0;  // dumbbell component index
  std::string label;     // e.g. "h^-2(v1)", "v3", "h^1(vs)"
  Clopen set;
  // forward cell itinerary of the whole set to the escape horizon; the start
  // cell never recurs and the tail lies in the absorbing right loop
  std::vector<std::size_t> cells;
};

struct RecurrenceReport {
  std::vector<NonrecurrentCert> nonrecurrent;
  std::vector<std::size_t> loop_cells;  // possible-recurrence region
  long long period_bound = 0;           // exact periodic-point search bound
  bool periodic_point_found = false;    // evidence toward P(h) = {}
};

// The explicit nonrecurrent cell families of every dumbbell (loop preimages
// of the first bar cell, the bar, forward images of the last bar cell), each
// certified by its full escape itinerary, plus an exact fixed-point search
// of h^n for n <= period_bound.
RecurrenceReport recurrence_report(const PrefixMap& h, const HomWitness& w,
                                   long long period_bound);

// ---------------------------------------------------------------------------
// chain continuity

// Continuous case: valid at every point.  delta = min_gap(w.P); requires
// mesh(w.P) < eps.  The modulus is spot-verified by sampling `chains` random
// delta-chains of length `chain_len` from x and checking
// dist(x_n, f^n(x)) < eps exactly; a violation raises ContractViolation.
Rat chain_modulus(const PrefixMap& f, const ContWitness& w, const Point& x,
                  const Rat& eps, std::uint64_t seed = 1, int chains = 100,
                  int chain_len = 50);

// Homeomorphism case: valid at points certified nonrecurrent.  Bar and
// right-loop points use delta = min_gap(w.P); a left-loop point must escape
// to the bar within the horizon (otherwise DomainError "not certified
// nonrecurrent"), and delta shrinks to the min_gap of w.P refined by the
// escape rail h^{-j}(v_1), ..., v_1.
Rat chain_modulus(const PrefixMap& h, const HomWitness& w, const Point& x,
                  const Rat& eps, std::uint64_t seed = 1, int chains = 100,
                  int chain_len = 50);

// ---------------------------------------------------------------------------
// non-equicontinuity defect

struct DefectCert {
  Clopen core;      // Y_N = intersection of h^{-nr}(u_1) for n <= N
  Point y;          // point of the core: stays in the left loop >= stay_steps
  Point companion;  // nearby point whose orbit leaves the loop
  Rat pair_dist;    // dist(y, companion), bounded by the split cell diameter
  long long stay_steps = 0;
  long long exit_step = 0;  // step at which the companion enters the bar
};

// Finite-stage sensitivity certificate at the left loop of dumbbell `comp`:
// the truncated invariant core is nonempty, and an arbitrarily deep cell of
// it splits into a staying point and an escaping companion.  n_stage = 0
// returns the trivial certificate (core = u_1).
DefectCert equicontinuity_defect(const PrefixMap& h, const HomWitness& w,
                                 std::size_t comp, long long n_stage);

}  // namespace cantor
