// Constructive realization and approximation:
//  - realize a right-end-free digraph over a partition as a prefix map,
//  - covering parameters and disjoint balloon/dumbbell covers of a digraph,
//  - lifting a surjective graph map to a refined partition and a new map,
//  - ε-approximation of a map by one whose transition digraph consists of
//    exactly k disjoint balloons or dumbbells of prescribed type.

#pragma once

#include <optional>

#include "cantor/digraph.hpp"

namespace cantor {

struct Realization {
  PrefixMap f;
  Clopen X;  // union of left-end cells; f maps the space onto its complement
};

// G must carry cell labels forming a partition and have no right ends
Realization realize(const Digraph& G);

struct EdgeParams {
  long long S = 1, M = 1, N = 1;
  // balloon witness: u_1 = u, u_2 = v, ..., u_{S+1}, ..., u_{S+M+1} with
  // u_{S+M+1} = u_{S+1}; the dumbbell witness prepends the closed walk
  // u_0, ..., u_N = u_0 = u
  std::vector<std::size_t> walk;
};

// smallest bar offset S and pseudo-loop length M (and left pseudo-loop
// length N in the dumbbell case) admitting a pseudo-balloon/pseudo-dumbbell
// through the edge e
EdgeParams edge_params(const Digraph& G, Edge e, bool dumbbell);

struct CoverParams {
  long long K = 1, S = 1, M = 1, N = 1;
};

// K = edge count, S = max over edges, M (and N) = lcm over edges
CoverParams cover_params(const Digraph& G, bool dumbbell);

struct ShapeCover {
  Digraph H;     // k disjoint balloons of type (s,m) or dumbbells (n,s,m)
  GraphMap phi;  // surjective graph map H -> G; shape i hits edge e_i
};

// requires k >= K, s >= S, m a positive multiple of M (and n of N)
ShapeCover shapes_onto(const Digraph& G, bool dumbbell, long long k, long long s,
                       long long m, long long n = 1);

struct RefinedRealization {
  Partition P;                   // refines Q
  std::vector<std::size_t> psi;  // bijection: P-cell index -> vertex of G
  PrefixMap g;                   // build_gr(g, P) isomorphic to G via psi
  Rat bound;                     // mesh(Q) + mesh(f(Q)), with sup_dist(f,g) <= bound
};

// phi must be a surjective graph map from G onto build_gr(f, Q)
RefinedRealization refine_realize(const PrefixMap& f, const Partition& Q,
                                  const Digraph& G, const GraphMap& phi);

struct ApproxOverrides {
  std::optional<long long> k, s, m, n;
};

struct Approximation {
  PrefixMap g;
  Partition P;
  Partition Q;  // the uniform-continuity partition the lift refined
  CoverParams params;
  long long k = 0, s = 0, m = 0, n = 0;  // the shape type actually used
  Rat bound;                             // mesh(Q) + mesh(f(Q)) < eps
};

// sup_dist(f,g) < eps, mesh(P) < eps, build_gr(g,P) = exactly k disjoint
// shapes of the requested kind; dumbbell kind requires f a homeomorphism
Approximation approximate(const PrefixMap& f, const Rat& eps, bool dumbbell,
                          const ApproxOverrides& ov = {});

}  // namespace cantor
