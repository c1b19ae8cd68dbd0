// Transition digraphs of prefix maps over clopen partitions, their
// decomposition into weak components, and the loop / balloon / dumbbell
// shape classification.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cantor/prefix_map.hpp"

namespace cantor {

using Edge = std::pair<std::size_t, std::size_t>;

class Digraph {
 public:
  // labels, when given, must be one clopen per vertex and form a partition
  Digraph(std::size_t n, std::vector<Edge> edges, std::vector<Clopen> labels = {});
  // labels taken from an already-validated partition, one cell per vertex;
  // skips the label checks and keeps the partition for partition()
  Digraph(Partition P, std::vector<Edge> edges);

  std::size_t num_vertices() const { return impl_->n; }
  const std::vector<Edge>& edges() const { return impl_->edges; }  // sorted, unique
  bool has_edge(std::size_t a, std::size_t b) const;
  std::size_t out_deg(std::size_t v) const {
    return impl_->out_off[v + 1] - impl_->out_off[v];
  }
  std::size_t in_deg(std::size_t v) const {
    return impl_->in_off[v + 1] - impl_->in_off[v];
  }
  std::span<const std::size_t> succ(std::size_t v) const {
    return {impl_->out_adj.data() + impl_->out_off[v], out_deg(v)};
  }
  std::span<const std::size_t> pred(std::size_t v) const {
    return {impl_->in_adj.data() + impl_->in_off[v], in_deg(v)};
  }

  bool labeled() const { return impl_->part.has_value() || !impl_->labels.empty(); }
  const std::vector<Clopen>& labels() const {
    return impl_->part ? impl_->part->cells() : impl_->labels;
  }
  const Clopen& label(std::size_t v) const { return labels()[v]; }
  Partition partition() const;  // requires labels

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.impl_ == b.impl_ ||
           (a.impl_->n == b.impl_->n && a.impl_->edges == b.impl_->edges &&
            a.labels() == b.labels());
  }

 private:
  // immutable after construction, so copies of a digraph share one body
  struct Impl {
    std::size_t n = 0;
    std::vector<Edge> edges;
    std::vector<Clopen> labels;
    std::optional<Partition> part;
    // flat compressed adjacency: neighbours of v sit in adj[off[v], off[v+1])
    std::vector<std::size_t> out_off, out_adj, in_off, in_adj;
  };
  static void build_adjacency(Impl& im);
  std::shared_ptr<const Impl> impl_;
};

// transition digraph over P: vertex per cell, edge (a,b) iff f(a) meets b
Digraph build_gr(const PrefixMap& f, const Partition& P);

// a weak component, with its vertex ids in the parent digraph
struct Component {
  Digraph graph;                    // vertices renumbered 0..k-1
  std::vector<std::size_t> verts;   // verts[i] = parent id of vertex i
};
std::vector<Component> components(const Digraph& g);

// vertices of g with no incoming / no outgoing edge
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> ends(const Digraph& g);

struct ComponentKind {
  enum Kind { Loop, Balloon, Dumbbell, Other } kind = Other;
  // Loop(n): r = n.  Balloon(s,t): bar s, loop t.  Dumbbell(r,s,t): left
  // loop r, bar s, right loop t.
  int r = 0, s = 0, t = 0;
  // witness vertex sequences: u = left loop (u[0] has out-degree 2 in a
  // dumbbell), v = bar, w = right loop (w[0] has in-degree 2)
  std::vector<std::size_t> u, v, w;

  bool balanced() const { return kind == Dumbbell && r == t; }
  int plate_weight() const { return r; }
  std::string str() const;
};

// exact structural match of a single weak component
ComponentKind classify(const Digraph& c);

struct GraphMap {
  Digraph source, target;
  std::vector<std::size_t> vertex_map;  // source vertex -> target vertex
};

struct GraphMapCheck {
  bool edges_ok = false;
  bool surjective = false;
  Edge violation{0, 0};  // meaningful when !edges_ok
};
GraphMapCheck check_graph_map(const GraphMap& m);

// the containment map gr(f, fine) -> gr(f, coarse); throws DomainError when
// fine does not refine coarse
GraphMap refinement_graph_map(const PrefixMap& f, const Partition& fine,
                              const Partition& coarse);

// true iff m is a vertex bijection carrying the edge set of a exactly onto
// the edge set of b
bool isomorphic_via(const Digraph& a, const Digraph& b,
                    const std::vector<std::size_t>& m);

// deterministic DOT rendering; vertices labeled with their cell antichains
// when present, weak components emitted as clusters tagged with their kind
std::string to_dot(const Digraph& g);

}  // namespace cantor
