#include "cantor/digraph.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

namespace cantor {

Digraph::Digraph(std::size_t n, std::vector<Edge> edges, std::vector<Clopen> labels) {
  Impl im;
  im.n = n;
  im.edges = std::move(edges);
  im.labels = std::move(labels);
  if (!im.labels.empty()) {
    if (im.labels.size() != im.n) throw DomainError("digraph: label count mismatch");
    // disjointness: in the combined sorted word list, a prefix pair from
    // different labels is an overlap (within one canonical clopen none exist)
    std::vector<std::pair<Word, std::size_t>> all;
    for (std::size_t i = 0; i < im.n; ++i) {
      if (im.labels[i].is_empty()) throw DomainError("digraph: empty cell label");
      for (const Word& w : im.labels[i].cyls()) all.push_back({w, i});
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
      if (all[i].second != all[i + 1].second &&
          all[i].first.is_prefix_of(all[i + 1].first))
        throw DomainError("digraph: overlapping cell labels");
  }
  build_adjacency(im);
  impl_ = std::make_shared<const Impl>(std::move(im));
}

Digraph::Digraph(Partition P, std::vector<Edge> edges) {
  Impl im;
  im.n = P.size();
  im.edges = std::move(edges);
  im.part = std::move(P);
  build_adjacency(im);
  impl_ = std::make_shared<const Impl>(std::move(im));
}

void Digraph::build_adjacency(Impl& im) {
  std::sort(im.edges.begin(), im.edges.end());
  im.edges.erase(std::unique(im.edges.begin(), im.edges.end()), im.edges.end());
  for (const Edge& e : im.edges)
    if (e.first >= im.n || e.second >= im.n) throw DomainError("digraph: bad vertex id");
  im.out_off.assign(im.n + 1, 0);
  im.in_off.assign(im.n + 1, 0);
  for (const Edge& e : im.edges) {
    ++im.out_off[e.first + 1];
    ++im.in_off[e.second + 1];
  }
  for (std::size_t v = 0; v < im.n; ++v) {
    im.out_off[v + 1] += im.out_off[v];
    im.in_off[v + 1] += im.in_off[v];
  }
  im.out_adj.resize(im.edges.size());
  im.in_adj.resize(im.edges.size());
  std::vector<std::size_t> opos(im.out_off.begin(), im.out_off.end() - 1);
  std::vector<std::size_t> ipos(im.in_off.begin(), im.in_off.end() - 1);
  for (const Edge& e : im.edges) {
    im.out_adj[opos[e.first]++] = e.second;
    im.in_adj[ipos[e.second]++] = e.first;
  }
}

bool Digraph::has_edge(std::size_t a, std::size_t b) const {
  return std::binary_search(impl_->edges.begin(), impl_->edges.end(), Edge{a, b});
}

Partition Digraph::partition() const {
  if (impl_->part) return *impl_->part;
  if (impl_->labels.empty()) throw DomainError("digraph: no cell labels");
  return Partition(impl_->labels);
}

Digraph build_gr(const PrefixMap& f, const Partition& P) {
  CellLookup lk(P);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < P.size(); ++a) {
    Clopen img = image(f, P.cell(a));
    std::vector<std::size_t> hit;
    for (const Word& w : img.cyls())
      for (std::size_t b : lk.cells_meeting(w)) hit.push_back(b);
    std::sort(hit.begin(), hit.end());
    hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
    for (std::size_t b : hit) edges.push_back({a, b});
  }
  return Digraph(P, std::move(edges));
}

std::vector<Component> components(const Digraph& g) {
  std::size_t n = g.num_vertices();
  std::vector<std::size_t> comp(n, n);
  std::size_t ncomp = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != n) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u : g.succ(v))
        if (comp[u] == n) { comp[u] = ncomp; stack.push_back(u); }
      for (std::size_t u : g.pred(v))
        if (comp[u] == n) { comp[u] = ncomp; stack.push_back(u); }
    }
    ++ncomp;
  }
  // single pass: bucket vertices and edges by component
  std::vector<std::vector<std::size_t>> verts(ncomp);
  std::vector<std::size_t> local(n);
  for (std::size_t v = 0; v < n; ++v) {
    local[v] = verts[comp[v]].size();
    verts[comp[v]].push_back(v);
  }
  std::vector<std::vector<Edge>> edges(ncomp);
  for (const Edge& e : g.edges())
    edges[comp[e.first]].push_back({local[e.first], local[e.second]});
  std::vector<Component> out;
  out.reserve(ncomp);
  for (std::size_t c = 0; c < ncomp; ++c) {
    std::vector<Clopen> labels;
    if (g.labeled())
      for (std::size_t v : verts[c]) labels.push_back(g.label(v));
    out.push_back(Component{Digraph(verts[c].size(), std::move(edges[c]), std::move(labels)),
                            std::move(verts[c])});
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> ends(const Digraph& g) {
  std::vector<std::size_t> left, right;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (g.in_deg(v) == 0) left.push_back(v);
    if (g.out_deg(v) == 0) right.push_back(v);
  }
  return {left, right};
}

std::string ComponentKind::str() const {
  switch (kind) {
    case Loop: return "Loop(" + std::to_string(r) + ")";
    case Balloon: return "Balloon(" + std::to_string(s) + "," + std::to_string(t) + ")";
    case Dumbbell:
      return "Dumbbell(" + std::to_string(r) + "," + std::to_string(s) + "," +
             std::to_string(t) + ")";
    default: return "Other";
  }
}

namespace {

// follow unique out-edges from `from` until hitting `stop_a` or `stop_b`;
// returns the intermediate vertices, or nullopt when a vertex without
// out-degree 1 is met first
std::optional<std::vector<std::size_t>> walk_until(const Digraph& g, std::size_t from,
                                                   std::size_t stop_a, std::size_t stop_b,
                                                   std::size_t limit) {
  std::vector<std::size_t> path;
  std::size_t v = from;
  while (v != stop_a && v != stop_b) {
    if (g.out_deg(v) != 1 || path.size() > limit) return std::nullopt;
    path.push_back(v);
    v = g.succ(v)[0];
  }
  path.push_back(v);  // the stop vertex itself
  return path;
}

}  // namespace

ComponentKind classify(const Digraph& c) {
  std::size_t n = c.num_vertices();
  if (components(c).size() != 1) throw DomainError("classify: not a single component");
  ComponentKind k;

  // all degrees 1 except the given vertices (pass n for "no exception")
  auto all_ones_except = [&](std::size_t exc_out, std::size_t exc_in) {
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t eo = (v == exc_out) ? 2 : 1, ei = (v == exc_in) ? 2 : 1;
      if (c.out_deg(v) != eo || c.in_deg(v) != ei) return false;
    }
    return true;
  };

  // Loop(n): all degrees 1, one cycle through every vertex
  if (c.edges().size() == n && all_ones_except(n, n)) {
    auto cyc = walk_until(c, c.succ(0)[0], 0, 0, n);
    if (cyc && cyc->size() == n) {
      k.kind = ComponentKind::Loop;
      k.r = (int)n;
      k.u.push_back(0);
      for (std::size_t i = 0; i + 1 < cyc->size(); ++i) k.u.push_back((*cyc)[i]);
      return k;
    }
    return k;
  }

  std::vector<std::size_t> lefts, rights;
  std::tie(lefts, rights) = ends(c);
  if (!rights.empty()) return k;

  std::size_t out2 = n, in2 = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (c.out_deg(v) == 2) out2 = (out2 == n) ? v : SIZE_MAX;
    if (c.in_deg(v) == 2) in2 = (in2 == n) ? v : SIZE_MAX;
  }
  if (out2 == SIZE_MAX || in2 == SIZE_MAX) return k;

  // Balloon(s,t): one left end, a bar walking into a loop at the in-2 vertex
  if (lefts.size() == 1 && out2 == n && in2 < n && c.edges().size() == n) {
    std::size_t v1 = lefts[0];
    if (c.in_deg(v1) != 0) return k;
    for (std::size_t v = 0; v < n; ++v) {
      if (c.out_deg(v) != 1) return k;
      if (v != v1 && v != in2 && c.in_deg(v) != 1) return k;
    }
    auto bar = walk_until(c, v1, in2, in2, n);          // v_1 .. v_s, w_1
    auto loop = walk_until(c, c.succ(in2)[0], in2, in2, n);  // w_2 .. w_t, w_1
    if (!bar || !loop) return k;
    std::size_t s = bar->size() - 1, t = loop->size();
    if (s + t != n || s == 0) return k;
    k.kind = ComponentKind::Balloon;
    k.s = (int)s;
    k.t = (int)t;
    k.v.assign(bar->begin(), bar->end() - 1);
    k.w.push_back(in2);
    for (std::size_t i = 0; i + 1 < loop->size(); ++i) k.w.push_back((*loop)[i]);
    return k;
  }

  // Dumbbell(r,s,t): no ends, u_1 the unique out-2 vertex, w_1 the unique
  // in-2 vertex, left loop through u_1, bar from u_1 to w_1, right loop
  // through w_1
  if (lefts.empty() && out2 < n && in2 < n && out2 != in2 &&
      c.edges().size() == n + 1 && all_ones_except(out2, in2)) {
    std::vector<std::size_t> left_loop, bar;
    for (std::size_t nxt : c.succ(out2)) {
      std::size_t start = nxt;
      if (start == out2) {  // self-loop at u_1
        left_loop = {out2};
        continue;
      }
      auto p = walk_until(c, start, out2, in2, n);
      if (!p) return k;
      if (p->back() == out2) {
        left_loop.push_back(out2);
        left_loop.insert(left_loop.end(), p->begin(), p->end() - 1);
      } else {
        bar.assign(p->begin(), p->end() - 1);  // may be empty (s = 0)
      }
    }
    if (left_loop.empty()) return k;
    std::vector<std::size_t> right_loop{in2};
    if (c.succ(in2)[0] != in2) {
      auto p = walk_until(c, c.succ(in2)[0], in2, in2, n);
      if (!p || p->back() != in2) return k;
      right_loop.insert(right_loop.end(), p->begin(), p->end() - 1);
    }
    if (left_loop.size() + bar.size() + right_loop.size() != n) return k;
    k.kind = ComponentKind::Dumbbell;
    k.r = (int)left_loop.size();
    k.s = (int)bar.size();
    k.t = (int)right_loop.size();
    k.u = std::move(left_loop);
    k.v = std::move(bar);
    k.w = std::move(right_loop);
    return k;
  }

  return k;
}

GraphMapCheck check_graph_map(const GraphMap& m) {
  GraphMapCheck r;
  if (m.vertex_map.size() != m.source.num_vertices())
    throw DomainError("graph map: vertex map not total");
  for (std::size_t v : m.vertex_map)
    if (v >= m.target.num_vertices()) throw DomainError("graph map: bad target vertex");
  r.edges_ok = true;
  for (const Edge& e : m.source.edges())
    if (!m.target.has_edge(m.vertex_map[e.first], m.vertex_map[e.second])) {
      r.edges_ok = false;
      r.violation = e;
      break;
    }
  std::vector<char> hit(m.target.num_vertices(), 0);
  for (std::size_t v : m.vertex_map) hit[v] = 1;
  r.surjective = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
  return r;
}

GraphMap refinement_graph_map(const PrefixMap& f, const Partition& fine,
                              const Partition& coarse) {
  std::vector<std::size_t> vm;
  try {
    vm = refinement_map(fine, coarse);
  } catch (const DomainError&) {
    throw DomainError("refinement_graph_map: not a refinement");
  }
  GraphMap m{build_gr(f, fine), build_gr(f, coarse), std::move(vm)};
  GraphMapCheck chk = check_graph_map(m);
  if (!chk.edges_ok || !chk.surjective)
    throw ContractViolation("refinement graph map failed validation");
  return m;
}

bool isomorphic_via(const Digraph& a, const Digraph& b, const std::vector<std::size_t>& m) {
  if (a.num_vertices() != b.num_vertices() || m.size() != a.num_vertices()) return false;
  std::vector<char> hit(b.num_vertices(), 0);
  for (std::size_t v : m) {
    if (v >= b.num_vertices() || hit[v]) return false;
    hit[v] = 1;
  }
  if (a.edges().size() != b.edges().size()) return false;
  for (const Edge& e : a.edges())
    if (!b.has_edge(m[e.first], m[e.second])) return false;
  return true;
}

std::string to_dot(const Digraph& g) {
  std::string s = "digraph gr {\n";
  auto comps = components(g);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    ComponentKind k = classify(comps[c].graph);
    s += "  subgraph cluster_" + std::to_string(c) + " {\n";
    s += "    label=\"" + k.str() + "\";\n";
    for (std::size_t i = 0; i < comps[c].verts.size(); ++i) {
      std::size_t v = comps[c].verts[i];
      s += "    v" + std::to_string(v);
      if (g.labeled()) s += " [label=\"" + g.label(v).str() + "\"]";
      s += ";\n";
    }
    s += "  }\n";
  }
  for (const Edge& e : g.edges())
    s += "  v" + std::to_string(e.first) + " -> v" + std::to_string(e.second) + ";\n";
  s += "}\n";
  return s;
}

}  // namespace cantor
