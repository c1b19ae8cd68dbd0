#include "cantor/approx.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace cantor {

Realization realize(const Digraph& G) {
  auto [lefts, rights] = ends(G);
  if (!rights.empty()) throw DomainError("realize: right end present");
  Partition P = G.partition();
  std::size_t n = G.num_vertices();

  std::vector<char> is_left(n, 0);
  std::vector<Word> xw;
  for (std::size_t v : lefts) {
    is_left[v] = 1;
    xw.insert(xw.end(), G.label(v).cyls().begin(), G.label(v).cyls().end());
  }
  Clopen X(std::move(xw));

  // out-pieces per vertex, in-pieces per non-left-end vertex; vertices of
  // degree one use their label directly
  std::vector<std::vector<Clopen>> out_pieces(n), in_pieces(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (G.out_deg(v) > 1) out_pieces[v] = split_clopen(G.label(v), G.out_deg(v));
    if (!is_left[v] && G.in_deg(v) > 1)
      in_pieces[v] = split_clopen(G.label(v), G.in_deg(v));
  }

  // per-edge pairing x_e -> y_e; edges() is sorted, so slot counters give a
  // deterministic assignment
  std::vector<std::size_t> out_slot(n, 0), in_slot(n, 0);
  std::vector<Rule> rules;
  rules.reserve(G.edges().size());
  for (const Edge& e : G.edges()) {
    const Clopen& xe = out_pieces[e.first].empty() ? G.label(e.first)
                                                   : out_pieces[e.first][out_slot[e.first]];
    const Clopen& ye = in_pieces[e.second].empty() ? G.label(e.second)
                                                   : in_pieces[e.second][in_slot[e.second]];
    ++out_slot[e.first];
    ++in_slot[e.second];
    if (xe.cyls().size() == 1 && ye.cyls().size() == 1) {
      rules.push_back(Rule{xe.cyls()[0], ye.cyls()[0]});
    } else {
      auto rs = match_clopens(xe, ye);
      rules.insert(rules.end(), rs.begin(), rs.end());
    }
  }
  return Realization{PrefixMap(std::move(rules)), X};
}

namespace {

constexpr std::size_t kNone = (std::size_t)-1;

// Per-digraph analysis shared by the pseudo-loop searches.  Precomputes, in
// near-linear time, the strongly connected components, which vertices lie on
// a cycle, and for every vertex the distance to its nearest on-cycle vertices
// together with the minimal cycle length available there -- forward along
// successors (d, m, hop) and backward along predecessors (dr, mr, hopr).
struct ParamCache {
  const Digraph& g;
  std::vector<std::size_t> scc;    // component id per vertex
  std::vector<std::size_t> size;   // per component
  std::vector<char> cyclic;        // component contains a cycle
  std::vector<char> simple;        // component is a single simple cycle
  std::vector<std::vector<std::size_t>> ring;  // cycle order of simple sccs
  std::vector<std::size_t> ring_pos;           // position of v in its ring
  std::map<std::size_t, std::vector<std::size_t>> walk_memo;
  std::vector<long long> len_memo;  // min cycle length per on-cycle vertex

  std::vector<long long> d, m, dr, mr;
  std::vector<std::size_t> hop, hopr;
  std::vector<std::size_t> bfs_parent;  // scratch for cyc_walk

  explicit ParamCache(const Digraph& G) : g(G) {
    tarjan();
    per_component_stats();
    nearest(/*forward=*/true, d, m, hop);
    nearest(/*forward=*/false, dr, mr, hopr);
  }

  bool on_cycle(std::size_t v) const { return cyclic[scc[v]]; }

  // length of the shortest closed walk through on-cycle x
  long long cyc_len(std::size_t x) {
    if (!on_cycle(x)) return -1;
    if (simple[scc[x]]) return (long long)size[scc[x]];
    if (len_memo[x] >= 0) return len_memo[x];
    return len_memo[x] = (long long)cyc_walk(x).size();
  }

  // one shortest closed walk (x, ..., last) with the closing edge implicit
  std::vector<std::size_t> cyc_walk(std::size_t x) {
    std::size_t c = scc[x];
    if (simple[c]) {  // rotate the ring so x comes first
      const std::vector<std::size_t>& r = ring[c];
      std::vector<std::size_t> w(r.begin() + (long)ring_pos[x], r.end());
      w.insert(w.end(), r.begin(), r.begin() + (long)ring_pos[x]);
      return w;
    }
    auto it = walk_memo.find(x);
    if (it != walk_memo.end()) return it->second;
    // BFS within the component; the first return to x closes a minimal cycle
    if (bfs_parent.empty()) bfs_parent.assign(g.num_vertices(), kNone);
    std::vector<std::size_t> touched, frontier{x};
    std::vector<std::size_t> walk;
    while (!frontier.empty() && walk.empty()) {
      std::vector<std::size_t> next;
      for (std::size_t v : frontier) {
        for (std::size_t u : g.succ(v)) {
          if (u == x) {
            for (std::size_t w = v; w != x; w = bfs_parent[w]) walk.push_back(w);
            walk.push_back(x);
            std::reverse(walk.begin(), walk.end());
            break;
          }
          if (bfs_parent[u] == kNone && scc[u] == c) {
            bfs_parent[u] = v;
            touched.push_back(u);
            next.push_back(u);
          }
        }
        if (!walk.empty()) break;
      }
      frontier = std::move(next);
    }
    for (std::size_t u : touched) bfs_parent[u] = kNone;
    if (walk.empty())
      throw ContractViolation("pseudo-loop search: cyclic vertex has no cycle");
    walk_memo.emplace(x, walk);
    return walk;
  }

 private:
  void tarjan() {
    std::size_t n = g.num_vertices();
    scc.assign(n, kNone);
    std::vector<std::size_t> index(n, kNone), low(n, 0), stck;
    std::vector<char> on(n, 0);
    std::size_t idx = 0, ncomp = 0;
    std::vector<std::pair<std::size_t, std::size_t>> frames;  // (vertex, next child)
    for (std::size_t s = 0; s < n; ++s) {
      if (index[s] != kNone) continue;
      index[s] = low[s] = idx++;
      stck.push_back(s);
      on[s] = 1;
      frames.push_back({s, 0});
      while (!frames.empty()) {
        std::size_t v = frames.back().first;
        const auto& out = g.succ(v);
        if (frames.back().second < out.size()) {
          std::size_t u = out[frames.back().second++];
          if (index[u] == kNone) {
            index[u] = low[u] = idx++;
            stck.push_back(u);
            on[u] = 1;
            frames.push_back({u, 0});
          } else if (on[u]) {
            low[v] = std::min(low[v], index[u]);
          }
        } else {
          if (low[v] == index[v]) {
            std::size_t w;
            do {
              w = stck.back();
              stck.pop_back();
              on[w] = 0;
              scc[w] = ncomp;
            } while (w != v);
            ++ncomp;
          }
          frames.pop_back();
          if (!frames.empty()) {
            std::size_t p = frames.back().first;
            low[p] = std::min(low[p], low[v]);
          }
        }
      }
    }
    size.assign(ncomp, 0);
    cyclic.assign(ncomp, 0);
    simple.assign(ncomp, 0);
    for (std::size_t v = 0; v < n; ++v) ++size[scc[v]];
  }

  void per_component_stats() {
    std::size_t n = g.num_vertices();
    std::vector<std::size_t> inner(size.size(), 0);
    for (const Edge& e : g.edges())
      if (scc[e.first] == scc[e.second]) ++inner[scc[e.first]];
    for (std::size_t v = 0; v < n; ++v)
      if (size[scc[v]] > 1 || g.has_edge(v, v)) cyclic[scc[v]] = 1;
    for (std::size_t c = 0; c < size.size(); ++c)
      simple[c] = cyclic[c] && inner[c] == size[c];
    // cycle order of each simple component, starting at its smallest vertex
    ring.assign(size.size(), {});
    ring_pos.assign(n, kNone);
    std::vector<char> started(size.size(), 0);
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t c = scc[v];
      if (!simple[c] || started[c]) continue;
      started[c] = 1;
      std::size_t w = v;
      do {
        ring_pos[w] = ring[c].size();
        ring[c].push_back(w);
        for (std::size_t u : g.succ(w))
          if (scc[u] == c) {
            w = u;
            break;
          }
      } while (w != v);
    }
    len_memo.assign(n, -1);
  }

  // dist[v]: steps to the nearest on-cycle vertex along successors (forward)
  // or predecessors (backward); best[v]: minimal cycle length over those
  // nearest vertices; step[v]: neighbour advancing toward one achieving it
  void nearest(bool forward, std::vector<long long>& dist, std::vector<long long>& best,
               std::vector<std::size_t>& step) {
    std::size_t n = g.num_vertices();
    dist.assign(n, -1);
    best.assign(n, -1);
    step.assign(n, kNone);
    std::vector<std::vector<std::size_t>> layers(1);
    for (std::size_t v = 0; v < n; ++v)
      if (on_cycle(v)) {
        dist[v] = 0;
        best[v] = cyc_len(v);
        layers[0].push_back(v);
      }
    for (std::size_t t = 0; !layers[t].empty(); ++t) {
      layers.emplace_back();
      for (std::size_t v : layers[t])
        for (std::size_t p : forward ? g.pred(v) : g.succ(v))
          if (dist[p] < 0) {
            dist[p] = (long long)t + 1;
            layers[t + 1].push_back(p);
          }
      for (std::size_t p : layers[t + 1])
        for (std::size_t u : forward ? g.succ(p) : g.pred(p))
          if (dist[u] == (long long)t &&
              (best[p] < 0 || best[u] < best[p] ||
               (best[u] == best[p] && u < step[p]))) {
            best[p] = best[u];
            step[p] = u;
          }
    }
  }
};

}  // namespace

namespace {

void check_ends(const Digraph& G, bool dumbbell) {
  auto [lefts, rights] = ends(G);
  if (!rights.empty()) throw DomainError("edge_params: right end present");
  if (dumbbell && !lefts.empty()) throw DomainError("edge_params: left end present");
}

EdgeParams edge_params_impl(ParamCache& C, Edge e, bool dumbbell) {
  const Digraph& G = C.g;
  if (!G.has_edge(e.first, e.second)) throw DomainError("edge_params: no such edge");

  EdgeParams r;
  std::size_t v = e.second;
  if (C.d[v] < 0) throw ContractViolation("edge_params: no pseudo-loop reachable");
  r.S = C.d[v] + 1;
  r.M = C.m[v];
  // witness: u_1 = u, u_2 = v, bar to the anchor, cycle, back to the anchor
  std::vector<std::size_t> bar{v};
  while (C.d[bar.back()] > 0) bar.push_back(C.hop[bar.back()]);
  std::vector<std::size_t> cyc = C.cyc_walk(bar.back());
  r.walk.push_back(e.first);
  r.walk.insert(r.walk.end(), bar.begin(), bar.end());
  r.walk.insert(r.walk.end(), cyc.begin() + 1, cyc.end());
  r.walk.push_back(bar.back());  // u_{S+M+1} = u_{S+1}

  if (dumbbell) {
    // walk leftward from u to the nearest vertex on a cycle: the bar gains
    // those vertices and the left cycle is prepended
    std::size_t u = e.first;
    if (C.dr[u] < 0) throw ContractViolation("edge_params: no left pseudo-loop reachable");
    std::vector<std::size_t> back{u};  // u, ..., left anchor
    while (C.dr[back.back()] > 0) back.push_back(C.hopr[back.back()]);
    std::vector<std::size_t> lcyc = C.cyc_walk(back.back());
    r.N = (long long)lcyc.size();
    // full pseudo-dumbbell: u_0..u_{N-1} left cycle, u_N = anchor, then the
    // path to u and the balloon walk built above
    std::vector<std::size_t> w(lcyc.begin(), lcyc.end());
    for (std::size_t i = back.size(); i-- > 1;) w.push_back(back[i]);
    w.insert(w.end(), r.walk.begin(), r.walk.end());
    r.walk = std::move(w);
    r.S += (long long)(back.size() - 1);
  }
  return r;
}

CoverParams cover_params_impl(ParamCache& C, bool dumbbell) {
  CoverParams p;
  p.K = (long long)C.g.edges().size();
  if (p.K == 0) throw DomainError("cover_params: digraph has no edges");
  p.S = 1;
  p.M = 1;
  p.N = 1;
  for (const Edge& e : C.g.edges()) {
    EdgeParams ep = edge_params_impl(C, e, dumbbell);
    p.S = std::max(p.S, ep.S);
    p.M = std::lcm(p.M, ep.M);
    if (dumbbell) p.N = std::lcm(p.N, ep.N);
  }
  return p;
}

}  // namespace

EdgeParams edge_params(const Digraph& G, Edge e, bool dumbbell) {
  check_ends(G, dumbbell);
  ParamCache C(G);
  return edge_params_impl(C, e, dumbbell);
}

CoverParams cover_params(const Digraph& G, bool dumbbell) {
  check_ends(G, dumbbell);
  ParamCache C(G);
  return cover_params_impl(C, dumbbell);
}

namespace {

Digraph balloon_graph(long long s, long long m) {
  std::vector<Edge> es;
  for (long long i = 0; i + 1 < s; ++i) es.push_back({(std::size_t)i, (std::size_t)(i + 1)});
  es.push_back({(std::size_t)(s - 1), (std::size_t)s});
  for (long long i = 0; i < m; ++i)
    es.push_back({(std::size_t)(s + i), (std::size_t)(s + (i + 1) % m)});
  return Digraph((std::size_t)(s + m), std::move(es));
}

Digraph dumbbell_graph(long long r, long long s, long long m) {
  std::vector<Edge> es;
  for (long long i = 0; i < r; ++i)
    es.push_back({(std::size_t)i, (std::size_t)((i + 1) % r)});
  es.push_back({0, (std::size_t)r});
  for (long long i = 0; i + 1 < s; ++i)
    es.push_back({(std::size_t)(r + i), (std::size_t)(r + i + 1)});
  es.push_back({(std::size_t)(r + s - 1), (std::size_t)(r + s)});
  for (long long i = 0; i < m; ++i)
    es.push_back({(std::size_t)(r + s + i), (std::size_t)(r + s + (i + 1) % m)});
  return Digraph((std::size_t)(r + s + m), std::move(es));
}

}  // namespace

ShapeCover shapes_onto(const Digraph& G, bool dumbbell, long long k, long long s,
                       long long m, long long n) {
  check_ends(G, dumbbell);
  ParamCache C(G);
  CoverParams cp = cover_params_impl(C, dumbbell);
  auto legal = [&](const std::string& what) {
    throw DomainError("shapes_onto: " + what + " (minimal legal values: K=" +
                      std::to_string(cp.K) + ", S=" + std::to_string(cp.S) + ", M=" +
                      std::to_string(cp.M) +
                      (dumbbell ? ", N=" + std::to_string(cp.N) : "") + ")");
  };
  if (k < cp.K) legal("k below the edge count K");
  if (s < cp.S) legal("s below S");
  if (m <= 0 || m % cp.M != 0) legal("m not a positive multiple of M");
  if (dumbbell && (n <= 0 || n % cp.N != 0)) legal("n not a positive multiple of N");

  long long shape_sz = (dumbbell ? n : 0) + s + m;
  std::vector<Edge> es;
  std::vector<std::size_t> vmap;
  for (long long i = 0; i < k; ++i) {
    const Edge e = G.edges()[(std::size_t)(i < cp.K ? i : 0)];  // extras copy shape 1
    EdgeParams ep = edge_params_impl(C, e, dumbbell);
    std::size_t off = (std::size_t)(i * shape_sz);
    Digraph shape = dumbbell ? dumbbell_graph(n, s, m) : balloon_graph(s, m);
    for (const Edge& se : shape.edges()) es.push_back({se.first + off, se.second + off});

    long long S = ep.S, M = ep.M, N = ep.N;
    if (dumbbell) {
      // walk positions: 0..N-1 left cycle, N = anchor, bar to the right
      // anchor at N+S+1, then the right cycle
      auto W = [&](long long p) -> std::size_t {  // p >= 0, W(0) = left anchor
        if (p <= S + 1) return ep.walk[(std::size_t)(N + p)];
        return ep.walk[(std::size_t)(N + S + 1 + (p - S - 1) % M)];
      };
      for (long long j = 1; j <= n; ++j)
        vmap.push_back(ep.walk[(std::size_t)((j - 1) % N)]);         // left loop
      for (long long j = 1; j <= s; ++j) vmap.push_back(W(j));       // bar
      for (long long j = 1; j <= m; ++j) vmap.push_back(W(s + j));   // right loop
    } else {
      // walk positions: 0 = u, 1 = v, ..., S = anchor, then the cycle
      auto W = [&](long long p) -> std::size_t {  // p >= 1, W(1) = u
        if (p <= S + 1) return ep.walk[(std::size_t)(p - 1)];
        return ep.walk[(std::size_t)(S + (p - S - 1) % M)];
      };
      for (long long j = 1; j <= s; ++j) vmap.push_back(W(j));  // bar, v_1 = u
      for (long long j = 1; j <= m; ++j) vmap.push_back(W(s + j));
    }
  }
  Digraph H((std::size_t)(k * shape_sz), std::move(es));
  GraphMap phi{H, G, std::move(vmap)};
  GraphMapCheck chk = check_graph_map(phi);
  if (!chk.edges_ok || !chk.surjective)
    throw ContractViolation("shapes_onto: constructed map failed validation");
  return ShapeCover{std::move(H), std::move(phi)};
}

RefinedRealization refine_realize(const PrefixMap& f, const Partition& Q,
                                  const Digraph& G, const GraphMap& phi) {
  Digraph grq = build_gr(f, Q);
  if (!(phi.target == grq) || phi.source.num_vertices() != G.num_vertices() ||
      !(phi.source == G))
    throw DomainError("refine_realize: phi is not a map from G onto gr(f,Q)");
  GraphMapCheck chk = check_graph_map(phi);
  if (!chk.edges_ok) throw DomainError("refine_realize: phi is not a graph map");
  if (!chk.surjective) throw DomainError("refine_realize: phi is not surjective");
  auto [lefts, rights] = ends(G);
  if (!rights.empty()) throw DomainError("refine_realize: G has a right end");

  // split each Q-cell into |phi^{-1}(a)| pieces and assign vertices in order
  std::vector<std::vector<std::size_t>> fibers(Q.size());
  for (std::size_t v = 0; v < G.num_vertices(); ++v)
    fibers[phi.vertex_map[v]].push_back(v);

  std::vector<Clopen> pcells;
  std::vector<std::size_t> psi;
  for (std::size_t a = 0; a < Q.size(); ++a) {
    if (fibers[a].empty())
      throw ContractViolation("refine_realize: empty fiber despite surjectivity");
    auto pieces = split_clopen(Q.cell(a), fibers[a].size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      pcells.push_back(std::move(pieces[i]));
      psi.push_back(fibers[a][i]);
    }
  }
  Partition P(std::move(pcells));

  // H: the copy of G whose vertex set is P (vertex i of H = P-cell i)
  std::vector<std::size_t> inv(G.num_vertices());
  for (std::size_t i = 0; i < psi.size(); ++i) inv[psi[i]] = i;
  std::vector<Edge> hes;
  hes.reserve(G.edges().size());
  for (const Edge& e : G.edges()) hes.push_back({inv[e.first], inv[e.second]});
  Digraph H(P, std::move(hes));

  Realization rz = realize(H);
  Rat bound = mesh(Q) + mesh(image_cells(f, Q));
  return RefinedRealization{std::move(P), std::move(psi), std::move(rz.f), bound};
}

namespace {

void choose_cells(const PrefixMap& f, const Word& w, const Rat& half,
                  std::vector<Clopen>& out) {
  if (Rat::one_over(w.size() + 1) < half) {
    Clopen img = image(f, Clopen(w));
    if (diam(img) < half) {
      out.emplace_back(w);
      return;
    }
  }
  choose_cells(f, w.append(0), half, out);  // throws DepthOverflow at the cap
  choose_cells(f, w.append(1), half, out);
}

}  // namespace

Approximation approximate(const PrefixMap& f, const Rat& eps, bool dumbbell,
                          const ApproxOverrides& ov) {
  if (!(Rat::zero() < eps)) throw DomainError("approximate: eps must be positive");
  if (dumbbell && !f.is_homeo())
    throw DomainError("approximate: dumbbell shape needs a homeomorphism");

  // partition by uniform continuity: each cell and its image diameter < eps/2
  Rat half = eps * Rat(1, 2);
  std::vector<Clopen> qcells;
  choose_cells(f, Word(), half, qcells);
  Partition Q(std::move(qcells));

  Digraph grq = build_gr(f, Q);
  CoverParams cp = cover_params(grq, dumbbell);
  long long k = ov.k.value_or(cp.K), s = ov.s.value_or(cp.S), m = ov.m.value_or(cp.M),
            n = ov.n.value_or(cp.N);
  ShapeCover cover = shapes_onto(grq, dumbbell, k, s, m, n);
  RefinedRealization rr = refine_realize(f, Q, cover.H, cover.phi);

  Approximation res{std::move(rr.g), std::move(rr.P), std::move(Q), cp,
                    k,               s,               m,            dumbbell ? n : 0,
                    rr.bound};
  return res;
}

}  // namespace cantor
