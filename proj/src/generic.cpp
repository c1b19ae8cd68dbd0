#include "cantor/generic.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "cantor/approx.hpp"

namespace cantor {

namespace {

// Hard size limit on one stage of the generated hierarchies.  Stage m needs
// graphs whose plates carry q_m! vertices apiece, so the factorial schedule
// (2, 4, 12, ...) blows past any limit at stage 3; the generators report the
// achievable prefix instead of thrashing.
constexpr long long kMaxStageVertices = 2'000'000;

std::optional<long long> fact_checked(long long q) {
  long long f = 1;
  for (long long i = 2; i <= q; ++i) {
    if (f > kMaxStageVertices * 1000) return std::nullopt;
    f *= i;
  }
  return f;
}

Clopen image_n(const PrefixMap& f, Clopen x, long long n) {
  for (long long i = 0; i < n; ++i) x = image(f, x);
  return x;
}

Clopen preimage_n(const PrefixMap& f, Clopen x, long long n) {
  for (long long i = 0; i < n; ++i) x = preimage(f, x);
  return x;
}

// ---------------------------------------------------------------------------
// abstract stage graphs
//
// A stage of the dumbbell hierarchy is a disjoint union of balanced
// dumbbells (W, bar, W); vertices of one component are laid out as
// u_1..u_W, v_1..v_bar, w_1..w_W from `base`.  A stage of the balloon
// hierarchy uses balloons (bar = W, loop = W) laid out v_1..v_W, w_1..w_W.

struct StageComp {
  long long W = 0, bar = 0;
  std::size_t base = 0;
  std::size_t u(long long i) const { return base + (std::size_t)i; }
  std::size_t v(long long j) const { return base + (std::size_t)(W + j); }
  std::size_t w(long long i) const { return base + (std::size_t)(W + bar + i); }
  // balloon layout: bar then loop
  std::size_t bv(long long j) const { return base + (std::size_t)j; }
  std::size_t bw(long long i) const { return base + (std::size_t)(bar + i); }
};

struct Stage {
  std::vector<StageComp> comps;
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<std::size_t> nu;  // fine vertex -> coarse vertex; empty at stage 1
};

void dumbbell_edges(const StageComp& c, std::vector<Edge>& out) {
  for (long long i = 0; i < c.W; ++i) out.push_back({c.u(i), c.u((i + 1) % c.W)});
  out.push_back({c.u(0), c.bar > 0 ? c.v(0) : c.w(0)});
  for (long long j = 0; j + 1 < c.bar; ++j) out.push_back({c.v(j), c.v(j + 1)});
  if (c.bar > 0) out.push_back({c.v(c.bar - 1), c.w(0)});
  for (long long i = 0; i < c.W; ++i) out.push_back({c.w(i), c.w((i + 1) % c.W)});
}

void balloon_edges(const StageComp& c, std::vector<Edge>& out) {
  for (long long j = 0; j + 1 < c.bar; ++j) out.push_back({c.bv(j), c.bv(j + 1)});
  out.push_back({c.bv(c.bar - 1), c.bw(0)});
  for (long long i = 0; i < c.W; ++i) out.push_back({c.bw(i), c.bw((i + 1) % c.W)});
}

Stage first_hom_stage(long long W, long long bar) {
  Stage s;
  s.comps.push_back({W, bar, 0});
  s.n = (std::size_t)(2 * W + bar);
  dumbbell_edges(s.comps[0], s.edges);
  return s;
}

// Four fine dumbbells per coarse dumbbell: one whose image is the left
// plate cycle, one the right plate cycle, and two carried onto the whole
// coarse component (plates wrap the cycles, the bar core lies over the
// coarse bar, the flanks of length q wrap the cycles on each side).  The
// full-cover child appears twice so that every coarse cell splits into at
// least two fine cells — a single fine cell could not be made deeper than
// the coarse cell it equals, and the next stage needs a finer mesh.
Stage next_hom_stage(const Stage& coarse, long long Wf) {
  Stage s;
  s.nu.clear();
  for (const StageComp& c : coarse.comps) {
    long long q = c.W, L = c.bar, r = q;
    long long lf = L + 2 * r;
    for (int type : {1, 2, 3, 3}) {
      StageComp f{Wf, lf, s.n};
      s.n += (std::size_t)(2 * Wf + lf);
      dumbbell_edges(f, s.edges);
      s.nu.resize(s.n);
      if (type == 1 || type == 2) {
        auto cyc = [&](long long p) { return type == 1 ? c.u(p) : c.w(p); };
        for (long long i = 0; i < Wf; ++i) s.nu[f.u(i)] = cyc(i % q);
        for (long long j = 0; j < lf; ++j) s.nu[f.v(j)] = cyc((j + 1) % q);
        for (long long i = 0; i < Wf; ++i) s.nu[f.w(i)] = cyc((lf + 1 + i) % q);
      } else {
        for (long long i = 0; i < Wf; ++i) s.nu[f.u(i)] = c.u(i % q);
        for (long long j = 0; j < lf; ++j) {
          if (j < r) s.nu[f.v(j)] = c.u((j + 1) % q);
          else if (j < r + L) s.nu[f.v(j)] = c.v(j - r);
          else s.nu[f.v(j)] = c.w((j - r - L) % q);
        }
        for (long long i = 0; i < Wf; ++i) s.nu[f.w(i)] = c.w((r + i) % q);
      }
      s.comps.push_back(f);
    }
  }
  return s;
}

Stage first_cont_stage(long long W) {
  Stage s;
  s.comps.push_back({W, W, 0});
  s.n = (std::size_t)(2 * W);
  balloon_edges(s.comps[0], s.edges);
  return s;
}

// Two fine balloons per coarse vertex u: their walks start in u and are
// carried forward by the (functional) coarse successor, so the balloons
// starting at the coarse initial vertex cover every coarse edge.  Two per
// vertex (not one) so that every coarse cell splits into at least two fine
// cells; the bar head of a coarse balloon is visited only at walk start.
Stage next_cont_stage(const Stage& coarse, long long Wf) {
  Stage s;
  for (const StageComp& c : coarse.comps) {
    long long total = c.bar + c.W;
    auto sigma = [&](long long l) { return l + 1 < total ? l + 1 : c.bar; };
    for (long long u2 = 0; u2 < 2 * total; ++u2) {
      long long u0 = u2 / 2;
      StageComp f{Wf, Wf, s.n};
      s.n += (std::size_t)(2 * Wf);
      balloon_edges(f, s.edges);
      s.nu.resize(s.n);
      long long pos = u0;
      for (long long p = 0; p < 2 * Wf; ++p) {
        s.nu[f.base + (std::size_t)p] = c.base + (std::size_t)pos;
        pos = sigma(pos);
      }
      s.comps.push_back(f);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// nested cells: stage-1 cells split the space; each later stage splits every
// coarse cell into one piece per fine vertex above it, with pieces deep
// enough that mesh(P_m) < 1/m.

std::vector<std::vector<Clopen>> nested_cells(const std::vector<Stage>& stages,
                                              ChoiceStream& cs, const char* who) {
  std::vector<std::vector<Clopen>> cells(stages.size());
  for (std::size_t k = 0; k < stages.size(); ++k) {
    int m = (int)k + 1;
    try {
      cells[k].resize(stages[k].n);
      if (k == 0) {
        auto pieces = split_clopen(Clopen::whole(), stages[0].n, 1, &cs);
        cells[0] = std::move(pieces);
      } else {
        std::vector<std::vector<std::size_t>> fiber(stages[k - 1].n);
        for (std::size_t v = 0; v < stages[k].n; ++v)
          fiber[stages[k].nu[v]].push_back(v);
        for (std::size_t x = 0; x < stages[k - 1].n; ++x) {
          auto pieces = split_clopen(cells[k - 1][x], fiber[x].size(),
                                     (std::size_t)m, &cs);
          for (std::size_t i = 0; i < pieces.size(); ++i)
            cells[k][fiber[x][i]] = std::move(pieces[i]);
        }
      }
    } catch (const DepthOverflow&) {
      throw StageOverflow(std::string(who) + ": stage " + std::to_string(m) +
                              " exceeds the depth cap; achieved stage " +
                              std::to_string(m - 1),
                          m - 1);
    }
  }
  return cells;
}

// q_m = least multiple of m·q_{m-1} that is >= 2 (so 2, 4, 12, ...); throws
// StageOverflow when stage m's graph cannot be materialized.
struct Schedule {
  std::vector<long long> q, W;  // 1-based by stage
};

Schedule plan(int m_max, const char* who, long long comps_at,
              long long vertices_per_comp_bar0) {
  (void)comps_at;
  (void)vertices_per_comp_bar0;
  Schedule sc;
  sc.q.assign(m_max + 1, 1);
  sc.W.assign(m_max + 1, 1);
  for (int m = 1; m <= m_max; ++m) {
    long long qm = std::max<long long>(2, (long long)m * sc.q[m - 1]);
    auto f = fact_checked(qm);
    if (!f)
      throw StageOverflow(std::string(who) + ": stage " + std::to_string(m) +
                              " plate weight " + std::to_string(qm) +
                              "! is not representable; achieved stage " +
                              std::to_string(m - 1),
                          m - 1);
    sc.q[m] = qm;
    sc.W[m] = *f;
  }
  return sc;
}

void check_stage_size(long long projected, int m, const char* who) {
  if (projected > kMaxStageVertices)
    throw StageOverflow(std::string(who) + ": stage " + std::to_string(m) +
                            " needs " + std::to_string(projected) +
                            " cells, over the " +
                            std::to_string(kMaxStageVertices) + "-cell limit; " +
                            "achieved stage " + std::to_string(m - 1),
                        m - 1);
}

long long projected_hom_size(const Stage& coarse, long long Wf) {
  long long n = 0;
  for (const StageComp& c : coarse.comps) n += 4 * (2 * Wf + c.bar + 2 * c.W);
  return n;
}

long long projected_cont_size(const Stage& coarse, long long Wf) {
  long long n = 0;
  for (const StageComp& c : coarse.comps) n += 2 * (c.bar + c.W) * 2 * Wf;
  return n;
}

Clopen comp_union(const Partition& P, const Component& c) {
  std::vector<Word> ws;
  for (std::size_t v : c.verts)
    for (const Word& w : P.cell(v).cyls()) ws.push_back(w);
  return Clopen(std::move(ws));
}

}  // namespace

// ---------------------------------------------------------------------------
// attach_loops

AttachResult attach_loops_certified(const PrefixMap& g, const Partition& P) {
  if (!g.is_homeo()) throw DomainError("attach_loops: map is not a homeomorphism");
  Digraph G = build_gr(g, P);
  auto comps = components(G);

  std::vector<Rule> rules;
  std::vector<Word> rewritten;  // cylinders of all rewritten cells
  std::vector<LoopPair> loops;
  for (const Component& c : comps) {
    ComponentKind ck = classify(c.graph);
    if (ck.kind != ComponentKind::Dumbbell)
      throw DomainError("attach_loops: component is " + ck.str() +
                        ", not a dumbbell");
    long long W = ck.r, T = ck.t;
    const Clopen& u1 = P.cell(c.verts[ck.u[0]]);
    const Clopen& uW = P.cell(c.verts[ck.u[(std::size_t)W - 1]]);
    const Clopen& wT = P.cell(c.verts[ck.w[(std::size_t)T - 1]]);

    // left loop: a is a proper piece of the cell that feeds u_2 from u_1;
    // the plate chain g^{W-1}(a) lands in u_W, where the new map sends it
    // back onto a, giving h^W(a) = a exactly.
    Clopen pre;
    if (W >= 2)
      pre = set_intersect(preimage(g, P.cell(c.verts[ck.u[1]])), u1);
    else
      pre = set_intersect(image(g, u1), u1);  // self-loop plate
    if (pre.is_empty())
      throw ContractViolation("attach_loops: empty loop seed region");
    Clopen a(pre.cyls()[0].append(0));  // may throw DepthOverflow
    Clopen ca = image_n(g, a, W - 1);
    Clopen guW = image(g, uW);
    for (Rule& r : match_clopens(ca, a)) rules.push_back(std::move(r));
    for (Rule& r : match_clopens(set_subtract(uW, ca), set_subtract(guW, a)))
      rules.push_back(std::move(r));

    // right loop inside the image of the last right plate
    Clopen gwT = image(g, wT);
    Clopen b(gwT.cyls()[0].append(0));
    Clopen cb = image_n(g, b, T - 1);
    for (Rule& r : match_clopens(cb, b)) rules.push_back(std::move(r));
    for (Rule& r : match_clopens(set_subtract(wT, cb), set_subtract(gwT, b)))
      rules.push_back(std::move(r));

    for (const Word& w : uW.cyls()) rewritten.push_back(w);
    for (const Word& w : wT.cyls()) rewritten.push_back(w);
    loops.push_back(LoopPair{std::move(a), std::move(b)});
  }

  Clopen untouched = set_complement(Clopen(std::move(rewritten)));
  if (!untouched.is_empty())
    for (Rule& r : restrict_rules(g, untouched)) rules.push_back(std::move(r));
  PrefixMap h(std::move(rules));
  if (!h.is_homeo() || !(build_gr(h, P) == G))
    throw ContractViolation("attach_loops: rebuilt map broke the digraph");
  return AttachResult{std::move(h), std::move(loops)};
}

PrefixMap attach_loops(const PrefixMap& g, const Partition& P) {
  return attach_loops_certified(g, P).h;
}

// ---------------------------------------------------------------------------
// generic_hom

HomGeneric generic_hom(int m_max, std::uint64_t seed) {
  if (m_max < 1) throw DomainError("generic_hom: m_max must be positive");
  Schedule sc = plan(m_max, "generic_hom", 0, 0);
  ChoiceStream cs(seed);

  std::vector<Stage> stages;
  for (int m = 1; m <= m_max; ++m) {
    check_stage_size(m == 1 ? 2 * sc.W[1] + 3
                            : projected_hom_size(stages.back(), sc.W[m]),
                     m, "generic_hom");
    stages.push_back(m == 1 ? first_hom_stage(sc.W[1], 3)
                            : next_hom_stage(stages.back(), sc.W[m]));
  }
  auto cells = nested_cells(stages, cs, "generic_hom");

  const Stage& fine = stages.back();
  Partition Pf(cells.back());
  Realization rz = realize(Digraph(fine.n, fine.edges, cells.back()));
  if (!rz.X.is_empty() || !rz.f.is_homeo())
    throw ContractViolation("generic_hom: realization is not a homeomorphism");
  AttachResult ar = attach_loops_certified(rz.f, Pf);

  HomGeneric out{std::move(ar.h), {}};
  for (int m = 1; m <= m_max; ++m) {
    HomWitness w{Partition(cells[(std::size_t)m - 1]), sc.q[m], {}};
    if (m == m_max) {
      w.loops = ar.loops;
    } else {
      // cascade: the type-3 descendant chain of component ci keeps its
      // loop seed inside this stage's u_1 / w_1, and the union of every
      // q_m!-step image of the fine loop is fixed by h^{q_m!}.
      long long Wm = sc.W[m], Wfin = sc.W[m_max];
      for (std::size_t ci = 0; ci < stages[(std::size_t)m - 1].comps.size(); ++ci) {
        std::size_t idx = ci;
        for (int k = m; k < m_max; ++k) idx = 4 * idx + 2;
        auto cascade = [&](const Clopen& seed) {
          Clopen acc = seed, cur = seed;
          for (long long step = 1; step <= Wfin; ++step) {
            cur = image(out.h, cur);
            if (step % Wm == 0 && step < Wfin) acc = set_union(acc, cur);
          }
          if (!(cur == seed))
            throw ContractViolation("generic_hom: loop seed failed to return");
          return acc;
        };
        w.loops.push_back(
            LoopPair{cascade(ar.loops[idx].a), cascade(ar.loops[idx].b)});
      }
    }
    out.witnesses.push_back(std::move(w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// checkers

CheckResult check_property_P(const PrefixMap& h, const HomWitness& w, int m) {
  if (m < 1) return {false, "stage must be positive"};
  if (!(mesh(w.P) < Rat::one_over(m))) return {false, "mesh(P) is not below 1/m"};
  if (w.q <= 0 || w.q % m != 0) return {false, "q is not a positive multiple of m"};
  auto Wq = fact_checked(w.q);
  auto comps = components(build_gr(h, w.P));
  if (w.loops.size() != comps.size())
    return {false, "witness needs one loop pair per component"};
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::string tag = "component " + std::to_string(i);
    ComponentKind ck = classify(comps[i].graph);
    if (ck.kind != ComponentKind::Dumbbell)
      return {false, tag + " is " + ck.str() + ", not a dumbbell"};
    if (!ck.balanced() || !Wq || ck.r != (long long)*Wq)
      return {false, tag + " is not balanced with plate weight q!"};
    const LoopPair& lp = w.loops[i];
    const Clopen& u1 = w.P.cell(comps[i].verts[ck.u[0]]);
    const Clopen& w1 = w.P.cell(comps[i].verts[ck.w[0]]);
    if (lp.a.is_empty() || !subset(lp.a, u1))
      return {false, tag + ": left loop set is not a nonempty subset of u_1"};
    if (!(image_n(h, lp.a, ck.r) == lp.a))
      return {false, tag + ": left loop set does not return exactly"};
    if (lp.b.is_empty() || !subset(lp.b, w1))
      return {false, tag + ": right loop set is not a nonempty subset of w_1"};
    if (!(image_n(h, lp.b, ck.t) == lp.b))
      return {false, tag + ": right loop set does not return exactly"};
  }
  return {true, ""};
}

// ---------------------------------------------------------------------------
// bar increasing

Partition increase_bar(const PrefixMap& h, const Partition& P, std::size_t comp,
                       Side side) {
  auto comps = components(build_gr(h, P));
  if (comp >= comps.size()) throw DomainError("increase_bar: no such component");
  ComponentKind ck = classify(comps[comp].graph);
  if (ck.kind != ComponentKind::Dumbbell)
    throw DomainError("increase_bar: component is " + ck.str() +
                      ", not a dumbbell");
  auto gv = [&](std::size_t local) { return comps[comp].verts[local]; };

  std::size_t pos;
  Clopen first, second;
  if (side == Side::Left) {
    pos = gv(ck.u[0]);
    const Clopen& u1 = P.cell(pos);
    std::size_t u2 = gv(ck.u[1 % (std::size_t)ck.r]);
    std::size_t barhead = ck.s > 0 ? gv(ck.v[0]) : gv(ck.w[0]);
    first = set_intersect(preimage(h, P.cell(u2)), u1);    // stays on the cycle
    second = set_intersect(preimage(h, P.cell(barhead)), u1);  // new bar head
  } else {
    pos = gv(ck.w[0]);
    const Clopen& w1 = P.cell(pos);
    std::size_t barend = ck.s > 0 ? gv(ck.v[(std::size_t)ck.s - 1]) : gv(ck.u[0]);
    std::size_t wT = gv(ck.w[(std::size_t)ck.t - 1]);
    second = set_intersect(image(h, P.cell(barend)), w1);  // new bar end
    first = set_intersect(image(h, P.cell(wT)), w1);       // stays on the cycle
  }
  const Clopen& old = P.cell(pos);
  if (first.is_empty() || second.is_empty() ||
      !(set_union(first, second) == old))
    throw ContractViolation("increase_bar: cell did not split into two parts");

  std::vector<Clopen> cells;
  cells.reserve(P.size() + 1);
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (i == pos) {
      cells.push_back(side == Side::Left ? first : second);
      cells.push_back(side == Side::Left ? second : first);
    } else {
      cells.push_back(P.cell(i));
    }
  }
  Partition Pn(std::move(cells));

  // the reshaped component must classify as the same dumbbell with bar +1
  auto comps2 = components(build_gr(h, Pn));
  for (const Component& c : comps2) {
    bool mine = false;
    for (std::size_t v : c.verts)
      if (subset(Pn.cell(v), comp_union(P, comps[comp]))) { mine = true; break; }
    if (!mine) continue;
    ComponentKind ck2 = classify(c.graph);
    if (ck2.kind != ComponentKind::Dumbbell || ck2.r != ck.r ||
        ck2.t != ck.t || ck2.s != ck.s + 1)
      throw ContractViolation("increase_bar: refined component has wrong shape");
    return Pn;
  }
  throw ContractViolation("increase_bar: refined component vanished");
}

// ---------------------------------------------------------------------------
// h-regularity

namespace {

// Searches for a nonempty clopen a ⊆ cell with h^n(a) = a.  The full
// invariant set of h^n inside the cell is rarely clopen, but a loop set is a
// finite family of cylinders permuted cyclically by h^n.  So: shrink the cell
// a few rounds (X -> cell ∩ h^n(X) ∩ h^{-n}(X)) until the loop cylinders
// surface as maximal cylinders, then follow each cylinder's orbit under h^n;
// any orbit that stays a single cylinder inside the cell and revisits a word
// closes into an exactly fixed clopen set.  Sound but bounded: a miss after
// the caps below reports the loop as absent.
bool has_loop(const PrefixMap& h, const Clopen& cell, long long n) {
  try {
    Clopen X = cell;
    for (int it = 0; it < 16; ++it) {
      Clopen Y = set_intersect(
          cell, set_intersect(image_n(h, X, n), preimage_n(h, X, n)));
      if (Y.is_empty()) return false;
      if (Y == X) return true;  // X itself is exactly fixed by h^n
      X = std::move(Y);
    }
    std::size_t seeds = 0;
    for (const Word& seed : X.cyls()) {
      if (++seeds > 64) break;
      std::vector<Word> orbit{seed};
      bool alive = true;
      for (int step = 0; alive && step < 64; ++step) {
        Clopen img = image_n(h, Clopen(orbit.back()), n);
        if (img.cyls().size() != 1 || !subset(img, cell)) { alive = false; break; }
        const Word& w = img.cyls()[0];
        if (std::find(orbit.begin(), orbit.end(), w) != orbit.end()) return true;
        orbit.push_back(w);
      }
    }
  } catch (const DepthOverflow&) {
  }
  return false;
}

}  // namespace

std::optional<long long> h_regular(const PrefixMap& h, const Partition& P) {
  auto comps = components(build_gr(h, P));
  long long W = -1;
  for (const Component& c : comps) {
    ComponentKind ck = classify(c.graph);
    if (ck.kind != ComponentKind::Dumbbell || !ck.balanced()) return std::nullopt;
    if (W < 0) W = ck.r;
    if (ck.r != W) return std::nullopt;
    if (!has_loop(h, P.cell(c.verts[ck.u[0]]), ck.r)) return std::nullopt;
    if (!has_loop(h, P.cell(c.verts[ck.w[0]]), ck.t)) return std::nullopt;
  }
  return W;
}

// ---------------------------------------------------------------------------
// subdumbbell classification

namespace {

struct CompView {
  Component comp;
  ComponentKind ck;
};

CompView view(const PrefixMap& h, const Partition& P, std::size_t i,
              const char* who) {
  auto comps = components(build_gr(h, P));
  if (i >= comps.size()) throw DomainError(std::string(who) + ": no such component");
  CompView cv{comps[i], {}};
  cv.ck = classify(cv.comp.graph);
  return cv;
}

Clopen cells_union(const Partition& P, const Component& c,
                   const std::vector<std::size_t>& locals) {
  std::vector<Word> ws;
  for (std::size_t l : locals)
    for (const Word& w : P.cell(c.verts[l]).cyls()) ws.push_back(w);
  return Clopen(std::move(ws));
}

}  // namespace

SubdumbbellType subdumbbell_type(const PrefixMap& h, const Partition& fine,
                                 const Partition& coarse, std::size_t comp_fine,
                                 std::size_t comp_coarse) {
  if (!refines(fine, coarse))
    throw DomainError("subdumbbell: fine partition does not refine the coarse one");
  CompView cc = view(h, coarse, comp_coarse, "subdumbbell");
  if (cc.ck.kind != ComponentKind::Dumbbell)
    throw DomainError("subdumbbell: coarse component is not a dumbbell");
  CompView cf = view(h, fine, comp_fine, "subdumbbell");
  if (cf.ck.kind != ComponentKind::Dumbbell)
    throw DomainError("subdumbbell: fine component is not a dumbbell");
  long long q = cc.ck.r;
  if (cf.ck.r % q != 0)
    throw DomainError("subdumbbell: plate weights are not aligned");

  Clopen left = cells_union(coarse, cc.comp, cc.ck.u);
  Clopen bar = cells_union(coarse, cc.comp, cc.ck.v);
  Clopen right = cells_union(coarse, cc.comp, cc.ck.w);
  Clopen Uf = comp_union(fine, cf.comp);
  if (!subset(Uf, set_union(set_union(left, bar), right)))
    throw DomainError("subdumbbell: fine component is not inside the coarse one");

  int type = subset(Uf, left) ? 1 : subset(Uf, right) ? 2 : 3;

  Partition Pf = fine;
  CompView cur = cf;
  auto relocate = [&](const Partition& P2) {
    auto comps = components(build_gr(h, P2));
    for (std::size_t i = 0; i < comps.size(); ++i)
      if (overlaps(comp_union(P2, comps[i]), Uf))
        return CompView{comps[i], classify(comps[i].graph)};
    throw ContractViolation("subdumbbell: component lost while normalizing");
  };
  auto comp_index = [&](const Partition& P2, const CompView& cv) {
    auto comps = components(build_gr(h, P2));
    for (std::size_t i = 0; i < comps.size(); ++i)
      if (comps[i].verts == cv.comp.verts) return i;
    throw ContractViolation("subdumbbell: component index lost");
  };
  auto bump = [&](Side side) {
    Pf = increase_bar(h, Pf, comp_index(Pf, cur), side);
    cur = relocate(Pf);
  };
  const Clopen& target_u = type == 2 ? coarse.cell(cc.comp.verts[cc.ck.w[0]])
                                     : coarse.cell(cc.comp.verts[cc.ck.u[0]]);
  for (long long guard = 0;
       !subset(Pf.cell(cur.comp.verts[cur.ck.u[0]]), target_u); ++guard) {
    if (guard > cf.ck.r) throw ContractViolation("subdumbbell: u_1 never aligned");
    bump(Side::Left);
  }
  long long flank = 0;
  if (type == 3) {
    const Clopen& target_w = coarse.cell(cc.comp.verts[cc.ck.w[0]]);
    for (long long guard = 0;
         !subset(Pf.cell(cur.comp.verts[cur.ck.w[0]]), target_w); ++guard) {
      if (guard > cf.ck.t) throw ContractViolation("subdumbbell: w_1 never aligned");
      bump(Side::Right);
    }
    // center the bar: count flank cells lying over the coarse plates
    auto flanks = [&]() -> std::pair<long long, long long> {
      long long lead = 0, trail = 0;
      long long s = cur.ck.s;
      for (long long j = 0; j < s; ++j) {
        if (subset(Pf.cell(cur.comp.verts[cur.ck.v[(std::size_t)j]]), left)) ++lead;
        else break;
      }
      for (long long j = s - 1; j >= 0; --j) {
        if (subset(Pf.cell(cur.comp.verts[cur.ck.v[(std::size_t)j]]), right)) ++trail;
        else break;
      }
      if (lead + cc.ck.s + trail != s)
        throw ContractViolation("subdumbbell: bar core misaligned");
      return {lead, trail};
    };
    auto [lead, trail] = flanks();
    long long delta = trail - lead;
    if (delta % q != 0)
      throw ContractViolation("subdumbbell: flank difference not a plate multiple");
    for (long long i = 0; i < delta; ++i) bump(Side::Left);
    for (long long i = 0; i < -delta; ++i) bump(Side::Right);
    auto [lead2, trail2] = flanks();
    if (lead2 != trail2)
      throw ContractViolation("subdumbbell: centering failed");
    flank = lead2;
  }
  std::size_t idx = comp_index(Pf, cur);
  return SubdumbbellType{type, std::move(Pf), idx, flank};
}

// ---------------------------------------------------------------------------
// generic_cont

ContGeneric generic_cont(int m_max, std::uint64_t seed) {
  if (m_max < 1) throw DomainError("generic_cont: m_max must be positive");
  Schedule sc = plan(m_max, "generic_cont", 0, 0);
  ChoiceStream cs(seed);

  std::vector<Stage> stages;
  for (int m = 1; m <= m_max; ++m) {
    check_stage_size(m == 1 ? 2 * sc.W[1]
                            : projected_cont_size(stages.back(), sc.W[m]),
                     m, "generic_cont");
    stages.push_back(m == 1 ? first_cont_stage(sc.W[1])
                            : next_cont_stage(stages.back(), sc.W[m]));
  }
  auto cells = nested_cells(stages, cs, "generic_cont");

  const Stage& fine = stages.back();
  Digraph H(fine.n, fine.edges, cells.back());
  Realization rz = realize(H);

  // strictness: send each cell into a proper subcylinder of itself, so every
  // transition image is a proper subset of its target cell
  std::vector<Rule> collapse;
  for (const Clopen& c : cells.back()) {
    Clopen deep(c.cyls()[0].append(0));
    for (Rule& r : match_clopens(c, deep)) collapse.push_back(std::move(r));
  }
  PrefixMap f = compose(rz.f, PrefixMap(std::move(collapse)));
  Partition Pf(cells.back());
  if (!(build_gr(f, Pf) == Digraph(fine.n, fine.edges, cells.back())))
    throw ContractViolation("generic_cont: collapse changed the digraph");

  ContGeneric out{std::move(f), {}};
  for (int m = 1; m <= m_max; ++m)
    out.witnesses.push_back(
        ContWitness{Partition(cells[(std::size_t)m - 1]), sc.q[m]});
  return out;
}

CheckResult strict_check(const PrefixMap& f, const Partition& P, std::size_t comp) {
  auto comps = components(build_gr(f, P));
  if (comp >= comps.size()) throw DomainError("strict_check: no such component");
  ComponentKind ck = classify(comps[comp].graph);
  if (ck.kind != ComponentKind::Balloon)
    return {false, "component is " + ck.str() + ", not a balloon"};
  auto cell = [&](std::size_t local) -> const Clopen& {
    return P.cell(comps[comp].verts[local]);
  };
  auto proper = [&](const Clopen& img, const Clopen& target) {
    return subset(img, target) && !(img == target);
  };
  for (long long i = 0; i + 1 < ck.s; ++i)
    if (!proper(image(f, cell(ck.v[(std::size_t)i])), cell(ck.v[(std::size_t)i + 1])))
      return {false, "f(v_" + std::to_string(i + 1) + ") is not proper in v_" +
                         std::to_string(i + 2)};
  for (long long j = 0; j + 1 < ck.t; ++j)
    if (!proper(image(f, cell(ck.w[(std::size_t)j])), cell(ck.w[(std::size_t)j + 1])))
      return {false, "f(w_" + std::to_string(j + 1) + ") is not proper in w_" +
                         std::to_string(j + 2)};
  Clopen last = set_union(image(f, cell(ck.v[(std::size_t)ck.s - 1])),
                          image(f, cell(ck.w[(std::size_t)ck.t - 1])));
  if (!proper(last, cell(ck.w[0])))
    return {false, "f(v_s) ∪ f(w_t) is not proper in w_1"};
  return {true, ""};
}

CheckResult check_property_Q(const PrefixMap& f, const ContWitness& w, int m) {
  if (m < 1) return {false, "stage must be positive"};
  if (!(mesh(w.P) < Rat::one_over(m))) return {false, "mesh(P) is not below 1/m"};
  if (w.q <= 0 || w.q % m != 0) return {false, "q is not a positive multiple of m"};
  auto Wq = fact_checked(w.q);
  auto comps = components(build_gr(f, w.P));
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::string tag = "component " + std::to_string(i);
    ComponentKind ck = classify(comps[i].graph);
    if (ck.kind != ComponentKind::Balloon)
      return {false, tag + " is " + ck.str() + ", not a balloon"};
    if (!Wq || ck.s != (long long)*Wq || ck.t != (long long)*Wq)
      return {false, tag + " is not a balloon of type (q!, q!)"};
    CheckResult st = strict_check(f, w.P, i);
    if (!st.ok) return {false, tag + ": " + st.reason};
  }
  return {true, ""};
}

std::optional<long long> f_admissible(const PrefixMap& f, const Partition& P) {
  auto comps = components(build_gr(f, P));
  long long k = -1;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    ComponentKind ck = classify(comps[i].graph);
    if (ck.kind != ComponentKind::Balloon || ck.s != ck.t) return std::nullopt;
    if (k < 0) k = ck.s;
    if (ck.s != k) return std::nullopt;
    if (!strict_check(f, P, i).ok) return std::nullopt;
  }
  return k;
}

std::size_t subballoon_type(const PrefixMap& f, const Partition& fine,
                            const Partition& coarse, std::size_t comp_fine,
                            std::size_t comp_coarse) {
  CompView cf = view(f, fine, comp_fine, "subballoon");
  if (cf.ck.kind != ComponentKind::Balloon)
    throw DomainError("subballoon: fine component is not a balloon");
  CompView cc = view(f, coarse, comp_coarse, "subballoon");
  if (cc.ck.kind != ComponentKind::Balloon)
    throw DomainError("subballoon: coarse component is not a balloon");
  const Clopen& init = fine.cell(cf.comp.verts[cf.ck.v[0]]);
  for (std::size_t v : cc.comp.verts)
    if (subset(init, coarse.cell(v))) return v;
  throw DomainError("subballoon: initial vertex not inside the coarse component");
}

}  // namespace cantor
