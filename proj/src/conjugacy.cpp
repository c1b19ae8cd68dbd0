#include "cantor/conjugacy.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace cantor {

namespace {

const char* side_name(bool f_side) { return f_side ? "P" : "Q"; }

// refinement ancestry along one side of the schedule: steps[k] maps cells of
// the stage-(k+2) partition to cells of the stage-(k+1) partition
struct Chain {
  std::vector<Partition> parts;               // parts[k] = stage k+1
  std::vector<std::vector<std::size_t>> steps;

  // cell of the stage-n partition containing cell b of the stage-m partition
  std::size_t anc(std::size_t m, std::size_t n, std::size_t b) const {
    for (std::size_t k = m - 1; k > n - 1; --k) b = steps[k - 1][b];
    return b;
  }
};

Chain make_chain(const ConjugacySchedule& s, bool f_side) {
  Chain c;
  for (std::size_t n = 1; n <= s.size(); ++n)
    c.parts.push_back(f_side ? s.P(n) : s.Q(n));
  for (std::size_t k = 0; k + 1 < c.parts.size(); ++k)
    c.steps.push_back(refinement_map(c.parts[k + 1], c.parts[k]));
  return c;
}

// the cell-level map of stage m: source cell -> target cell
const std::vector<std::size_t>& vmap(const ConjugacySchedule& s, std::size_t m) {
  return s.nus[m - 1].vertex_map;
}

}  // namespace

Partition ConjugacySchedule::P(std::size_t n) const {
  const GraphMap& gm = nus.at(n - 1);
  return f_source(n) ? gm.source.partition() : gm.target.partition();
}

Partition ConjugacySchedule::Q(std::size_t n) const {
  const GraphMap& gm = nus.at(n - 1);
  return f_source(n) ? gm.target.partition() : gm.source.partition();
}

void validate_schedule(const ConjugacySchedule& s) {
  if (s.nus.empty()) throw DomainError("schedule: no stages");
  for (std::size_t n = 1; n <= s.size(); ++n) {
    const GraphMap& gm = s.nus[n - 1];
    if (!gm.source.labeled() || !gm.target.labeled())
      throw DomainError("schedule: stage " + std::to_string(n) +
                        " graphs carry no partitions");
    if (gm.vertex_map.size() != gm.source.num_vertices())
      throw DomainError("schedule: stage " + std::to_string(n) +
                        " vertex map has wrong size");
    GraphMapCheck chk = check_graph_map(gm);
    if (!chk.edges_ok)
      throw DomainError("schedule: stage " + std::to_string(n) +
                        " map does not preserve edges");
    if (!chk.surjective)
      throw DomainError("schedule: stage " + std::to_string(n) +
                        " map is not surjective");
    if (!s.alternating) {
      if (gm.source.num_vertices() != gm.target.num_vertices())
        throw DomainError("schedule: stage " + std::to_string(n) +
                          " map is not an isomorphism");
    }
  }
  for (bool f_side : {true, false}) {
    for (std::size_t n = 1; n + 1 <= s.size(); ++n) {
      Partition coarse = f_side ? s.P(n) : s.Q(n);
      Partition fine = f_side ? s.P(n + 1) : s.Q(n + 1);
      if (!refines(fine, coarse))
        throw DomainError(std::string("schedule: ") + side_name(f_side) + "_" +
                          std::to_string(n + 1) + " does not refine " +
                          side_name(f_side) + "_" + std::to_string(n));
    }
  }
}

// ---------------------------------------------------------------------------
// condition (ii): the inclusion families.  Every family reduces to a
// cell-level statement through the refinement ancestries: a fine image cell
// must sit inside the coarse image cell of its ancestor.

CommuteWitness commutes_check(const ConjugacySchedule& s) {
  validate_schedule(s);
  Chain cp = make_chain(s, true), cq = make_chain(s, false);
  auto fail = [](std::size_t n, std::size_t m, std::size_t cell,
                 std::string detail) {
    return CommuteWitness{false, n, m, cell, std::move(detail)};
  };
  for (std::size_t n = 1; n <= s.size(); ++n) {
    bool n_f = s.f_source(n);
    const Chain& src = n_f ? cp : cq;   // side carrying the stage-n cells a
    const Chain& dst = n_f ? cq : cp;   // side carrying nu_n(a)
    for (std::size_t m = n + 1; m <= s.size(); ++m) {
      bool m_f = s.f_source(m);
      if (m_f == n_f) {
        // same direction: nu_m(a) must lie inside nu_n(a)
        const Partition& Pm = src.parts[m - 1];
        for (std::size_t b = 0; b < Pm.size(); ++b) {
          std::size_t a = src.anc(m, n, b);
          if (dst.anc(m, n, vmap(s, m)[b]) != vmap(s, n)[a])
            return fail(n, m, a,
                        "nu_" + std::to_string(m) + "(cell " +
                            std::to_string(b) + ") escapes nu_" +
                            std::to_string(n) + "(cell " + std::to_string(a) +
                            ")");
        }
      } else {
        // opposite direction: nu_m^{-1}(a) must lie inside nu_n(a)
        const Partition& Sm = dst.parts[m - 1];  // stage-m source cells c
        for (std::size_t c = 0; c < Sm.size(); ++c) {
          std::size_t a = src.anc(m, n, vmap(s, m)[c]);
          if (dst.anc(m, n, c) != vmap(s, n)[a])
            return fail(n, m, a,
                        "nu_" + std::to_string(m) + "^{-1}(cell " +
                            std::to_string(a) + ") contains cell " +
                            std::to_string(c) + " outside nu_" +
                            std::to_string(n) + "(cell " + std::to_string(a) +
                            ")");
        }
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// condition (i): the stage squares j_n = nu_n ∘ i_n ∘ nu_{n+1} (alternating)
// or j_n ∘ nu_{n+1} = nu_n ∘ i_n (iso)

CommuteWitness commutes_cond_i(const ConjugacySchedule& s) {
  validate_schedule(s);
  Chain cp = make_chain(s, true), cq = make_chain(s, false);
  for (std::size_t n = 1; n + 1 <= s.size(); ++n) {
    bool n_f = s.f_source(n);
    const Chain& src = n_f ? cp : cq;
    const Chain& dst = n_f ? cq : cp;
    std::size_t fine = dst.parts[n].size();
    for (std::size_t c = 0; c < fine; ++c) {
      std::size_t lhs, rhs;
      if (s.alternating) {  // j_n(c) = nu_n(i_n(nu_{n+1}(c)))
        lhs = dst.steps[n - 1][c];
        rhs = vmap(s, n)[src.steps[n - 1][vmap(s, n + 1)[c]]];
      } else {  // j_n(nu_{n+1}(b)) = nu_n(i_n(b)) for b in P_{n+1}
        lhs = dst.steps[n - 1][vmap(s, n + 1)[c]];
        rhs = vmap(s, n)[src.steps[n - 1][c]];
      }
      if (lhs != rhs)
        return {false, n, n + 1, c,
                "stage square " + std::to_string(n) + "/" +
                    std::to_string(n + 1) + " does not commute at cell " +
                    std::to_string(c)};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// closures and condition (iii)

NuClosure nu_closure(const ConjugacySchedule& s) {
  validate_schedule(s);
  Chain cp = make_chain(s, true), cq = make_chain(s, false);
  NuClosure out;
  for (std::size_t n = 1; n <= s.size(); ++n) {
    bool n_f = s.f_source(n);
    const Chain& src = n_f ? cp : cq;
    const Chain& dst = n_f ? cq : cp;
    const Partition& Pn = src.parts[n - 1];
    std::vector<Clopen> clo;
    for (std::size_t a = 0; a < Pn.size(); ++a)
      clo.push_back(dst.parts[n - 1].cell(vmap(s, n)[a]));
    for (std::size_t m = n + 1; m <= s.size(); ++m) {
      bool m_f = s.f_source(m);
      if (m_f == n_f) {
        const Partition& Pm = src.parts[m - 1];
        for (std::size_t b = 0; b < Pm.size(); ++b) {
          std::size_t a = src.anc(m, n, b);
          clo[a] = set_union(clo[a], dst.parts[m - 1].cell(vmap(s, m)[b]));
        }
      } else {
        const Partition& Sm = dst.parts[m - 1];
        for (std::size_t c = 0; c < Sm.size(); ++c) {
          std::size_t a = src.anc(m, n, vmap(s, m)[c]);
          clo[a] = set_union(clo[a], Sm.cell(c));
        }
      }
    }
    out.meshes.push_back(mesh(clo));
    out.sets.push_back(std::move(clo));
  }
  return out;
}

CommuteWitness commutes_cond_iii(const ConjugacySchedule& s) {
  NuClosure cl = nu_closure(s);
  for (std::size_t n = 1; n <= s.size(); ++n) {
    bool n_f = s.f_source(n);
    Partition tgt = n_f ? s.Q(n) : s.P(n);
    for (std::size_t a = 0; a < cl.sets[n - 1].size(); ++a)
      if (!(cl.sets[n - 1][a] == tgt.cell(vmap(s, n)[a])))
        return {false, n, n, a,
                "closure of cell " + std::to_string(a) + " at stage " +
                    std::to_string(n) + " exceeds its nu-image"};
  }
  return {};
}

bool asym_commutes_check(const ConjugacySchedule& s,
                         const std::vector<Rat>& bound_per_stage) {
  if (bound_per_stage.size() < s.size())
    throw DomainError("asym_commutes_check: a bound per stage is required");
  NuClosure cl = nu_closure(s);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (cl.meshes[k] > bound_per_stage[k]) return false;
  return true;
}

ConjugacySchedule inverse_schedule(const ConjugacySchedule& s) {
  if (s.alternating)
    throw DomainError("inverse_schedule: only iso-mode schedules invert");
  ConjugacySchedule out;
  for (const GraphMap& gm : s.nus) {
    if (gm.source.num_vertices() != gm.target.num_vertices())
      throw DomainError("inverse_schedule: stage map is not an isomorphism");
    std::vector<std::size_t> inv(gm.vertex_map.size());
    for (std::size_t v = 0; v < gm.vertex_map.size(); ++v)
      inv[gm.vertex_map[v]] = v;
    out.nus.push_back(GraphMap{gm.target, gm.source, std::move(inv)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// stage homeomorphisms and the conjugator

PrefixMap stage_hom(const GraphMap& nu) {
  if (!nu.source.labeled() || !nu.target.labeled())
    throw DomainError("stage_hom: graphs carry no partitions");
  GraphMapCheck chk = check_graph_map(nu);
  if (!chk.edges_ok || !chk.surjective)
    throw DomainError("stage_hom: not a surjective graph map");
  Partition S = nu.source.partition(), T = nu.target.partition();
  std::vector<std::vector<std::size_t>> fiber(T.size());
  for (std::size_t a = 0; a < S.size(); ++a)
    fiber[nu.vertex_map[a]].push_back(a);
  std::vector<Rule> rules;
  for (std::size_t c = 0; c < T.size(); ++c) {
    std::vector<Clopen> pieces = split_clopen(T.cell(c), fiber[c].size());
    for (std::size_t i = 0; i < fiber[c].size(); ++i)
      for (Rule& r : match_clopens(S.cell(fiber[c][i]), pieces[i]))
        rules.push_back(std::move(r));
  }
  PrefixMap h(std::move(rules));
  if (!h.is_homeo())
    throw ContractViolation("stage_hom: assembled map is not a homeomorphism");
  return h;
}

ConjugatorResult conjugator(const ConjugacySchedule& s, const PrefixMap& f,
                            const PrefixMap& g) {
  CommuteWitness w = commutes_check(s);
  if (!w.ok) throw DomainError("conjugator: schedule does not commute: " + w.detail);
  NuClosure cl = nu_closure(s);

  std::vector<std::size_t> used;
  std::vector<Rat> residuals, residual_bounds, cauchy_bounds;
  std::vector<PrefixMap> homs;
  for (std::size_t n = 1; n <= s.size(); ++n) {
    if (!s.f_source(n)) continue;  // only the f->g stages produce h_n
    PrefixMap hn = stage_hom(s.nus[n - 1]);
    Partition Qn = s.Q(n);
    used.push_back(n);
    residuals.push_back(sup_dist(compose(f, hn), compose(hn, g)));
    residual_bounds.push_back(mesh(Qn) + mesh(image_cells(g, Qn)));
    cauchy_bounds.push_back(cl.meshes[n - 1]);
    homs.push_back(std::move(hn));
  }
  std::vector<std::vector<Rat>> cauchy;
  for (std::size_t i = 0; i < homs.size(); ++i) {
    std::vector<Rat> row;
    for (std::size_t j = i + 1; j < homs.size(); ++j)
      row.push_back(sup_dist(homs[i], homs[j]));
    cauchy.push_back(std::move(row));
  }
  return ConjugatorResult{std::move(homs.back()),    std::move(used),
                          std::move(residuals),      std::move(residual_bounds),
                          std::move(cauchy),         std::move(cauchy_bounds)};
}

// ---------------------------------------------------------------------------
// back-and-forth constructions

namespace {

struct StageComps {
  Digraph G;
  std::vector<Component> comps;
  std::vector<ComponentKind> kinds;
  std::vector<Clopen> unions;  // cell union per component
  std::vector<Word> min_word;  // smallest cylinder word per component
};

StageComps stage_comps(const PrefixMap& h, const Partition& P,
                       ComponentKind::Kind want, const char* who) {
  StageComps s{build_gr(h, P), {}, {}, {}, {}};
  s.comps = components(s.G);
  for (const Component& c : s.comps) {
    ComponentKind ck = classify(c.graph);
    if (ck.kind != want)
      throw DomainError(std::string(who) + ": component is " + ck.str());
    std::vector<Word> ws;
    for (std::size_t v : c.verts)
      for (const Word& w : P.cell(v).cyls()) ws.push_back(w);
    s.kinds.push_back(std::move(ck));
    s.unions.emplace_back(std::move(ws));
    s.min_word.push_back(s.unions.back().cyls()[0]);
  }
  return s;
}

std::vector<std::size_t> parents_of(const StageComps& fine,
                                    const StageComps& coarse, const char* who) {
  std::vector<std::size_t> par(fine.comps.size(), coarse.comps.size());
  for (std::size_t i = 0; i < fine.comps.size(); ++i) {
    for (std::size_t j = 0; j < coarse.comps.size(); ++j)
      if (subset(fine.unions[i], coarse.unions[j])) { par[i] = j; break; }
    if (par[i] == coarse.comps.size())
      throw DomainError(std::string(who) +
                        ": component not contained in any coarser component");
  }
  return par;
}

Clopen local_union(const Partition& P, const Component& c,
                   const std::vector<std::size_t>& locals) {
  std::vector<Word> ws;
  for (std::size_t l : locals)
    for (const Word& w : P.cell(c.verts[l]).cyls()) ws.push_back(w);
  return Clopen(std::move(ws));
}

// subdumbbell type 1/2/3 by containment in the coarse plates
long long dumbbell_type(const StageComps& fine, std::size_t fi,
                        const Partition& Pc, const StageComps& coarse,
                        std::size_t ci) {
  const Component& cc = coarse.comps[ci];
  const ComponentKind& ck = coarse.kinds[ci];
  if (subset(fine.unions[fi], local_union(Pc, cc, ck.u))) return 1;
  if (subset(fine.unions[fi], local_union(Pc, cc, ck.w))) return 2;
  return 3;
}

// round-robin class matching: per class, sort both sides by smallest word
// and map the k-th source onto the (k mod target-count)-th target
using Classes = std::map<std::pair<std::size_t, long long>, std::vector<std::size_t>>;

std::vector<std::size_t> match_components(const StageComps& src, Classes src_cls,
                                          const StageComps& tgt, Classes tgt_cls,
                                          const char* who) {
  auto by_word = [](const StageComps& s, std::vector<std::size_t>& v) {
    std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
      return s.min_word[a] < s.min_word[b];
    });
  };
  std::vector<std::size_t> match(src.comps.size(), tgt.comps.size());
  for (auto& [key, tv] : tgt_cls) {
    auto it = src_cls.find(key);
    if (it == src_cls.end() || it->second.size() < tv.size())
      throw DomainError(std::string(who) +
                        ": cardinality infeasibility: source class of type " +
                        std::to_string(key.second) + " under component " +
                        std::to_string(key.first) + " is too small");
    by_word(src, it->second);
    by_word(tgt, tv);
    for (std::size_t k = 0; k < it->second.size(); ++k)
      match[it->second[k]] = tv[k % tv.size()];
    src_cls.erase(it);
  }
  if (!src_cls.empty())
    throw DomainError(std::string(who) +
                      ": source components with no matching target class");
  return match;
}

// the unique bar-onto-bar surjection between two dumbbells of equal bar
// length whose plate weights divide
void map_dumbbell(const StageComps& src, std::size_t si, const StageComps& tgt,
                  std::size_t ti, std::vector<std::size_t>& vm, const char* who) {
  const ComponentKind& a = src.kinds[si];
  const ComponentKind& b = tgt.kinds[ti];
  if (a.s != b.s)
    throw DomainError(std::string(who) + ": bar lengths disagree (" +
                      std::to_string(a.s) + " vs " + std::to_string(b.s) + ")");
  if (a.r % b.r != 0 || a.t % b.t != 0)
    throw DomainError(std::string(who) + ": plate weights do not divide");
  const Component& A = src.comps[si];
  const Component& B = tgt.comps[ti];
  for (int i = 0; i < a.r; ++i) vm[A.verts[a.u[i]]] = B.verts[b.u[i % b.r]];
  for (int j = 0; j < a.s; ++j) vm[A.verts[a.v[j]]] = B.verts[b.v[j]];
  for (int i = 0; i < a.t; ++i) vm[A.verts[a.w[i]]] = B.verts[b.w[i % b.t]];
}

// the unique surjection between two balloons that carries initial vertex to
// initial vertex; the walk is forced forward from there
void map_balloon(const StageComps& src, std::size_t si, const StageComps& tgt,
                 std::size_t ti, std::vector<std::size_t>& vm, const char* who) {
  const ComponentKind& a = src.kinds[si];
  const ComponentKind& b = tgt.kinds[ti];
  if (a.s % b.s != 0 || a.t % b.t != 0 || a.s < b.s)
    throw DomainError(std::string(who) + ": balloon types do not divide");
  const Component& A = src.comps[si];
  const Component& B = tgt.comps[ti];
  for (int j = 0; j < a.s; ++j)
    vm[A.verts[a.v[j]]] =
        j < b.s ? B.verts[b.v[j]] : B.verts[b.w[(j - b.s) % b.t]];
  for (int i = 0; i < a.t; ++i)
    vm[A.verts[a.w[i]]] = B.verts[b.w[(a.s + i - b.s) % b.t]];
}

// shared stage loop of the two back-and-forth constructions
ConjugacySchedule back_and_forth(const PrefixMap& f,
                                 const std::vector<Partition>& Pf,
                                 const PrefixMap& g,
                                 const std::vector<Partition>& Pg,
                                 std::size_t stages, bool balloons,
                                 const char* who) {
  if (stages == 0) throw DomainError(std::string(who) + ": need at least one stage");
  if (Pf.size() < stages || Pg.size() < stages)
    throw DomainError(std::string(who) + ": witness shortage: need " +
                      std::to_string(stages) + " stages, have " +
                      std::to_string(std::min(Pf.size(), Pg.size())));
  ComponentKind::Kind want =
      balloons ? ComponentKind::Balloon : ComponentKind::Dumbbell;

  ConjugacySchedule s;
  s.alternating = true;
  std::optional<StageComps> prev_f, prev_g;
  std::vector<std::size_t> prev_match;  // previous-stage source comp -> target comp
  for (std::size_t n = 1; n <= stages; ++n) {
    StageComps sf = stage_comps(f, Pf[n - 1], want, who);
    StageComps sg = stage_comps(g, Pg[n - 1], want, who);
    bool f_src = n % 2 == 1;
    StageComps& src = f_src ? sf : sg;
    StageComps& tgt = f_src ? sg : sf;

    Classes src_cls, tgt_cls;
    if (n == 1) {
      for (std::size_t i = 0; i < src.comps.size(); ++i)
        src_cls[{0, 0}].push_back(i);
      for (std::size_t i = 0; i < tgt.comps.size(); ++i)
        tgt_cls[{0, 0}].push_back(i);
    } else {
      // the source classes by (own parent, type); the target classes by the
      // previous stage's nu applied to their parent and type — matched pairs
      // then make the stage squares commute at the component level
      StageComps& psrc = f_src ? *prev_f : *prev_g;
      StageComps& ptgt = f_src ? *prev_g : *prev_f;
      const Partition& Psrc_c = f_src ? Pf[n - 2] : Pg[n - 2];
      const Partition& Ptgt_c = f_src ? Pg[n - 2] : Pf[n - 2];
      auto par_s = parents_of(src, psrc, who);
      auto par_t = parents_of(tgt, ptgt, who);
      const std::vector<std::size_t>& pvm = s.nus[n - 2].vertex_map;
      // subballoon type = coarse vertex containing the initial cell
      auto balloon_type = [&](const StageComps& side, std::size_t i,
                              const Partition& coarse_cells,
                              const StageComps& coarse,
                              std::size_t parent) -> long long {
        Clopen init =
            side.G.partition().cell(side.comps[i].verts[side.kinds[i].v[0]]);
        for (std::size_t v : coarse.comps[parent].verts)
          if (subset(init, coarse_cells.cell(v))) return (long long)v;
        throw DomainError(std::string(who) +
                          ": initial vertex not inside the parent component");
      };
      for (std::size_t i = 0; i < src.comps.size(); ++i) {
        long long ty = balloons
                           ? balloon_type(src, i, Psrc_c, psrc, par_s[i])
                           : dumbbell_type(src, i, Psrc_c, psrc, par_s[i]);
        src_cls[{par_s[i], ty}].push_back(i);
      }
      for (std::size_t i = 0; i < tgt.comps.size(); ++i) {
        // the previous nu carries a target-side type vertex to the source side
        long long ty =
            balloons
                ? (long long)pvm[(std::size_t)balloon_type(tgt, i, Ptgt_c, ptgt,
                                                           par_t[i])]
                : dumbbell_type(tgt, i, Ptgt_c, ptgt, par_t[i]);
        // the previous stage's source side is this stage's target side, so
        // prev_match carries the parent straight into the src-side comps
        if (par_t[i] >= prev_match.size())
          throw DomainError(std::string(who) + ": parent component unreached by nu");
        tgt_cls[{prev_match[par_t[i]], ty}].push_back(i);
      }
    }

    std::vector<std::size_t> match =
        match_components(src, std::move(src_cls), tgt, std::move(tgt_cls), who);
    std::vector<std::size_t> vm(src.G.num_vertices());
    for (std::size_t i = 0; i < src.comps.size(); ++i) {
      if (balloons) map_balloon(src, i, tgt, match[i], vm, who);
      else map_dumbbell(src, i, tgt, match[i], vm, who);
    }
    GraphMap gm{src.G, tgt.G, std::move(vm)};
    GraphMapCheck chk = check_graph_map(gm);
    if (!chk.edges_ok || !chk.surjective)
      throw ContractViolation(std::string(who) +
                              ": assembled stage map is not a surjective graph map");
    s.nus.push_back(std::move(gm));
    prev_f = std::move(sf);
    prev_g = std::move(sg);
    prev_match = std::move(match);
  }
  validate_schedule(s);
  return s;
}

}  // namespace

ConjugacySchedule back_and_forth_hom(const PrefixMap& f,
                                     const std::vector<HomWitness>& wf,
                                     const PrefixMap& g,
                                     const std::vector<HomWitness>& wg,
                                     std::size_t stages) {
  std::vector<Partition> Pf, Pg;
  for (const HomWitness& w : wf) Pf.push_back(w.P);
  for (const HomWitness& w : wg) Pg.push_back(w.P);
  return back_and_forth(f, Pf, g, Pg, stages, false, "back_and_forth_hom");
}

ConjugacySchedule back_and_forth_cont(const PrefixMap& f,
                                      const std::vector<ContWitness>& wf,
                                      const PrefixMap& g,
                                      const std::vector<ContWitness>& wg,
                                      std::size_t stages) {
  std::vector<Partition> Pf, Pg;
  for (const ContWitness& w : wf) Pf.push_back(w.P);
  for (const ContWitness& w : wg) Pg.push_back(w.P);
  return back_and_forth(f, Pf, g, Pg, stages, true, "back_and_forth_cont");
}

}  // namespace cantor
