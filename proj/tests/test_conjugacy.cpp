#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "cantor/conjugacy.hpp"
#include "cantor/digraph.hpp"
#include "cantor/generic.hpp"
#include "test_util.hpp"

using namespace cantor;

namespace {

// union of the cells at the given local vertex indices of a component
Clopen cells_union(const Partition& P, const std::vector<std::size_t>& verts,
                   const std::vector<std::size_t>& locals) {
  std::vector<Word> ws;
  for (std::size_t l : locals)
    for (const Word& w : P.cell(verts[l]).cyls()) ws.push_back(w);
  return Clopen(std::move(ws));
}

Clopen comp_union(const Partition& P, const Component& c) {
  std::vector<Word> ws;
  for (std::size_t v : c.verts)
    for (const Word& w : P.cell(v).cyls()) ws.push_back(w);
  return Clopen(std::move(ws));
}

// Swap the images of two same-shape components of a graph map, using the
// canonical classify() positions as the correspondence.  The result is still
// a surjective graph map, but any ancestry the two components carried is
// exchanged.
GraphMap swap_component_images(const GraphMap& gm, std::size_t ca,
                               std::size_t cb) {
  std::vector<Component> comps = components(gm.source);
  ComponentKind ka = classify(comps[ca].graph);
  ComponentKind kb = classify(comps[cb].graph);
  REQUIRE(ka.r == kb.r);
  REQUIRE(ka.s == kb.s);
  REQUIRE(ka.t == kb.t);
  std::vector<std::size_t> vm = gm.vertex_map;
  auto move_onto = [&](const Component& A, const ComponentKind& a,
                       const Component& B, const ComponentKind& b) {
    for (std::size_t i = 0; i < a.u.size(); ++i)
      vm[A.verts[a.u[i]]] = gm.vertex_map[B.verts[b.u[i]]];
    for (std::size_t j = 0; j < a.v.size(); ++j)
      vm[A.verts[a.v[j]]] = gm.vertex_map[B.verts[b.v[j]]];
    for (std::size_t i = 0; i < a.w.size(); ++i)
      vm[A.verts[a.w[i]]] = gm.vertex_map[B.verts[b.w[i]]];
  };
  move_onto(comps[ca], ka, comps[cb], kb);
  move_onto(comps[cb], kb, comps[ca], ka);
  return GraphMap{gm.source, gm.target, std::move(vm)};
}

// Break a 2-stage alternating dumbbell schedule by exchanging the images of
// one left-plate child and one right-plate child at stage 2; the swap keeps
// the map a surjective graph map but crosses the coarse plates.
ConjugacySchedule mutate_dumbbell_schedule(const ConjugacySchedule& s) {
  const Digraph& Gc = s.nus[0].target;  // coarse graph on the stage-2 source side
  Partition Pc = Gc.partition();
  std::vector<Component> cc = components(Gc);
  REQUIRE(cc.size() == 1);
  ComponentKind ck = classify(cc[0].graph);
  Clopen uplate = cells_union(Pc, cc[0].verts, ck.u);
  Clopen wplate = cells_union(Pc, cc[0].verts, ck.w);

  Partition Pf = s.nus[1].source.partition();
  std::vector<Component> fc = components(s.nus[1].source);
  std::size_t left = fc.size(), right = fc.size();
  for (std::size_t i = 0; i < fc.size(); ++i) {
    Clopen u = comp_union(Pf, fc[i]);
    if (left == fc.size() && subset(u, uplate)) left = i;
    if (right == fc.size() && subset(u, wplate)) right = i;
  }
  REQUIRE(left < fc.size());
  REQUIRE(right < fc.size());
  ConjugacySchedule out = s;
  out.nus[1] = swap_component_images(s.nus[1], left, right);
  return out;
}

}  // namespace

TEST_CASE("alternating dumbbell schedule commutes and the conditions agree") {
  HomGeneric f = generic_hom(2, 11);
  HomGeneric g = generic_hom(2, 22);
  ConjugacySchedule s =
      back_and_forth_hom(f.h, f.witnesses, g.h, g.witnesses, 2);

  CHECK(s.alternating);
  CHECK(s.size() == 2);
  CHECK(s.P(1).size() == 7);
  CHECK(s.Q(1).size() == 7);
  CHECK(s.P(2).size() == 220);
  CHECK(s.Q(2).size() == 220);
  CHECK(refines(s.P(2), s.P(1)));
  CHECK(refines(s.Q(2), s.Q(1)));
  CHECK_NOTHROW(validate_schedule(s));

  CHECK(commutes_check(s).ok);
  CHECK(commutes_cond_i(s).ok);
  CHECK(commutes_cond_iii(s).ok);

  NuClosure cl = nu_closure(s);
  REQUIRE(cl.meshes.size() == 2);
  CHECK(asym_commutes_check(s, cl.meshes));
  std::vector<Rat> tight;
  for (const Rat& m : cl.meshes) tight.push_back(m * Rat(1, 2));
  CHECK_FALSE(asym_commutes_check(s, tight));
}

TEST_CASE("same construction across several seed pairs") {
  for (std::uint64_t sd : {3u, 4u, 5u}) {
    HomGeneric f = generic_hom(2, sd);
    HomGeneric g = generic_hom(2, sd + 100);
    ConjugacySchedule s =
        back_and_forth_hom(f.h, f.witnesses, g.h, g.witnesses, 2);
    CHECK(commutes_check(s).ok);
    CHECK(commutes_cond_i(s).ok);
    CHECK(commutes_cond_iii(s).ok);
  }
}

TEST_CASE("conjugator on an alternating schedule certifies its bounds") {
  HomGeneric f = generic_hom(2, 11);
  HomGeneric g = generic_hom(2, 22);
  ConjugacySchedule s =
      back_and_forth_hom(f.h, f.witnesses, g.h, g.witnesses, 2);
  ConjugatorResult r = conjugator(s, f.h, g.h);

  // only the odd stages run f -> g
  REQUIRE(r.stages == std::vector<std::size_t>{1});
  REQUIRE(r.residuals.size() == 1);
  CHECK(r.residuals[0] <= r.residual_bounds[0]);
  CHECK(r.residual_bounds[0] == mesh(s.Q(1)) + mesh(image_cells(g.h, s.Q(1))));
  CHECK(r.h.is_homeo());
  // h carries every stage-1 source cell into its nu-image
  for (std::size_t a = 0; a < s.P(1).size(); ++a)
    CHECK(subset(image(r.h, s.P(1).cell(a)),
                 s.Q(1).cell(s.nus[0].vertex_map[a])));
}

TEST_CASE("iso schedule from a bijective alternating pair") {
  HomGeneric f = generic_hom(2, 11);
  HomGeneric g = generic_hom(2, 22);
  ConjugacySchedule alt =
      back_and_forth_hom(f.h, f.witnesses, g.h, g.witnesses, 2);

  // stage 2 runs g -> f and is a bijection here; invert it to get a
  // stage-indexed family of isomorphisms f -> g
  const GraphMap& gm2 = alt.nus[1];
  REQUIRE(gm2.source.num_vertices() == gm2.target.num_vertices());
  std::vector<std::size_t> inv(gm2.vertex_map.size(), gm2.vertex_map.size());
  for (std::size_t v = 0; v < gm2.vertex_map.size(); ++v) {
    REQUIRE(inv[gm2.vertex_map[v]] == gm2.vertex_map.size());  // injective
    inv[gm2.vertex_map[v]] = v;
  }
  ConjugacySchedule iso;
  iso.alternating = false;
  iso.nus.push_back(alt.nus[0]);
  iso.nus.push_back(GraphMap{gm2.target, gm2.source, std::move(inv)});

  CHECK_NOTHROW(validate_schedule(iso));
  CHECK(commutes_check(iso).ok);
  CHECK(commutes_cond_i(iso).ok);
  CHECK(commutes_cond_iii(iso).ok);

  ConjugatorResult r = conjugator(iso, f.h, g.h);
  REQUIRE(r.stages == std::vector<std::size_t>{1, 2});
  for (std::size_t k = 0; k < r.residuals.size(); ++k)
    CHECK(r.residuals[k] <= r.residual_bounds[k]);
  CHECK(r.residual_bounds[1] < r.residual_bounds[0]);
  REQUIRE(r.cauchy.size() == 2);
  REQUIRE(r.cauchy[0].size() == 1);
  CHECK(r.cauchy[0][0] <= r.cauchy_bounds[0]);
  CHECK(r.h.is_homeo());

  ConjugacySchedule back = inverse_schedule(iso);
  CHECK(commutes_check(back).ok);
  ConjugacySchedule twice = inverse_schedule(back);
  for (std::size_t n = 0; n < iso.size(); ++n)
    CHECK(twice.nus[n].vertex_map == iso.nus[n].vertex_map);

  CHECK_THROWS_AS(inverse_schedule(alt), DomainError);
}

TEST_CASE("identity schedule yields zero residuals") {
  HomGeneric f = generic_hom(2, 7);
  ConjugacySchedule s;
  s.alternating = false;
  for (const HomWitness& w : f.witnesses) {
    Digraph G = build_gr(f.h, w.P);
    std::vector<std::size_t> id(G.num_vertices());
    for (std::size_t v = 0; v < id.size(); ++v) id[v] = v;
    s.nus.push_back(GraphMap{G, G, std::move(id)});
  }
  CHECK(commutes_check(s).ok);
  CHECK(commutes_cond_i(s).ok);
  CHECK(commutes_cond_iii(s).ok);

  ConjugatorResult r = conjugator(s, f.h, f.h);
  for (const Rat& res : r.residuals) CHECK(res.is_zero());
  CHECK(r.cauchy[0][0].is_zero());
  CHECK(sup_dist(r.h, iterate(f.h, 0)).is_zero());
}

TEST_CASE("stage_hom: identity map and a proper fiber collapse") {
  HomGeneric f = generic_hom(2, 9);
  const Partition& P1 = f.witnesses[0].P;
  const Partition& P2 = f.witnesses[1].P;

  Digraph G2 = build_gr(f.h, P2);
  std::vector<std::size_t> id(G2.num_vertices());
  for (std::size_t v = 0; v < id.size(); ++v) id[v] = v;
  PrefixMap hid = stage_hom(GraphMap{G2, G2, id});
  CHECK(sup_dist(hid, iterate(f.h, 0)).is_zero());

  GraphMap nu = refinement_graph_map(f.h, P2, P1);
  PrefixMap h = stage_hom(nu);
  CHECK(h.is_homeo());
  std::vector<Clopen> covered(P1.size(), Clopen(std::vector<Word>{}));
  for (std::size_t a = 0; a < P2.size(); ++a) {
    Clopen im = image(h, P2.cell(a));
    CHECK(subset(im, P1.cell(nu.vertex_map[a])));
    covered[nu.vertex_map[a]] = set_union(covered[nu.vertex_map[a]], im);
  }
  for (std::size_t c = 0; c < P1.size(); ++c)
    CHECK(covered[c] == P1.cell(c));
}

TEST_CASE("mutated schedules fail all three conditions identically") {
  HomGeneric f = generic_hom(2, 11);
  HomGeneric g = generic_hom(2, 22);
  ConjugacySchedule s =
      back_and_forth_hom(f.h, f.witnesses, g.h, g.witnesses, 2);
  ConjugacySchedule bad = mutate_dumbbell_schedule(s);

  // still a structurally valid schedule ...
  CHECK_NOTHROW(validate_schedule(bad));
  // ... that no longer commutes, under every formulation
  CommuteWitness w2 = commutes_check(bad);
  CHECK_FALSE(w2.ok);
  CHECK_FALSE(commutes_cond_i(bad).ok);
  CHECK_FALSE(commutes_cond_iii(bad).ok);
  CHECK(w2.detail != "");

  CHECK_THROWS_AS(conjugator(bad, f.h, g.h), DomainError);
}

TEST_CASE("alternating balloon schedule between continuous maps") {
  ContGeneric f = generic_cont(2, 7);
  ContGeneric g = generic_cont(2, 9);
  ConjugacySchedule s =
      back_and_forth_cont(f.f, f.witnesses, g.f, g.witnesses, 2);

  CHECK(s.alternating);
  CHECK(s.P(1).size() == 4);
  CHECK(s.P(2).size() == 384);
  CHECK(commutes_check(s).ok);
  CHECK(commutes_cond_i(s).ok);
  CHECK(commutes_cond_iii(s).ok);

  ConjugatorResult r = conjugator(s, f.f, g.f);
  REQUIRE(r.stages == std::vector<std::size_t>{1});
  CHECK(r.residuals[0] <= r.residual_bounds[0]);
  CHECK(r.h.is_homeo());
}

TEST_CASE("schedule construction error cases") {
  HomGeneric f = generic_hom(2, 1);
  HomGeneric g = generic_hom(2, 2);
  CHECK_THROWS_AS(
      back_and_forth_hom(f.h, f.witnesses, g.h, g.witnesses, 0), DomainError);
  CHECK_THROWS_AS(
      back_and_forth_hom(f.h, f.witnesses, g.h, g.witnesses, 3), DomainError);

  // dumbbell stages are not balloons
  std::vector<ContWitness> cf, cg;
  for (const HomWitness& w : f.witnesses) cf.push_back({w.P, w.q});
  for (const HomWitness& w : g.witnesses) cg.push_back({w.P, w.q});
  CHECK_THROWS_AS(back_and_forth_cont(f.h, cf, g.h, cg, 1), DomainError);

  ConjugacySchedule empty;
  CHECK_THROWS_AS(validate_schedule(empty), DomainError);
}
