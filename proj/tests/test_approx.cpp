#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>

#include "cantor/approx.hpp"
#include "test_util.hpp"

using namespace cantor;
using namespace cantor::testutil;

namespace {

// random digraph over a random partition, every vertex with in- and
// out-degree >= 1 (no ends)
Digraph random_end_free(std::mt19937_64& rng, std::size_t max_extra = 6) {
  Partition P = random_partition(rng, 4, 12);
  std::size_t n = P.size();
  std::vector<Edge> es;
  std::vector<char> has_in(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t t = rng() % n;
    es.push_back({v, t});
    has_in[t] = 1;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (!has_in[v]) es.push_back({rng() % n, v});
  for (std::size_t i = rng() % max_extra; i > 0; --i)
    es.push_back({rng() % n, rng() % n});
  return Digraph(n, std::move(es), P.cells());
}

std::multiset<std::string> component_kinds(const Digraph& g) {
  std::multiset<std::string> out;
  for (const Component& c : components(g)) out.insert(classify(c.graph).str());
  return out;
}

}  // namespace

TEST_CASE("realize: basic shapes") {
  Partition halves({cl({"0"}), cl({"1"})});

  Digraph loop2(2, {{0, 1}, {1, 0}}, halves.cells());
  Realization r = realize(loop2);
  CHECK(r.X.is_empty());
  CHECK(r.f.is_homeo());
  CHECK(build_gr(r.f, halves) == loop2);

  // one left end: the map misses exactly that cell
  Digraph onto1(2, {{0, 1}, {1, 1}}, halves.cells());
  Realization r1 = realize(onto1);
  CHECK(r1.X == cl({"0"}));
  CHECK(image(r1.f, Clopen::whole()) == cl({"1"}));
  CHECK(build_gr(r1.f, halves) == onto1);

  Digraph two_loops(2, {{0, 0}, {1, 1}}, halves.cells());
  Realization r2 = realize(two_loops);
  CHECK(image(r2.f, cl({"0"})) == cl({"0"}));
  CHECK(image(r2.f, cl({"1"})) == cl({"1"}));

  Digraph right_end(2, {{0, 1}, {0, 0}}, halves.cells());
  CHECK_THROWS_WITH_AS((void)realize(right_end), "realize: right end present", DomainError);
}

TEST_CASE("realize: roundtrip on random end-free digraphs") {
  std::mt19937_64 rng(101);
  for (int it = 0; it < 200; ++it) {
    Digraph g = random_end_free(rng);
    Realization r = realize(g);
    CHECK(r.X.is_empty());
    CHECK(r.f.is_homeo());
    CHECK(build_gr(r.f, g.partition()) == g);
  }
}

TEST_CASE("edge_params") {
  Digraph complete(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  EdgeParams p = edge_params(complete, {0, 1}, false);
  CHECK(p.S == 1);
  CHECK(p.M == 1);

  Digraph loop2(2, {{0, 1}, {1, 0}});
  EdgeParams pb = edge_params(loop2, {0, 1}, false);
  CHECK(pb.S == 1);
  CHECK(pb.M == 2);
  CHECK(pb.walk == std::vector<std::size_t>{0, 1, 0, 1});

  EdgeParams pd = edge_params(loop2, {0, 1}, true);
  CHECK(pd.N == 2);
  CHECK(pd.S == 1);
  CHECK(pd.M == 2);

  CHECK_THROWS_AS((void)edge_params(loop2, {0, 0}, false), DomainError);
  Digraph ended(2, {{0, 1}, {1, 1}});
  CHECK_THROWS_AS((void)edge_params(ended, {0, 1}, true), DomainError);
}

TEST_CASE("cover_params") {
  Digraph selfloop(1, {{0, 0}});
  CoverParams c0 = cover_params(selfloop, true);
  CHECK(c0.K == 1);
  CHECK(c0.S == 1);
  CHECK(c0.M == 1);
  CHECK(c0.N == 1);

  Digraph loop2(2, {{0, 1}, {1, 0}});
  CoverParams c1 = cover_params(loop2, true);
  CHECK(c1.K == 2);
  CHECK(c1.S == 1);
  CHECK(c1.M == 2);
  CHECK(c1.N == 2);

  Digraph complete(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CoverParams c2 = cover_params(complete, true);
  CHECK(c2.K == 4);
  CHECK(c2.S == 1);
  CHECK(c2.M == 1);
  CHECK(c2.N == 1);
}

TEST_CASE("shapes_onto") {
  Digraph selfloop(1, {{0, 0}});
  ShapeCover s0 = shapes_onto(selfloop, false, 1, 1, 1);
  CHECK(classify(s0.H).str() == "Balloon(1,1)");
  GraphMapCheck c0 = check_graph_map(s0.phi);
  CHECK(c0.edges_ok);
  CHECK(c0.surjective);

  Digraph loop2(2, {{0, 1}, {1, 0}});
  ShapeCover s1 = shapes_onto(loop2, false, 2, 1, 2);
  auto comps = components(s1.H);
  REQUIRE(comps.size() == 2);
  for (const Component& c : comps) CHECK(classify(c.graph).str() == "Balloon(1,2)");
  GraphMapCheck c1 = check_graph_map(s1.phi);
  CHECK(c1.edges_ok);
  CHECK(c1.surjective);

  CHECK_THROWS_WITH_AS((void)shapes_onto(loop2, false, 1, 1, 2),
                       "shapes_onto: k below the edge count K (minimal legal values: "
                       "K=2, S=1, M=2)",
                       DomainError);

  // legality is monotone: larger k and s, larger multiples of m and n
  std::mt19937_64 rng(103);
  for (int it = 0; it < 20; ++it) {
    Digraph g(3, {{0, 1}, {1, 2}, {2, 0}, {1, 1}});
    CoverParams cp = cover_params(g, true);
    long long k = cp.K + rng() % 3, s = cp.S + rng() % 3;
    long long m = cp.M * (1 + (long long)(rng() % 3)), n = cp.N * (1 + (long long)(rng() % 3));
    ShapeCover sc = shapes_onto(g, true, k, s, m, n);
    GraphMapCheck chk = check_graph_map(sc.phi);
    CHECK(chk.edges_ok);
    CHECK(chk.surjective);
    auto cps = components(sc.H);
    CHECK((long long)cps.size() == k);
    for (const Component& c : cps) {
      ComponentKind kind = classify(c.graph);
      CHECK(kind.kind == ComponentKind::Dumbbell);
      CHECK(kind.r == n);
      CHECK(kind.s == s);
      CHECK(kind.t == m);
    }
  }
}

TEST_CASE("refine_realize: identity lift and the distance bound") {
  std::mt19937_64 rng(107);
  for (int it = 0; it < 60; ++it) {
    PrefixMap f = random_map(rng, 4);
    Partition Q = random_partition(rng, 4);
    Digraph g = build_gr(f, Q);
    std::vector<std::size_t> idm(g.num_vertices());
    for (std::size_t i = 0; i < idm.size(); ++i) idm[i] = i;
    Digraph bare(g.num_vertices(), g.edges());  // unlabeled copy as the source
    RefinedRealization rr = refine_realize(f, Q, bare, GraphMap{bare, g, idm});
    CHECK(refines(rr.P, Q));
    CHECK(isomorphic_via(build_gr(rr.g, rr.P), bare, rr.psi));
    CHECK(rr.bound == mesh(Q) + mesh(image_cells(f, Q)));
    CHECK(sup_dist(f, rr.g) <= rr.bound);
  }
}

TEST_CASE("refine_realize: two-to-one loop cover") {
  Partition halves({cl({"0"}), cl({"1"})});
  Digraph gr2 = build_gr(swap_map(), halves);
  Digraph loop4(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  GraphMap phi{loop4, gr2, {0, 1, 0, 1}};
  RefinedRealization rr = refine_realize(swap_map(), halves, loop4, phi);
  CHECK(rr.P.size() == 4);
  CHECK(isomorphic_via(build_gr(rr.g, rr.P), loop4, rr.psi));
  CHECK(rr.g.is_homeo());
  CHECK(rr.bound == Rat(1, 1));  // 1/2 + 1/2
  CHECK(sup_dist(swap_map(), rr.g) <= rr.bound);

  GraphMap bad{loop4, gr2, {0, 0, 0, 0}};
  CHECK_THROWS_AS((void)refine_realize(swap_map(), halves, loop4, bad), DomainError);
}

TEST_CASE("approximate: prescribed shapes near simple maps") {
  Approximation a = approximate(swap_map(), Rat(1, 2), true);
  CHECK(sup_dist(swap_map(), a.g) < Rat(1, 2));
  CHECK(mesh(a.P) < Rat(1, 2));
  CHECK(a.g.is_homeo());
  auto comps = components(build_gr(a.g, a.P));
  CHECK((long long)comps.size() == a.k);
  for (const Component& c : comps) {
    ComponentKind kind = classify(c.graph);
    CHECK(kind.kind == ComponentKind::Dumbbell);
    CHECK(kind.r == a.n);
    CHECK(kind.s == a.s);
    CHECK(kind.t == a.m);
    CHECK(kind.balanced());  // swap: left and right loop lengths agree
  }

  Approximation b = approximate(PrefixMap::identity(), Rat(1, 1), false);
  for (const Component& c : components(build_gr(b.g, b.P))) {
    ComponentKind kind = classify(c.graph);
    CHECK(kind.kind == ComponentKind::Balloon);
    CHECK(kind.s == b.s);
    CHECK(kind.t == b.m);
  }

  CHECK_THROWS_AS((void)approximate(swap_map(), Rat::zero(), false), DomainError);
  CHECK_THROWS_AS((void)approximate(shift_map(), Rat(1, 2), true), DomainError);
}

TEST_CASE("approximate: contract on random homeomorphisms") {
  std::mt19937_64 rng(109);
  for (int it = 0; it < 15; ++it) {
    PrefixMap f = random_homeo(rng, 4);
    for (Rat eps : {Rat(1, 2), Rat(1, 4)}) {
      Approximation a = approximate(f, eps, true);
      CHECK(sup_dist(f, a.g) < eps);
      CHECK(sup_dist(f, a.g) <= a.bound);
      CHECK(mesh(a.P) < eps);
      CHECK(a.g.is_homeo());
      std::multiset<std::string> kinds = component_kinds(build_gr(a.g, a.P));
      ComponentKind want;
      want.kind = ComponentKind::Dumbbell;
      want.r = (int)a.n;
      want.s = (int)a.s;
      want.t = (int)a.m;
      CHECK((long long)kinds.size() == a.k);
      for (const std::string& s : kinds) CHECK(s == want.str());
    }
    PrefixMap c = random_map(rng, 4);
    Approximation ab = approximate(c, Rat(1, 2), false);
    CHECK(sup_dist(c, ab.g) < Rat(1, 2));
    CHECK(mesh(ab.P) < Rat(1, 2));
    for (const std::string& s : component_kinds(build_gr(ab.g, ab.P)))
      CHECK(s.substr(0, 8) == "Balloon(");
  }
}
