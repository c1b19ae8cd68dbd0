#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <vector>

#include "cantor/dynamics.hpp"
#include "cantor/generic.hpp"
#include "test_util.hpp"

using namespace cantor;
using namespace cantor::testutil;

namespace {

// cell ids of the left and right loops of every dumbbell / balloon of gr(f,P)
struct LoopCells {
  std::set<std::size_t> left, right, bar;
};

LoopCells loop_cells(const PrefixMap& f, const Partition& P) {
  LoopCells lc;
  Digraph G = build_gr(f, P);
  for (const Component& c : components(G)) {
    ComponentKind k = classify(c.graph);
    for (std::size_t l : k.u) lc.left.insert(c.verts[l]);
    for (std::size_t l : k.v) lc.bar.insert(c.verts[l]);
    for (std::size_t l : k.w) lc.right.insert(c.verts[l]);
  }
  return lc;
}

Point nudge(const Point& x, int depth) {
  std::string pre;
  for (int i = 0; i < depth; ++i) pre += char('0' + x.bit((std::size_t)i));
  return Point(pre + "1", "0");
}

}  // namespace

TEST_CASE("trajectory and itinerary basics") {
  Point x("01", "10");
  std::vector<Point> tr = trajectory(PrefixMap::identity(), x, 5);
  REQUIRE(tr.size() == 6);
  for (const Point& p : tr) CHECK(p == x);

  Partition P({cl({"0"}), cl({"1"})});
  std::vector<std::size_t> it = itinerary(swap_map(), Point(), 5, P);
  CHECK(it == std::vector<std::size_t>{0, 1, 0, 1, 0, 1});

  CHECK_THROWS_AS(trajectory(PrefixMap::identity(), x, -1), DomainError);
}

TEST_CASE("orbits of a dumbbell stage settle into one loop") {
  HomGeneric g = generic_hom(1, 5);
  const HomWitness& w = g.witnesses[0];
  LoopCells lc = loop_cells(g.h, w.P);
  long long q = 2;  // stage-1 plate weight is 2! = 2
  std::vector<std::size_t> it = itinerary(g.h, Point(), 4 * q + 8, w.P);
  // after the transient, the itinerary stays inside a single loop
  std::size_t k0 = it.size() - 4;
  bool all_left = true, all_right = true;
  for (std::size_t k = k0; k < it.size(); ++k) {
    all_left &= lc.left.count(it[k]) > 0;
    all_right &= lc.right.count(it[k]) > 0;
  }
  CHECK((all_left || all_right));
}

TEST_CASE("shadow: real orbits, loop windows, and error cases") {
  HomGeneric g = generic_hom(1, 3);
  const HomWitness& w = g.witnesses[0];
  Rat gap = min_gap(w.P);
  Rat m = mesh(w.P);
  LoopCells lc = loop_cells(g.h, w.P);

  auto reverify = [&](const PseudoOrbit& po, const ShadowResult& res) {
    PrefixMap hinv = inverse(g.h);
    Point cur = res.x;
    long long n = po.start;
    if (n >= 0) cur = apply(iterate(g.h, (int)n), cur);
    else cur = apply(iterate(hinv, (int)-n), cur);
    for (std::size_t i = 0; i < po.points.size(); ++i) {
      CHECK(dist(po.points[i], cur) <= res.bound);
      if (i + 1 < po.points.size()) cur = apply(g.h, cur);
    }
  };

  // a real orbit through the bar shadows itself (bar-crossing class)
  Clopen bar_cell = w.P.cell(*lc.bar.begin());
  PseudoOrbit po1{0, trajectory(g.h, pick_point(bar_cell), 8), Rat::zero()};
  ShadowResult r1 = shadow(g.h, w, po1);
  CHECK(r1.kind == 1);
  CHECK(r1.bound == m);
  reverify(po1, r1);

  // a window cycling the left loop forever, with a negative start index
  Point xa = pick_point(w.loops[0].a);
  PrefixMap hinv = inverse(g.h);
  PseudoOrbit po2{-3, {}, Rat::zero()};
  Point back = apply(iterate(hinv, 3), xa);
  po2.points = trajectory(g.h, back, 9);
  ShadowResult r2 = shadow(g.h, w, po2);
  CHECK(r2.kind == 2);
  reverify(po2, r2);

  // right-loop window
  PseudoOrbit po3{0, trajectory(g.h, pick_point(w.loops[0].b), 7),
                  Rat::zero()};
  ShadowResult r3 = shadow(g.h, w, po3);
  CHECK(r3.kind == 3);
  reverify(po3, r3);

  // a genuine pseudo-orbit: perturb every point of a real orbit deep down
  PseudoOrbit po4{0, {}, Rat::zero()};
  for (const Point& p : trajectory(g.h, pick_point(bar_cell), 8))
    po4.points.push_back(nudge(p, 40));
  po4.delta = pseudo_orbit_defect(g.h, po4);
  CHECK(Rat::zero() < po4.delta);
  CHECK(po4.delta < gap);
  ShadowResult r4 = shadow(g.h, w, po4);
  reverify(po4, r4);

  // delta at or above the partition gap is refused
  PseudoOrbit po5 = po1;
  po5.delta = gap;
  CHECK_THROWS_AS(shadow(g.h, w, po5), DomainError);
}

TEST_CASE("li_yorke_exclusion verdicts") {
  ContGeneric f = generic_cont(1, 4);
  const ContWitness& w = f.witnesses[0];
  Digraph G = build_gr(f.f, w.P);
  REQUIRE(components(G).size() == 1);
  ComponentKind k = classify(components(G)[0].graph);
  REQUIRE(k.kind == ComponentKind::Balloon);

  // identical points merge immediately
  const std::vector<std::size_t> bverts = components(G)[0].verts;
  Point x = pick_point(w.P.cell(bverts[k.v[0]]));
  LiYorkeReport same = li_yorke_exclusion(f.f, w, x, x, 6);
  CHECK(same.verdict == LiYorkeVerdict::SameCellTail);
  CHECK(same.merge_index == 0);

  // a bar point and a loop point merge when the bar drains into the loop
  Point y = pick_point(w.P.cell(bverts[k.w[0]]));
  LiYorkeReport merged = li_yorke_exclusion(f.f, w, x, y, 12);
  CHECK(merged.verdict == LiYorkeVerdict::SameCellTail);
  CHECK(merged.merge_index == k.s);

  // phase-locked loop points never meet
  HomGeneric g = generic_hom(1, 3);
  Point u0 = pick_point(g.witnesses[0].loops[0].a);
  Point u1 = apply(g.h, u0);
  LiYorkeReport sep =
      li_yorke_exclusion(g.h, g.witnesses[0], u0, u1, 12);
  CHECK(sep.verdict == LiYorkeVerdict::Separated);
  CHECK(sep.merge_index == -1);

  // non-witnessed maps are refused
  HomWitness fake{Partition({cl({"0"}), cl({"1"})}), 1, {}};
  CHECK_THROWS_AS(
      li_yorke_exclusion(swap_map(), fake, Point(), Point("1", "0"), 4),
      DomainError);
}

TEST_CASE("walk_prefix_coincidence") {
  // plain loop: walks are unique
  Digraph loop(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(walk_prefix_coincidence(loop));

  // dumbbell (2,1,2)
  Digraph db(5, {{0, 1}, {1, 0}, {0, 2}, {2, 3}, {3, 4}, {4, 3}});
  CHECK(classify(db).kind == ComponentKind::Dumbbell);
  CHECK(walk_prefix_coincidence(db));

  // a generic stage-1 component
  HomGeneric g = generic_hom(1, 9);
  Digraph G = build_gr(g.h, g.witnesses[0].P);
  CHECK(walk_prefix_coincidence(components(G)[0].graph));

  // complete digraph on 2 vertices does not classify
  Digraph k2(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK_THROWS_AS(walk_prefix_coincidence(k2), DomainError);
}

TEST_CASE("odometer arithmetic and prime profiles") {
  OdometerSpec a222{{2, 2, 2}};
  CHECK(odometer_step(a222, {1, 1, 0}) == std::vector<long long>{0, 0, 1});
  CHECK(stage_periods(a222) == std::vector<long long>{2, 4, 8});
  CHECK_THROWS_AS(odometer_step(a222, {2, 0, 0}), DomainError);
  CHECK_THROWS_AS(validate_odometer(OdometerSpec{{2, 1}}), DomainError);

  // exact period m_3 = 12 on the first three coordinates
  OdometerSpec a232{{2, 3, 2}};
  std::vector<long long> x0{0, 0, 0}, x = x0;
  for (int i = 0; i < 12; ++i) {
    x = odometer_step(a232, x);
    if (i < 11) CHECK(x != x0);
  }
  CHECK(x == x0);

  PrimeProfile p610 = M_profile(OdometerSpec{{6, 10}}, 7);
  CHECK(p610.primes.at(2).count == 2);
  CHECK(p610.primes.at(3).count == 1);
  CHECK(p610.primes.at(5).count == 1);
  CHECK_FALSE(p610.primes.count(7));

  // finite-data Buescu-Stewart verdicts
  PrimeProfile a = M_profile(OdometerSpec{{2, 2}}, 7);
  PrimeProfile b = M_profile(OdometerSpec{{4}}, 7);
  CHECK(bs_compare(a, b) == BsVerdict::Equal);
  CHECK(bs_compare(a, M_profile(OdometerSpec{{2, 3}}, 7)) ==
        BsVerdict::Different);
  // saturation: a pending profile with more content is certainly different,
  // one with compatible content is inconclusive
  PrimeProfile pend = M_profile(OdometerSpec{{8}}, 7, true);
  CHECK(bs_compare(a, pend) == BsVerdict::Different);
  PrimeProfile pend2 = M_profile(OdometerSpec{{2}}, 7, true);
  CHECK(bs_compare(a, pend2) == BsVerdict::Inconclusive);
  CHECK(bs_compare(pend, pend) == BsVerdict::Inconclusive);
}

TEST_CASE("omega_covers builds nested odometer covers") {
  HomGeneric g = generic_hom(2, 6);
  Point xl = pick_point(g.witnesses[1].loops[0].a);
  OmegaCovers oc = omega_covers(g.h, g.witnesses, xl, 2);
  REQUIRE(oc.covers.size() == 2);
  CHECK(oc.covers[0].size() == 2);
  CHECK(oc.covers[1].size() == 24);
  CHECK(oc.alpha.alpha == std::vector<long long>{2, 12});
  CHECK(oc.universal_divisibility);
  CHECK(oc.meshes[1] < oc.meshes[0]);
  CHECK(oc.sides == std::vector<int>{0, 0});
  CHECK(oc.settle_steps == std::vector<long long>{0, 0});

  // a right-loop point that needs a few iterations to reach the certificate
  Point xr = apply(g.h, pick_point(g.witnesses[1].loops[0].b));
  OmegaCovers ocr = omega_covers(g.h, g.witnesses, xr, 2);
  CHECK(ocr.sides == std::vector<int>{1, 1});
  CHECK(ocr.settle_steps[1] == 23);  // one step past the base, period 24

  // witness shortage and unsettled orbits are reported
  CHECK_THROWS_AS(omega_covers(g.h, g.witnesses, xl, 3), DomainError);
  LoopCells lc = loop_cells(g.h, g.witnesses[0].P);
  Point bar = pick_point(g.witnesses[0].P.cell(*lc.bar.begin()));
  CHECK_THROWS_AS(omega_covers(g.h, g.witnesses, bar, 1, 0), DomainError);
}

TEST_CASE("recurrence_report certificates") {
  HomGeneric g = generic_hom(1, 7);
  const HomWitness& w = g.witnesses[0];
  Digraph G = build_gr(g.h, w.P);
  ComponentKind k = classify(components(G)[0].graph);
  RecurrenceReport rep = recurrence_report(g.h, w, 4 * 2);

  CHECK(rep.nonrecurrent.size() == (std::size_t)(k.r + k.s + k.t));
  CHECK(rep.loop_cells.size() == (std::size_t)(k.r + k.t));
  CHECK_FALSE(rep.periodic_point_found);
  LoopCells lc = loop_cells(g.h, w.P);
  for (const NonrecurrentCert& c : rep.nonrecurrent) {
    REQUIRE(!c.cells.empty());
    // the tail of every escape itinerary sits in the absorbing right loop
    CHECK(lc.right.count(c.cells.back()));
    // the start cell never recurs
    for (std::size_t i = 1; i < c.cells.size(); ++i)
      CHECK(c.cells[i] != c.cells[0]);
  }

  HomWitness fake{Partition({cl({"0"}), cl({"1"})}), 1, {}};
  CHECK_THROWS_AS(recurrence_report(swap_map(), fake, 4), DomainError);
}

TEST_CASE("chain_modulus moduli and refusals") {
  ContGeneric f = generic_cont(2, 8);
  Rat d2 = chain_modulus(f.f, f.witnesses[1], Point(), Rat(1, 2));
  CHECK(d2 == min_gap(f.witnesses[1].P));
  Rat d0 = chain_modulus(f.f, f.witnesses[0], Point(), Rat(2, 1));
  CHECK(d0 == min_gap(f.witnesses[0].P));
  CHECK_THROWS_AS(
      chain_modulus(f.f, f.witnesses[1], Point(), Rat(1, 1000)), DomainError);

  HomGeneric g = generic_hom(1, 2);
  const HomWitness& w = g.witnesses[0];
  LoopCells lc = loop_cells(g.h, w.P);
  // bar points use the plain partition gap
  Point bar = pick_point(w.P.cell(*lc.bar.begin()));
  CHECK(chain_modulus(g.h, w, bar, Rat(1, 1)) == min_gap(w.P));
  // an escaping left-loop point gets a (possibly finer) modulus
  Digraph G = build_gr(g.h, w.P);
  ComponentKind k = classify(components(G)[0].graph);
  Clopen v1 = w.P.cell(components(G)[0].verts[k.v[0]]);
  Point esc = pick_point(preimage(g.h, v1));
  Rat de = chain_modulus(g.h, w, esc, Rat(1, 1));
  CHECK(Rat::zero() < de);
  CHECK(de <= min_gap(w.P));
  // a certified loop resident has no escape certificate
  Point stay = pick_point(w.loops[0].a);
  CHECK_THROWS_AS(chain_modulus(g.h, w, stay, Rat(1, 1)), DomainError);
}

TEST_CASE("equicontinuity_defect certificates") {
  HomGeneric g = generic_hom(1, 5);
  const HomWitness& w = g.witnesses[0];
  DefectCert c3 = equicontinuity_defect(g.h, w, 0, 3);
  CHECK(!c3.core.is_empty());
  CHECK(c3.core.contains(c3.y));
  CHECK(!c3.core.contains(c3.companion));
  CHECK(Rat::zero() < c3.pair_dist);
  CHECK(c3.stay_steps == 6);  // 3 stages x plate weight 2
  CHECK(1 <= c3.exit_step);
  CHECK(c3.exit_step <= 7);

  DefectCert c0 = equicontinuity_defect(g.h, w, 0, 0);
  CHECK(c0.pair_dist == Rat::zero());
  CHECK(c0.y == c0.companion);

  CHECK_THROWS_AS(equicontinuity_defect(g.h, w, 5, 1), DomainError);
  // deep truncation stages eventually exhaust the word depth budget
  CHECK_THROWS_AS(equicontinuity_defect(g.h, w, 0, 5000), DepthOverflow);
}
