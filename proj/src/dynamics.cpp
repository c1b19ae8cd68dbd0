#include "cantor/dynamics.hpp"

#include <algorithm>
#include <random>
#include <utility>

namespace cantor {

namespace {

Clopen image_n(const PrefixMap& f, Clopen x, long long n) {
  for (long long i = 0; i < n; ++i) x = image(f, x);
  return x;
}

Clopen preimage_n(const PrefixMap& f, Clopen x, long long n) {
  for (long long i = 0; i < n; ++i) x = preimage(f, x);
  return x;
}

long long fact_ll(long long q) {
  long long w = 1;
  for (long long i = 2; i <= q; ++i) {
    if (w > (1LL << 60) / i) throw DomainError("factorial overflow");
    w *= i;
  }
  return w;
}

// cell-indexed view of a classified stage graph
struct StageView {
  enum Role { U, V, W };
  Digraph G;
  std::vector<Component> comps;
  std::vector<ComponentKind> kinds;
  std::vector<std::size_t> comp_of;  // cell -> component
  std::vector<Role> role;            // cell -> role within its component
  std::vector<std::size_t> pos;      // cell -> 0-based position in its role list
};

StageView stage_view(const PrefixMap& f, const Partition& P) {
  StageView s{build_gr(f, P), {}, {}, {}, {}, {}};
  s.comps = components(s.G);
  s.comp_of.assign(s.G.num_vertices(), 0);
  s.role.assign(s.G.num_vertices(), StageView::U);
  s.pos.assign(s.G.num_vertices(), 0);
  for (std::size_t c = 0; c < s.comps.size(); ++c) {
    ComponentKind k = classify(s.comps[c].graph);
    const std::vector<std::size_t>& verts = s.comps[c].verts;
    auto mark = [&](const std::vector<std::size_t>& locals, StageView::Role r) {
      for (std::size_t i = 0; i < locals.size(); ++i) {
        std::size_t v = verts[locals[i]];
        s.comp_of[v] = c;
        s.role[v] = r;
        s.pos[v] = i;
      }
    };
    mark(k.u, StageView::U);
    mark(k.v, StageView::V);
    mark(k.w, StageView::W);
    s.kinds.push_back(std::move(k));
  }
  return s;
}

// h^n(x) for any integer n (h a homeomorphism when n < 0)
Point power_apply(const PrefixMap& h, const Point& x, long long n) {
  if (n >= 0) return apply(iterate(h, (int)n), x);
  return apply(iterate(inverse(h), (int)(-n)), x);
}

}  // namespace

Rat pseudo_orbit_defect(const PrefixMap& f, const PseudoOrbit& po) {
  Rat worst = Rat::zero();
  for (std::size_t k = 0; k + 1 < po.points.size(); ++k) {
    Rat d = dist(apply(f, po.points[k]), po.points[k + 1]);
    if (worst < d) worst = d;
  }
  return worst;
}

std::vector<Point> trajectory(const PrefixMap& f, const Point& x,
                              long long n) {
  if (n < 0) throw DomainError("trajectory: negative length");
  std::vector<Point> out{x};
  for (long long k = 1; k <= n; ++k) {
    try {
      out.push_back(apply(f, out.back()));
    } catch (const DepthOverflow&) {
      throw DepthOverflow("trajectory: point budget exhausted after " +
                          std::to_string(k - 1) + " of " + std::to_string(n) +
                          " steps");
    }
  }
  return out;
}

std::vector<std::size_t> itinerary(const PrefixMap& f, const Point& x,
                                   long long n, const Partition& P) {
  std::vector<Point> tr = trajectory(f, x, n);
  std::vector<std::size_t> cells;
  cells.reserve(tr.size());
  for (const Point& p : tr) cells.push_back(P.locate(p));
  return cells;
}

// ---------------------------------------------------------------------------
// shadowing

ShadowResult shadow(const PrefixMap& h, const HomWitness& w,
                    const PseudoOrbit& po) {
  CheckResult cr = check_property_P(h, w, 1);
  if (!cr.ok) throw DomainError("shadow: witness check failed: " + cr.reason);
  if (po.points.empty()) throw DomainError("shadow: empty window");
  Rat gap = min_gap(w.P);
  if (!(po.delta < gap))
    throw DomainError("shadow: delta " + po.delta.str() +
                      " is not below the partition gap " + gap.str());
  if (po.delta < pseudo_orbit_defect(h, po))
    throw DomainError("shadow: the window is not a delta-pseudotrajectory");

  const Partition& P = w.P;
  StageView sv = stage_view(h, P);
  std::vector<std::size_t> cells;
  for (const Point& p : po.points) cells.push_back(P.locate(p));
  std::size_t comp = sv.comp_of[cells[0]];
  bool has_v = false, has_u = false, has_w = false;
  for (std::size_t c : cells) {
    if (sv.comp_of[c] != comp)
      throw DomainError("shadow: window leaves its dumbbell component");
    has_v |= sv.role[c] == StageView::V;
    has_u |= sv.role[c] == StageView::U;
    has_w |= sv.role[c] == StageView::W;
  }
  if (!has_v && has_u && has_w)
    throw ContractViolation("shadow: itinerary skips the bar");

  const ComponentKind& k = sv.kinds[comp];
  const std::vector<std::size_t>& verts = sv.comps[comp].verts;
  long long r = k.r, t = k.t;
  ShadowResult out;
  out.bound = mesh(P);

  if (has_v) {
    out.kind = 1;
    std::size_t at = 0;
    while (sv.role[cells[at]] != StageView::V) ++at;
    Point x0 = pick_point(P.cell(cells[at]));
    out.x = power_apply(h, x0, -(po.start + (long long)at));
  } else if (has_u || !has_w) {
    out.kind = 2;
    const Clopen& u1 = P.cell(verts[k.u[0]]);
    long long maxfwd = std::max<long long>(
        0, po.start + (long long)po.points.size() - 1);
    long long reps = maxfwd / r + 2;
    Clopen Y = u1;
    for (long long i = 0; i < reps; ++i) {
      Clopen Yn = set_intersect(u1, preimage_n(h, Y, r));
      if (Yn == Y) break;
      Y = std::move(Yn);
    }
    if (Y.is_empty())
      throw ContractViolation("shadow: empty left-loop core");
    // phase: the window sits in u[(n + phi) mod r] at index n
    long long phi =
        (((long long)sv.pos[cells[0]] - po.start) % r + r) % r;
    out.x = power_apply(h, pick_point(Y), phi);
  } else {
    out.kind = 3;
    const Clopen& w1 = P.cell(verts[k.w[0]]);
    const Clopen& vs = P.cell(verts[k.v[(std::size_t)k.s - 1]]);
    long long maxback = std::max<long long>(0, -po.start);
    long long reps = maxback / t + 2;
    Clopen Z = set_subtract(w1, image(h, vs));
    for (long long i = 0; i < reps; ++i) {
      Clopen Zn = image_n(h, Z, t);
      if (Zn == Z) break;
      Z = std::move(Zn);
    }
    if (Z.is_empty())
      throw ContractViolation("shadow: empty right-loop core");
    long long phi =
        (((long long)sv.pos[cells[0]] - po.start) % t + t) % t;
    out.x = power_apply(h, pick_point(Z), phi);
  }

  // exact index-by-index verification
  Point cur = power_apply(h, out.x, po.start);
  for (std::size_t i = 0; i < po.points.size(); ++i) {
    if (out.bound < dist(po.points[i], cur))
      throw ContractViolation("shadow: verification failed at window index " +
                              std::to_string(i));
    if (i + 1 < po.points.size()) cur = apply(h, cur);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Li-Yorke exclusion

namespace {

LiYorkeReport li_yorke_run(const PrefixMap& f, const Partition& P,
                           const Point& x, const Point& y, long long n) {
  LiYorkeReport rep;
  Point cx = x, cy = y;
  for (long long k = 0; k <= n; ++k) {
    std::size_t a = P.locate(cx), b = P.locate(cy);
    if (a == b && rep.merge_index < 0) {
      rep.merge_index = k;
      rep.verdict = LiYorkeVerdict::SameCellTail;
    }
    if (rep.merge_index >= 0 && a != b)
      throw ContractViolation(
          "li_yorke_exclusion: cells split again after merging at step " +
          std::to_string(rep.merge_index));
    rep.steps = k;
    if (k == n) break;
    try {
      cx = apply(f, cx);
      cy = apply(f, cy);
    } catch (const DepthOverflow&) {
      rep.verdict = LiYorkeVerdict::InconclusiveDepth;
      return rep;
    }
  }
  return rep;
}

}  // namespace

LiYorkeReport li_yorke_exclusion(const PrefixMap& h, const HomWitness& w,
                                 const Point& x, const Point& y, long long n) {
  CheckResult cr = check_property_P(h, w, 1);
  if (!cr.ok)
    throw DomainError("li_yorke_exclusion: witness check failed: " + cr.reason);
  return li_yorke_run(h, w.P, x, y, n);
}

LiYorkeReport li_yorke_exclusion(const PrefixMap& f, const ContWitness& w,
                                 const Point& x, const Point& y, long long n) {
  CheckResult cr = check_property_Q(f, w, 1);
  if (!cr.ok)
    throw DomainError("li_yorke_exclusion: witness check failed: " + cr.reason);
  return li_yorke_run(f, w.P, x, y, n);
}

// ---------------------------------------------------------------------------
// walk coincidence

bool walk_prefix_coincidence(const Digraph& comp) {
  ComponentKind k = classify(comp);
  if (k.kind == ComponentKind::Other)
    throw DomainError("walk_prefix_coincidence: component is " + k.str());
  std::size_t n = comp.num_vertices();
  std::size_t len = 2 * n;
  constexpr std::size_t kWalkCap = 1u << 18;

  for (std::size_t v0 = 0; v0 < n; ++v0) {
    // enumerate all walks of length len starting at v0
    std::vector<std::vector<std::size_t>> walks{{v0}};
    for (std::size_t step = 0; step < len; ++step) {
      std::vector<std::vector<std::size_t>> next;
      for (const std::vector<std::size_t>& wk : walks)
        for (std::size_t s : comp.succ(wk.back())) {
          next.push_back(wk);
          next.back().push_back(s);
        }
      if (next.size() > kWalkCap)
        throw DomainError("walk_prefix_coincidence: too many walks");
      walks = std::move(next);
    }
    for (std::size_t a = 0; a < walks.size(); ++a)
      for (std::size_t b = a + 1; b < walks.size(); ++b) {
        // the two walks may split apart at most once: the times where they
        // occupy different vertices must form one contiguous block
        int phase = 0;  // 0 = together, 1 = apart, 2 = rejoined
        for (std::size_t i = 0; i <= len; ++i) {
          bool same = walks[a][i] == walks[b][i];
          if (phase == 0 && !same) phase = 1;
          else if (phase == 1 && same) phase = 2;
          else if (phase == 2 && !same) return false;
        }
      }
  }
  return true;
}

// ---------------------------------------------------------------------------
// odometers

void validate_odometer(const OdometerSpec& spec) {
  if (spec.alpha.empty()) throw DomainError("odometer: no stage data");
  for (long long a : spec.alpha)
    if (a < 2) throw DomainError("odometer: stage entry below 2");
}

std::vector<long long> stage_periods(const OdometerSpec& spec) {
  validate_odometer(spec);
  std::vector<long long> m;
  long long acc = 1;
  for (long long a : spec.alpha) {
    if (acc > (1LL << 60) / a) throw DomainError("odometer: period overflow");
    acc *= a;
    m.push_back(acc);
  }
  return m;
}

std::vector<long long> odometer_step(const OdometerSpec& spec,
                                     std::vector<long long> x) {
  validate_odometer(spec);
  if (x.size() != spec.alpha.size())
    throw DomainError("odometer_step: coordinate count mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < 0 || x[i] >= spec.alpha[i])
      throw DomainError("odometer_step: coordinate " + std::to_string(i) +
                        " out of range");
  long long carry = 1;
  for (std::size_t i = 0; i < x.size() && carry; ++i) {
    x[i] += carry;
    carry = x[i] / spec.alpha[i];
    x[i] %= spec.alpha[i];
  }
  return x;
}

PrimeProfile M_profile(const OdometerSpec& spec, long long prime_bound,
                       bool pending) {
  validate_odometer(spec);
  if (prime_bound < 2) throw DomainError("M_profile: bound below 2");
  PrimeProfile out;
  out.bound = prime_bound;
  out.pending = pending;
  for (long long p = 2; p <= prime_bound; ++p) {
    bool prime = true;
    for (long long q = 2; q * q <= p; ++q)
      if (p % q == 0) { prime = false; break; }
    if (!prime) continue;
    long long count = 0;
    for (long long a : spec.alpha)
      while (a % p == 0) {
        a /= p;
        ++count;
      }
    if (count > 0) out.primes[p] = {count, pending};
  }
  return out;
}

BsVerdict bs_compare(const PrimeProfile& a, const PrimeProfile& b) {
  long long mb = std::min(a.bound, b.bound);
  auto count_of = [](const PrimeProfile& pr, long long p) -> long long {
    auto it = pr.primes.find(p);
    return it == pr.primes.end() ? 0 : it->second.count;
  };
  // a certain disagreement wins over any uncertainty: an exact count below
  // the other side's (lower-bound or exact) count settles "different"
  std::vector<long long> ps;
  for (const auto& [p, e] : a.primes) ps.push_back(p);
  for (const auto& [p, e] : b.primes) ps.push_back(p);
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  bool uncertain = a.pending || b.pending || a.bound != b.bound;
  for (long long p : ps) {
    if (p > mb) { uncertain = true; continue; }
    long long ca = count_of(a, p), cb = count_of(b, p);
    if (!a.pending && !b.pending && ca != cb) return BsVerdict::Different;
    if (!a.pending && b.pending && cb > ca) return BsVerdict::Different;
    if (a.pending && !b.pending && ca > cb) return BsVerdict::Different;
  }
  return uncertain ? BsVerdict::Inconclusive : BsVerdict::Equal;
}

// ---------------------------------------------------------------------------
// limit-set covers

OmegaCovers omega_covers(const PrefixMap& h,
                         const std::vector<HomWitness>& ws, const Point& x,
                         std::size_t stages, long long horizon) {
  if (stages == 0) throw DomainError("omega_covers: zero stages requested");
  if (ws.size() < stages)
    throw DomainError("omega_covers: need " + std::to_string(stages) +
                      " stage witnesses, have " + std::to_string(ws.size()));
  OmegaCovers out;
  long long prev_period = 0;
  for (std::size_t i = 0; i < stages; ++i) {
    const HomWitness& wt = ws[i];
    CheckResult cr = check_property_P(h, wt, (int)(i + 1));
    if (!cr.ok)
      throw DomainError("omega_covers: stage " + std::to_string(i + 1) +
                        " witness check failed: " + cr.reason);
    long long period = fact_ll(wt.q);

    // march the orbit until it enters a loop certificate
    Point cur = x;
    long long step = -1;
    int side = -1;
    const Clopen* base = nullptr;
    for (long long n = 0; n <= horizon && side < 0; ++n) {
      for (const LoopPair& lp : wt.loops) {
        if (lp.a.contains(cur)) { side = 0; base = &lp.a; break; }
        if (lp.b.contains(cur)) { side = 1; base = &lp.b; break; }
      }
      step = n;
      if (side < 0 && n < horizon) cur = apply(h, cur);
    }
    if (side < 0)
      throw DomainError("omega_covers: stage " + std::to_string(i + 1) +
                        ": orbit not settled into a certified loop after " +
                        std::to_string(horizon) + " iterations");

    // the certificate orbit is the cover: exact cyclic permutation
    std::vector<Clopen> cover{*base};
    for (long long k = 1; k < period; ++k)
      cover.push_back(image(h, cover.back()));
    if (!(image(h, cover.back()) == cover.front()))
      throw ContractViolation("omega_covers: cover does not return exactly");
    for (std::size_t a = 0; a < cover.size(); ++a)
      for (std::size_t b = a + 1; b < cover.size(); ++b)
        if (overlaps(cover[a], cover[b]))
          throw ContractViolation("omega_covers: cover sets overlap");

    long long alpha_i;
    if (i == 0) {
      alpha_i = period;
    } else {
      if (period % prev_period != 0)
        throw ContractViolation("omega_covers: stage periods do not divide");
      alpha_i = period / prev_period;
      // refinement: align the new base inside the previous cover, then the
      // whole cycle must follow with the same phase
      const std::vector<Clopen>& prev = out.covers.back();
      std::size_t j0 = prev.size();
      for (std::size_t j = 0; j < prev.size(); ++j)
        if (subset(cover[0], prev[j])) { j0 = j; break; }
      if (j0 == prev.size())
        throw DomainError("omega_covers: stage " + std::to_string(i + 1) +
                          " cover is not aligned with the previous stage");
      for (std::size_t k = 0; k < cover.size(); ++k)
        if (!subset(cover[k], prev[(j0 + k) % prev.size()]))
          throw ContractViolation("omega_covers: refinement fails at k=" +
                                  std::to_string(k));
      if (alpha_i % fact_ll((long long)i) != 0)
        out.universal_divisibility = false;
    }

    Rat m = Rat::zero();
    for (const Clopen& c : cover)
      if (m < diam(c)) m = diam(c);
    out.meshes.push_back(m);
    out.alpha.alpha.push_back(alpha_i);
    out.covers.push_back(std::move(cover));
    out.settle_steps.push_back(step);
    out.sides.push_back(side);
    prev_period = period;
  }
  return out;
}

// ---------------------------------------------------------------------------
// recurrence

RecurrenceReport recurrence_report(const PrefixMap& h, const HomWitness& w,
                                   long long period_bound) {
  CheckResult cr = check_property_P(h, w, 1);
  if (!cr.ok)
    throw DomainError("recurrence_report: witness check failed: " + cr.reason);
  if (period_bound < 1)
    throw DomainError("recurrence_report: period bound below 1");
  const Partition& P = w.P;
  StageView sv = stage_view(h, P);
  RecurrenceReport rep;
  rep.period_bound = period_bound;

  for (std::size_t c = 0; c < sv.comps.size(); ++c) {
    const ComponentKind& k = sv.kinds[c];
    const std::vector<std::size_t>& verts = sv.comps[c].verts;
    const Clopen& v1 = P.cell(verts[k.v[0]]);
    const Clopen& vs = P.cell(verts[k.v[(std::size_t)k.s - 1]]);
    long long horizon = k.r + k.s + k.t;

    auto certify = [&](Clopen S, std::string label) {
      if (S.is_empty())
        throw ContractViolation("recurrence_report: empty certificate set");
      NonrecurrentCert cert{c, std::move(label), S, {}};
      std::size_t start_cell = P.locate(pick_point(S));
      if (!subset(S, P.cell(start_cell)))
        throw ContractViolation("recurrence_report: set straddles cells");
      Clopen X = std::move(S);
      bool in_right = false;
      for (long long n = 0; n <= horizon; ++n) {
        std::size_t cell = P.locate(pick_point(X));
        if (!subset(X, P.cell(cell)))
          throw ContractViolation("recurrence_report: image straddles cells");
        if (n > 0 && cell == start_cell)
          throw ContractViolation(
              "recurrence_report: start cell recurs for " + cert.label);
        bool right = sv.role[cell] == StageView::W;
        if (in_right && !right)
          throw ContractViolation("recurrence_report: right loop not absorbing");
        in_right = right;
        cert.cells.push_back(cell);
        X = image(h, X);
      }
      if (!in_right)
        throw ContractViolation("recurrence_report: escape horizon too short");
      rep.nonrecurrent.push_back(std::move(cert));
    };

    for (long long j = 1; j <= k.r; ++j)
      certify(preimage_n(h, v1, j), "h^-" + std::to_string(j) + "(v1)");
    for (long long i = 0; i < k.s; ++i)
      certify(P.cell(verts[k.v[(std::size_t)i]]), "v" + std::to_string(i + 1));
    for (long long j = 1; j <= k.t; ++j)
      certify(image_n(h, vs, j), "h^" + std::to_string(j) + "(vs)");

    for (std::size_t l : k.u) rep.loop_cells.push_back(verts[l]);
    for (std::size_t l : k.w) rep.loop_cells.push_back(verts[l]);
  }
  std::sort(rep.loop_cells.begin(), rep.loop_cells.end());

  PrefixMap g = h;
  for (long long n = 1; n <= period_bound; ++n) {
    if (!fixed_points(g).empty()) {
      rep.periodic_point_found = true;
      break;
    }
    if (n < period_bound) g = compose(g, h);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// chain continuity

namespace {

// random point within dist < 1/g of x: keep g bits, randomize a short tail
Point perturb(const Point& x, long long g, std::mt19937_64& rng) {
  std::string pre;
  for (long long i = 0; i < g; ++i) pre += char('0' + x.bit((std::size_t)i));
  for (int i = 0; i < 16; ++i) pre += char('0' + (int)(rng() & 1));
  return Point(std::move(pre), rng() & 1 ? "1" : "0");
}

void verify_chains(const PrefixMap& f, const Point& x, const Rat& eps,
                   const Rat& delta, std::uint64_t seed, int chains,
                   int chain_len) {
  if (delta.num != 1)
    throw ContractViolation("chain_modulus: modulus is not of the form 1/n");
  long long g = delta.den;
  std::mt19937_64 rng(seed);
  for (int c = 0; c < chains; ++c) {
    Point ideal = x;
    Point chain = perturb(x, g, rng);
    for (int n = 0; n <= chain_len; ++n) {
      if (!(dist(chain, ideal) < eps))
        throw ContractViolation("chain_modulus: sampled chain " +
                                std::to_string(c) + " violates eps at step " +
                                std::to_string(n));
      if (n == chain_len) break;
      ideal = apply(f, ideal);
      chain = perturb(apply(f, chain), g, rng);
    }
  }
}

}  // namespace

Rat chain_modulus(const PrefixMap& f, const ContWitness& w, const Point& x,
                  const Rat& eps, std::uint64_t seed, int chains,
                  int chain_len) {
  CheckResult cr = check_property_Q(f, w, 1);
  if (!cr.ok)
    throw DomainError("chain_modulus: witness check failed: " + cr.reason);
  if (!(mesh(w.P) < eps))
    throw DomainError("chain_modulus: witness mesh " + mesh(w.P).str() +
                      " is not below eps " + eps.str());
  Rat delta = min_gap(w.P);
  verify_chains(f, x, eps, delta, seed, chains, chain_len);
  return delta;
}

Rat chain_modulus(const PrefixMap& h, const HomWitness& w, const Point& x,
                  const Rat& eps, std::uint64_t seed, int chains,
                  int chain_len) {
  CheckResult cr = check_property_P(h, w, 1);
  if (!cr.ok)
    throw DomainError("chain_modulus: witness check failed: " + cr.reason);
  if (!(mesh(w.P) < eps))
    throw DomainError("chain_modulus: witness mesh " + mesh(w.P).str() +
                      " is not below eps " + eps.str());
  const Partition& P = w.P;
  StageView sv = stage_view(h, P);
  std::size_t cell = P.locate(x);
  Rat delta = min_gap(P);

  if (sv.role[cell] == StageView::U) {
    // a left-loop point needs an escape certificate: find the step at which
    // the orbit enters the bar, then shrink delta so chains follow the rail
    const ComponentKind& k = sv.kinds[sv.comp_of[cell]];
    const std::vector<std::size_t>& verts = sv.comps[sv.comp_of[cell]].verts;
    const Clopen& v1 = P.cell(verts[k.v[0]]);
    long long horizon = 4 * (k.r + k.s + k.t) + 16;
    long long j = -1;
    Point cur = x;
    for (long long n = 1; n <= horizon && j < 0; ++n) {
      cur = apply(h, cur);
      if (v1.contains(cur)) j = n;
    }
    if (j < 0)
      throw DomainError(
          "chain_modulus: not certified nonrecurrent (left-loop orbit did "
          "not reach the bar within " + std::to_string(horizon) + " steps)");
    // escape rail h^-j(v1), ..., h^-1(v1), v1; refine P by every rail set
    std::vector<Clopen> cells(P.cells().begin(), P.cells().end());
    Clopen R = v1;
    for (long long i = 0; i < j; ++i) {
      R = preimage(h, R);
      std::vector<Clopen> next;
      for (const Clopen& c : cells) {
        Clopen in = set_intersect(c, R), rest = set_subtract(c, R);
        if (!in.is_empty()) next.push_back(in);
        if (!rest.is_empty()) next.push_back(rest);
      }
      cells = std::move(next);
    }
    delta = min_gap(Partition(std::move(cells)));
  }
  verify_chains(h, x, eps, delta, seed, chains, chain_len);
  return delta;
}

// ---------------------------------------------------------------------------
// non-equicontinuity defect

DefectCert equicontinuity_defect(const PrefixMap& h, const HomWitness& w,
                                 std::size_t comp, long long n_stage) {
  CheckResult cr = check_property_P(h, w, 1);
  if (!cr.ok)
    throw DomainError("equicontinuity_defect: witness check failed: " +
                      cr.reason);
  if (n_stage < 0)
    throw DomainError("equicontinuity_defect: negative stage");
  const Partition& P = w.P;
  StageView sv = stage_view(h, P);
  if (comp >= sv.comps.size())
    throw DomainError("equicontinuity_defect: no such component");
  const ComponentKind& k = sv.kinds[comp];
  const std::vector<std::size_t>& verts = sv.comps[comp].verts;
  const Clopen& u1 = P.cell(verts[k.u[0]]);
  long long r = k.r;

  DefectCert cert;
  if (n_stage == 0) {
    cert.core = u1;
    cert.y = cert.companion = pick_point(u1);
    cert.pair_dist = Rat::zero();
    return cert;
  }

  Clopen Y = u1, last_diff;
  for (long long n = 1; n <= n_stage; ++n) {
    Clopen Yn = set_intersect(u1, preimage_n(h, Y, r));
    Clopen d = set_subtract(Y, Yn);
    if (!d.is_empty()) last_diff = d;
    Y = std::move(Yn);
  }
  if (Y.is_empty())
    throw ContractViolation("equicontinuity_defect: empty invariant core");
  if (last_diff.is_empty())
    throw ContractViolation("equicontinuity_defect: core never shrank");
  cert.core = Y;

  // closest staying/escaping pair across the last split
  const Word& d0 = last_diff.cyls()[0];
  int best = -1;
  Word best_w;
  for (const Word& wy : Y.cyls()) {
    int l = wy.lcp(d0);
    if (l > best) { best = l; best_w = wy; }
  }
  cert.y = pick_point(Clopen(best_w));
  cert.companion = pick_point(Clopen(d0));
  cert.pair_dist = dist(cert.y, cert.companion);

  // verify: y stays in the left loop for n_stage * r steps, the companion
  // reaches the bar within that horizon
  long long horizon = n_stage * r;
  Point cy = cert.y;
  for (long long n = 0; n <= horizon; ++n) {
    if (sv.role[P.locate(cy)] != StageView::U)
      throw ContractViolation("equicontinuity_defect: core point left the loop");
    if (n < horizon) cy = apply(h, cy);
  }
  cert.stay_steps = horizon;
  Point cc = cert.companion;
  cert.exit_step = -1;
  for (long long n = 1; n <= horizon + 1 && cert.exit_step < 0; ++n) {
    cc = apply(h, cc);
    if (sv.role[P.locate(cc)] == StageView::V) cert.exit_step = n;
  }
  if (cert.exit_step < 0)
    throw ContractViolation("equicontinuity_defect: companion never escaped");
  return cert;
}

}  // namespace cantor
