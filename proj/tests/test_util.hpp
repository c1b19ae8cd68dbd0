// Shared random generators for the property tests.  Everything is seeded
// explicitly so failures reproduce.

#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "cantor/prefix_map.hpp"

namespace cantor::testutil {

inline void antichain_rec(std::mt19937_64& rng, const Word& w, int max_depth,
                          std::vector<Word>& out) {
  if (w.size() >= max_depth || (w.size() > 0 && rng() % 10 < 4)) {
    out.push_back(w);
    return;
  }
  antichain_rec(rng, w.append(0), max_depth, out);
  antichain_rec(rng, w.append(1), max_depth, out);
}

// a random complete antichain of depth <= max_depth (at least 2 words)
inline std::vector<Word> random_complete_antichain(std::mt19937_64& rng, int max_depth) {
  std::vector<Word> out;
  antichain_rec(rng, Word(), max_depth, out);
  return out;
}

inline void grow_to(std::vector<Word>& v, std::size_t n) {
  while (v.size() < n) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].size() < v[pick].size()) pick = i;
    Word w = v[pick];
    v[pick] = w.append(0);
    v.push_back(w.append(1));
    std::sort(v.begin(), v.end());
  }
}

inline PrefixMap random_homeo(std::mt19937_64& rng, int max_depth) {
  std::vector<Word> a = random_complete_antichain(rng, max_depth);
  std::vector<Word> b = random_complete_antichain(rng, max_depth);
  grow_to(a, b.size());
  grow_to(b, a.size());
  std::shuffle(b.begin(), b.end(), rng);
  std::vector<Rule> rules;
  for (std::size_t i = 0; i < a.size(); ++i) rules.push_back(Rule{a[i], b[i]});
  return PrefixMap(std::move(rules));
}

inline Word random_word(std::mt19937_64& rng, int max_depth) {
  int n = (int)(rng() % (max_depth + 1));
  Word w;
  for (int i = 0; i < n; ++i) w = w.append((int)(rng() % 2));
  return w;
}

// arbitrary continuous prefix map (not necessarily injective)
inline PrefixMap random_map(std::mt19937_64& rng, int max_depth) {
  std::vector<Rule> rules;
  for (const Word& s : random_complete_antichain(rng, max_depth))
    rules.push_back(Rule{s, random_word(rng, max_depth)});
  return PrefixMap(std::move(rules));
}

inline Point random_point(std::mt19937_64& rng, int max_len) {
  auto bits = [&](int lo, int hi) {
    int n = lo + (int)(rng() % (hi - lo + 1));
    std::string s;
    for (int i = 0; i < n; ++i) s.push_back(rng() % 2 ? '1' : '0');
    return s;
  };
  return Point(bits(0, max_len), bits(1, max_len));
}

// random partition whose cells are unions of cylinders of depth <= max_depth
inline Partition random_partition(std::mt19937_64& rng, int max_depth,
                                  std::size_t max_cells = 6) {
  std::vector<Word> leaves = random_complete_antichain(rng, max_depth);
  std::size_t k = 1 + rng() % std::min(max_cells, leaves.size());
  std::vector<std::vector<Word>> buckets(k);
  for (std::size_t i = 0; i < leaves.size(); ++i)
    buckets[i < k ? i : rng() % k].push_back(leaves[i]);
  std::vector<Clopen> cells;
  for (auto& b : buckets)
    if (!b.empty()) cells.emplace_back(std::move(b));
  return Partition(std::move(cells));
}

inline PrefixMap make_map(std::initializer_list<std::pair<const char*, const char*>> rs) {
  std::vector<Rule> rules;
  for (auto& [s, d] : rs)
    rules.push_back(Rule{Word::from_string(s), Word::from_string(d)});
  return PrefixMap(std::move(rules));
}

inline PrefixMap swap_map() { return make_map({{"0", "1"}, {"1", "0"}}); }
inline PrefixMap shift_map() { return make_map({{"0", ""}, {"1", ""}}); }

inline Clopen cl(std::initializer_list<const char*> words) {
  std::vector<Word> v;
  for (const char* w : words) v.push_back(Word::from_string(w));
  return Clopen(std::move(v));
}

}  // namespace cantor::testutil
