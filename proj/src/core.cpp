#include "cantor/core.hpp"

#include <atomic>

namespace cantor {

namespace {
std::atomic<int> g_depth_cap{kMaxDepth};
}

int depth_cap() { return g_depth_cap.load(std::memory_order_relaxed); }

void set_depth_cap(int cap) {
  if (cap < 1 || cap > kMaxDepth)
    throw DomainError("depth cap must be between 1 and " + std::to_string(kMaxDepth));
  if (cap > g_depth_cap.load())
    throw DomainError("depth cap can only be lowered");
  g_depth_cap.store(cap, std::memory_order_relaxed);
}

Rat parse_rat(std::string_view s) {
  auto bad = [&] { return DomainError("cannot parse rational '" + std::string(s) + "'"); };
  if (s.empty()) throw bad();
  auto slash = s.find('/');
  auto to_ll = [&](std::string_view t) {
    long long v = 0;
    if (t.empty()) throw bad();
    for (char c : t) {
      if (c < '0' || c > '9') throw bad();
      v = v * 10 + (c - '0');
      if (v > (1LL << 40)) throw bad();
    }
    return v;
  };
  if (slash == std::string_view::npos) return Rat(to_ll(s), 1);
  return Rat(to_ll(s.substr(0, slash)), to_ll(s.substr(slash + 1)));
}

Word Word::from_string(std::string_view s) {
  if ((int)s.size() > kMaxDepth)
    throw DepthOverflow("word longer than depth cap: " + std::string(s));
  Word w;
  for (char c : s) {
    if (c != '0' && c != '1') throw DomainError("word must be binary: " + std::string(s));
    w = w.append(c == '1');
  }
  return w;
}

void Word::check_room(int extra) const {
  if (len_ + extra > depth_cap())
    throw DepthOverflow("depth overflow: word would exceed depth cap " +
                        std::to_string(depth_cap()));
}

}  // namespace cantor
