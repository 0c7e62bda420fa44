#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "sandpile/checked.hpp"
#include "sandpile/error.hpp"
#include "sandpile/graph.hpp"

namespace sandpile {

/// Number of times each ordinary vertex toppled during one stabilization.
struct Odometer {
  std::vector<std::uint64_t> counts;

  friend bool operator==(const Odometer&, const Odometer&) = default;
};

struct Stabilized {
  Configuration config;
  Odometer odometer;
};

struct BurnReport {
  bool recurrent = false;
  std::vector<std::size_t> burn_order;  // V0 positions, in topple order
  std::vector<std::size_t> unburned;    // ascending V0 positions
  Configuration result;                 // sigma(u + beta)
};

/// Soft warnings produced by operations that accept out-of-contract input.
struct Diagnostics {
  std::vector<std::string> messages;
};

/// Order in which unstable vertices are selected during stabilization.
///
/// The default pops the lowest-index unstable vertex and fires it as many
/// times as needed to make it stable. A shuffled schedule picks a uniformly
/// random unstable vertex and fires it once, which exercises genuinely
/// different toppling sequences.
class Schedule {
 public:
  static Schedule lowest_index_first() { return Schedule{}; }
  static Schedule shuffled(std::uint64_t seed) {
    Schedule s;
    s.rng_.emplace(seed);
    return s;
  }

  bool is_shuffled() const noexcept { return rng_.has_value(); }

 private:
  template <typename OnTopple>
  friend void stabilize_in_place(const AmbientSpace&, std::vector<Height>&, std::vector<std::uint64_t>&,
                                 Schedule, OnTopple&&);
  std::optional<std::mt19937_64> rng_;
};

namespace detail {

inline void fire(const AmbientSpace& space, std::vector<Height>& h, std::size_t i, std::uint64_t times) {
  h[i] -= detail::mul(times, space.self_loss(i));
  for (const auto& nb : space.neighbors(i)) h[nb.pos] = detail::add(h[nb.pos], detail::mul(times, nb.mult));
}

inline std::vector<Height> plus(const Configuration& u, const Configuration& v) {
  std::vector<Height> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = detail::add(u[i], v[i]);
  return out;
}

}  // namespace detail

/// Core stabilization loop. `on_topple(pos, times)` observes every firing.
template <typename OnTopple>
void stabilize_in_place(const AmbientSpace& space, std::vector<Height>& h, std::vector<std::uint64_t>& odometer,
                        Schedule schedule, OnTopple&& on_topple) {
  const std::size_t n = space.size();
  auto unstable = [&](std::size_t i) { return h[i] >= space.degree(i); };

  if (!schedule.rng_) {
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> work;
    std::vector<bool> queued(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (unstable(i)) {
        work.push(i);
        queued[i] = true;
      }
    }
    while (!work.empty()) {
      const std::size_t i = work.top();
      work.pop();
      queued[i] = false;
      if (!unstable(i)) continue;
      const std::uint64_t times = (h[i] - space.degree(i)) / space.self_loss(i) + 1;
      detail::fire(space, h, i, times);
      odometer[i] = detail::add(odometer[i], times);
      on_topple(i, times);
      for (const auto& nb : space.neighbors(i)) {
        if (!queued[nb.pos] && unstable(nb.pos)) {
          work.push(nb.pos);
          queued[nb.pos] = true;
        }
      }
    }
    return;
  }

  auto& rng = *schedule.rng_;
  std::vector<std::size_t> pool;
  std::vector<bool> pooled(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (unstable(i)) {
      pool.push_back(i);
      pooled[i] = true;
    }
  }
  while (!pool.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const std::size_t k = pick(rng);
    const std::size_t i = pool[k];
    pool[k] = pool.back();
    pool.pop_back();
    pooled[i] = false;
    detail::fire(space, h, i, 1);
    odometer[i] = detail::add(odometer[i], 1);
    on_topple(i, 1);
    if (unstable(i)) {
      pool.push_back(i);
      pooled[i] = true;
    }
    for (const auto& nb : space.neighbors(i)) {
      if (!pooled[nb.pos] && unstable(nb.pos)) {
        pool.push_back(nb.pos);
        pooled[nb.pos] = true;
      }
    }
  }
}

/// Fires vertex `i` once. Throws NotUnstable if u_i < deg(i).
inline Configuration topple(const AmbientSpace& space, const Configuration& u, std::size_t i) {
  space.require_size(u);
  if (i >= space.size()) throw Error(Errc::UnknownVertex, "position out of range");
  if (u[i] < space.degree(i)) {
    throw Error(Errc::NotUnstable, "vertex '" + space.name(i) + "' is stable and cannot topple");
  }
  Configuration out = u;
  detail::fire(space, out.heights, i, 1);
  return out;
}

/// sigma(u) together with its odometer. The result does not depend on the schedule.
inline Stabilized stabilize(const AmbientSpace& space, const Configuration& u,
                            Schedule schedule = Schedule::lowest_index_first()) {
  space.require_size(u);
  Stabilized out{u, {std::vector<std::uint64_t>(space.size(), 0)}};
  stabilize_in_place(space, out.config.heights, out.odometer.counts, std::move(schedule),
                     [](std::size_t, std::uint64_t) {});
  return out;
}

/// u (+) v = sigma(u + v). Unstable inputs are accepted and reported in `diag`.
inline Configuration monoid_add(const AmbientSpace& space, const Configuration& u, const Configuration& v,
                                Diagnostics* diag = nullptr) {
  space.require_size(u);
  space.require_size(v);
  if (diag) {
    if (!space.is_stable(u)) diag->messages.push_back("monoid_add: left operand is not stable");
    if (!space.is_stable(v)) diag->messages.push_back("monoid_add: right operand is not stable");
  }
  return stabilize(space, Configuration{detail::plus(u, v)}).config;
}

/// Burning algorithm: stabilize u + beta and record which vertices fire.
/// u is recurrent iff every vertex fires, each exactly once.
inline BurnReport burning_test(const AmbientSpace& space, const Configuration& u) {
  if (!space.is_stable(u)) throw Error(Errc::NotStable, "burning test requires a stable configuration");
  const std::size_t n = space.size();
  BurnReport report;
  report.result.heights = u.heights;
  for (std::size_t i = 0; i < n; ++i) report.result[i] = detail::add(u[i], space.beta()[i]);
  std::vector<std::uint64_t> fired(n, 0);
  stabilize_in_place(space, report.result.heights, fired, Schedule::lowest_index_first(),
                     [&](std::size_t i, std::uint64_t times) {
                       for (std::uint64_t t = 0; t < times; ++t) report.burn_order.push_back(i);
                     });
  for (std::size_t i = 0; i < n; ++i) {
    if (fired[i] > 1) throw std::logic_error("burning test fired a vertex twice");
    if (fired[i] == 0) report.unburned.push_back(i);
  }
  report.recurrent = report.unburned.empty();
  if (report.recurrent && report.result != u) {
    throw std::logic_error("burning test: every vertex fired but u + beta did not return to u");
  }
  return report;
}

inline bool is_recurrent(const AmbientSpace& space, const Configuration& u) {
  return space.is_stable(u) && burning_test(space, u).recurrent;
}

/// The unique recurrent configuration in u + Lambda, found by iterating
/// w <- sigma(w + beta) from sigma(u) until w is a fixpoint. Adding beta
/// stays in the class because beta is the sum of the rows of Delta.
///
/// The iterates are sigma(u + k beta): distinct stable configurations until
/// the fixpoint, so the number of stable configurations bounds the loop.
inline Configuration recurrent_representative(const AmbientSpace& space, const Configuration& u) {
  space.require_size(u);
  BigInt stable_count = 1;
  for (std::size_t i = 0; i < space.size(); ++i) stable_count *= space.degree(i);
  const std::uint64_t cap = stable_count > std::numeric_limits<std::uint64_t>::max()
                                ? std::numeric_limits<std::uint64_t>::max()
                                : static_cast<std::uint64_t>(stable_count);
  Configuration w = stabilize(space, u).config;
  for (std::uint64_t iter = 0; iter <= cap; ++iter) {
    Configuration next = w;
    for (std::size_t i = 0; i < space.size(); ++i) next[i] = detail::add(next[i], space.beta()[i]);
    next = stabilize(space, next).config;
    if (next == w) return w;
    w = std::move(next);
  }
  throw Error(Errc::IterationCap, "beta iteration did not reach a fixpoint within prod deg(i) steps");
}

/// Neutral element of the sandpile group.
inline Configuration identity(const AmbientSpace& space) {
  return recurrent_representative(space, Configuration::zero(space.size()));
}

/// u (+) u (+) ... (k times), by square-and-multiply. u must be recurrent.
inline Configuration group_power(const AmbientSpace& space, const Configuration& u, BigInt k) {
  Configuration result = identity(space);
  Configuration base = u;
  while (k > 0) {
    if (boost::multiprecision::bit_test(k, 0)) result = monoid_add(space, result, base);
    k >>= 1;
    if (k > 0) base = monoid_add(space, base, base);
  }
  return result;
}

/// Group inverse, computed as u^(#G - 1).
inline Configuration group_inverse(const AmbientSpace& space, const Configuration& u) {
  space.require_size(u);
  if (!is_recurrent(space, u)) throw Error(Errc::NotRecurrent, "group inverse requires a recurrent configuration");
  return group_power(space, u, group_order(space) - 1);
}

/// Every recurrent configuration, by running the burning test over the
/// stable box. Throws CapExceeded when #G > cap.
inline std::vector<Configuration> enumerate_group(const AmbientSpace& space, std::uint64_t cap) {
  const BigInt order = group_order(space);
  if (order > cap) {
    throw Error(Errc::CapExceeded, "#G = " + order.str() + " exceeds the enumeration cap " + std::to_string(cap));
  }
  const std::size_t n = space.size();
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(order));
  Configuration u = Configuration::zero(n);
  while (true) {
    if (burning_test(space, u).recurrent) out.push_back(u);
    std::size_t k = 0;
    while (k < n && ++u[k] == space.degree(k)) u[k++] = 0;
    if (k == n) break;
  }
  return out;
}

}  // namespace sandpile
