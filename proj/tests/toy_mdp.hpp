#pragma once

#include <array>
#include <cmath>
#include <random>

#include "wordlearn/agent.hpp"

namespace toy {

// Chain 0..4 with terminals at both ends. Moves cost 1; entering 0 pays 6,
// entering the pit at 3 costs 6 more, entering 4 pays 10. The optimum goes
// left from 1 and 2 and right from 3.
inline constexpr int kStates = 5;
inline constexpr std::size_t kLeft = 0;
inline constexpr std::size_t kRight = 1;

inline bool terminal(int s) { return s == 0 || s == kStates - 1; }

inline std::pair<int, double> step(int s, std::size_t a) {
  const int next = a == kLeft ? s - 1 : s + 1;
  double r = -1.0;
  if (next == 0) r += 6.0;
  if (next == 3) r -= 6.0;
  if (next == kStates - 1) r += 10.0;
  return {next, r};
}

// Value iteration to convergence; returns the optimal action per state.
inline std::array<std::size_t, kStates> optimal_policy() {
  std::array<double, kStates> v{};
  for (int it = 0; it < 1000; ++it) {
    double delta = 0.0;
    for (int s = 1; s < kStates - 1; ++s) {
      double best = -1e300;
      for (std::size_t a : {kLeft, kRight}) {
        const auto [n, r] = step(s, a);
        best = std::max(best, r + v[static_cast<std::size_t>(n)]);
      }
      delta = std::max(delta, std::abs(best - v[static_cast<std::size_t>(s)]));
      v[static_cast<std::size_t>(s)] = best;
    }
    if (delta < 1e-12) break;
  }
  std::array<std::size_t, kStates> policy{};
  for (int s = 1; s < kStates - 1; ++s) {
    const auto [nl, rl] = step(s, kLeft);
    const auto [nr, rr] = step(s, kRight);
    policy[static_cast<std::size_t>(s)] =
        rl + v[static_cast<std::size_t>(nl)] >= rr + v[static_cast<std::size_t>(nr)] ? kLeft : kRight;
  }
  return policy;
}

// SARSA from a zero table; episodes start in a uniformly drawn non-terminal
// state. True when the greedy policy matches the optimum in every state.
inline bool sarsa_finds_optimum(std::uint64_t seed, int episodes = 5000, double alpha = 0.1, double gamma = 1.0,
                                double epsilon = 0.2) {
  using namespace wordlearn::agent;
  QTable q(2, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> start(1, kStates - 2);
  for (int e = 0; e < episodes; ++e) {
    int s = start(rng);
    std::size_t a = select_action(q, static_cast<std::uint64_t>(s), epsilon, rng);
    for (int t = 0; t < 200; ++t) {
      const auto [n, r] = step(s, a);
      if (terminal(n)) {
        sarsa_update(q, static_cast<std::uint64_t>(s), a, r, std::nullopt, alpha, gamma);
        break;
      }
      const std::size_t a2 = select_action(q, static_cast<std::uint64_t>(n), epsilon, rng);
      sarsa_update(q, static_cast<std::uint64_t>(s), a, r, std::pair{static_cast<std::uint64_t>(n), a2}, alpha, gamma);
      s = n;
      a = a2;
    }
  }
  const auto best = optimal_policy();
  for (int s = 1; s < kStates - 1; ++s)
    if (q.best(static_cast<std::uint64_t>(s)) != best[static_cast<std::size_t>(s)]) return false;
  return true;
}

}  // namespace toy
