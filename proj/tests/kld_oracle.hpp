#pragma once

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "wordlearn/tutor_sim.hpp"

namespace oracle {

// Direct summation over the union of supports, with the same epsilon floor.
// Listed items of probability 0 are outside the support.
inline double kld(const wordlearn::sim::Distribution& p, const wordlearn::sim::Distribution& q, double eps) {
  std::map<std::string, std::pair<double, double>> pq;
  for (const auto& [k, v] : p.items) pq[k].first = v;
  for (const auto& [k, v] : q.items) pq[k].second = v;
  std::erase_if(pq, [](const auto& e) { return e.second.first == 0.0 && e.second.second == 0.0; });
  bool floored = false;
  double z = 0.0;
  for (auto& [k, v] : pq) {
    if (v.second < eps) {
      v.second = eps;
      floored = true;
    }
    z += v.second;
  }
  double sum = 0.0;
  for (const auto& [k, v] : pq) {
    if (v.first == 0.0) continue;
    const double qn = floored ? v.second / z : v.second;
    sum += v.first * std::log(v.first / qn);
  }
  return sum;
}

// About one entry in five is zero.
inline wordlearn::sim::Distribution random_distribution(std::mt19937_64& rng, const std::vector<std::string>& support) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution zero(0.2);
  std::vector<double> w(support.size());
  for (auto& x : w) x = zero(rng) ? 0.0 : u(rng);
  if (std::accumulate(w.begin(), w.end(), 0.0) == 0.0) w[0] = 1.0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  wordlearn::sim::Distribution d;
  for (std::size_t i = 0; i < support.size(); ++i) d.items.push_back({support[i], w[i] / total});
  return d;
}

}  // namespace oracle
