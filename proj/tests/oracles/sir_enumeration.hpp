#pragma once

// Brute-force reference for tiny chain-binomial SIR instances. Independent of
// the library: plain loops, lgamma-based binomial pmf, explicit hazard sums.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

struct TinySir {
  std::vector<std::int64_t> population;           // N_i
  std::vector<std::vector<double>> connectivity;  // C_ij
  double gamma = 0.1;
  double delta_t = 1.0;
  std::size_t num_times = 1;
  std::vector<std::int64_t> x0;  // m x 3 row-major (S, I, R)
  double beta1 = 0.0;
  double beta2 = 0.0;

  std::size_t pops() const { return population.size(); }
};

inline double binomial_log_pmf(std::int64_t n, std::int64_t k, double p) {
  if (k < 0 || k > n) return -INFINITY;
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         k * std::log(p) + (n - k) * std::log1p(-p);
}

/// Infection probability for population i from a scalar double loop.
inline double infection_probability(const TinySir& model, const std::vector<std::int64_t>& state,
                                    std::size_t i) {
  double hazard = model.beta1 * state[i * 3 + 1] / static_cast<double>(model.population[i]);
  for (std::size_t j = 0; j < model.pops(); ++j) {
    hazard += model.beta2 * model.connectivity[i][j] * state[j * 3 + 1] /
              static_cast<double>(model.population[j]);
  }
  return 1.0 - std::exp(-hazard * model.delta_t);
}

/// Log-probability of an event tensor laid out [t][pop][si, ir].
inline double event_log_prob(const TinySir& model, const std::vector<std::int64_t>& events) {
  const std::size_t m = model.pops();
  std::vector<std::int64_t> state = model.x0;
  const double removal = 1.0 - std::exp(-model.gamma * model.delta_t);
  double total = 0.0;
  for (std::size_t t = 0; t < model.num_times; ++t) {
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = infection_probability(model, state, i);
    for (std::size_t i = 0; i < m; ++i) {
      const auto si = events[(t * m + i) * 2];
      const auto ir = events[(t * m + i) * 2 + 1];
      total += binomial_log_pmf(state[i * 3], si, p[i]);
      total += binomial_log_pmf(state[i * 3 + 1], ir, removal);
      state[i * 3] -= si;
      state[i * 3 + 1] += si - ir;
      state[i * 3 + 2] += ir;
    }
  }
  return total;
}

/// Visits every event tensor whose counts never exceed the compartment they
/// leave. The callback receives the flattened tensor.
inline void for_each_feasible(const TinySir& model,
                              const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  const std::size_t m = model.pops();
  std::vector<std::int64_t> events(model.num_times * m * 2, 0);
  std::function<void(std::size_t, std::vector<std::int64_t>)> recurse =
      [&](std::size_t cell, std::vector<std::int64_t> state) {
        if (cell == model.num_times * m) {
          visit(events);
          return;
        }
        const std::size_t i = cell % m;
        // State advances only after the last population of a block.
        const auto s = state[i * 3], inf = state[i * 3 + 1];
        for (std::int64_t si = 0; si <= s; ++si) {
          for (std::int64_t ir = 0; ir <= inf; ++ir) {
            events[cell * 2] = si;
            events[cell * 2 + 1] = ir;
            auto next = state;
            if (i + 1 == m) {
              const std::size_t t = cell / m;
              for (std::size_t j = 0; j < m; ++j) {
                const auto a = events[(t * m + j) * 2], b = events[(t * m + j) * 2 + 1];
                next[j * 3] -= a;
                next[j * 3 + 1] += a - b;
                next[j * 3 + 2] += b;
              }
            }
            recurse(cell + 1, next);
          }
        }
        events[cell * 2] = 0;
        events[cell * 2 + 1] = 0;
      };
  recurse(0, model.x0);
}

/// Normalized posterior over infection histories given fixed removals,
/// keyed by the flattened tensor.
inline std::map<std::vector<std::int64_t>, double> conditional_on_removals(
    const TinySir& model, const std::vector<std::int64_t>& removals_by_cell) {
  const std::size_t m = model.pops();
  std::map<std::vector<std::int64_t>, double> out;
  double total = 0.0;
  for_each_feasible(model, [&](const std::vector<std::int64_t>& events) {
    for (std::size_t cell = 0; cell < model.num_times * m; ++cell) {
      if (events[cell * 2 + 1] != removals_by_cell[cell]) return;
    }
    const double w = std::exp(event_log_prob(model, events));
    if (w > 0.0) {
      out[events] = w;
      total += w;
    }
  });
  for (auto& [k, v] : out) v /= total;
  return out;
}

}  // namespace oracle
