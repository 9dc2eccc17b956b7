// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qoeopt/error.hpp"

namespace qoeopt {

struct GridDim {
  std::string name;
  std::vector<double> values;  // strictly increasing
};

struct Grid {
  std::vector<GridDim> dims;

  int ndims() const { return static_cast<int>(dims.size()); }
  int size(int k) const { return static_cast<int>(dims[k].values.size()); }
  long total() const;
  std::vector<double> physical(const std::vector<int>& idx) const;
  void validate() const;
};

using ObjectiveFn = std::function<double(const std::vector<int>&)>;

struct OptResult {
  std::vector<int> index;
  std::vector<double> values;  // physical coordinates of `index`
  double objective = 0.0;
  long evaluations = 0;  // exact count of calls made to f
  double wall_ms = 0.0;
  // exact-equality ties with the best value: over the whole grid for brute
  // force, over the evaluated points for ttopt
  long tie_count = 0;
  int sweeps = 0;
  std::map<std::string, double> predicted;  // KQI report, filled by callers
};

struct TtOptConfig {
  int rank = 4;
  long budget = 0;  // 0 -> 10 * rank * sum(n_k)
  int no_improve_sweeps = 3;
  double maxvol_delta = 0.01;
  int maxvol_max_iter = 100;
};

// Gradient-free discrete maximization by tensor-train cross approximation:
// alternating forward/backward sweeps build maxvol-selected index sets while
// every raw evaluation feeds best-seen tracking. Stops when the evaluation
// budget is exhausted or no sweep improved the best value for
// `no_improve_sweeps` consecutive sweeps. Deterministic given the seed.
OptResult ttopt_maximize(const ObjectiveFn& f, const Grid& grid,
                         const TtOptConfig& cfg, uint64_t seed);

// Exhaustive scan (grid total capped at 1e7); ties resolve to the
// lexicographically smallest multi-index. Optionally records every optimum.
OptResult brute_force_maximize(const ObjectiveFn& f, const Grid& grid,
                               std::vector<std::vector<int>>* all_optima = nullptr);

}  // namespace qoeopt
