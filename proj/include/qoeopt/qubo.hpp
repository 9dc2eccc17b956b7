// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qoeopt/error.hpp"

namespace qoeopt {

// Symmetric QUBO: energy(q) = q^T Q q + offset over binary q.
struct QuboProblem {
  Eigen::MatrixXd q;
  double offset = 0.0;

  int size() const { return static_cast<int>(q.rows()); }
  double energy(const std::vector<uint8_t>& bits) const;
};

struct AnnealSchedule {
  int sweeps = 2000;
  double t_init = 5.0;
  double t_final = 0.01;
  int restarts = 10;
};

struct QuboSolution {
  std::vector<uint8_t> bits;
  double energy = 0.0;
  // best-so-far after each restart (non-increasing)
  std::vector<double> restart_best;
};

// Single-flip Metropolis annealing with geometric temperature decay. Restarts
// are merged by best energy, then lowest restart index; deterministic given
// the seed.
QuboSolution solve_sa(const QuboProblem& p, const AnnealSchedule& schedule,
                      uint64_t seed);

// Exhaustive minimum for up to 24 variables; ties resolved to the
// lexicographically smallest bitstring.
QuboSolution solve_exact(const QuboProblem& p);

// Plain text export for external annealer tooling:
//   # qubo size <n> offset <c>
//   i j v        (i <= j; energy = sum_{i<=j} v_ij q_i q_j + c)
void save_qubo_text(const QuboProblem& p, const std::string& path);
QuboProblem load_qubo_text(const std::string& path);

}  // namespace qoeopt
