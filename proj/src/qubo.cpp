// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/qubo.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qoeopt/rng.hpp"

namespace qoeopt {

double QuboProblem::energy(const std::vector<uint8_t>& bits) const {
  const int n = size();
  if (static_cast<int>(bits.size()) != n) {
    throw Error(Errc::invalid_value, "bitstring length mismatch");
  }
  std::vector<int> set;
  set.reserve(bits.size());
  for (int i = 0; i < n; ++i) {
    if (bits[i]) set.push_back(i);
  }
  double e = offset;
  for (size_t a = 0; a < set.size(); ++a) {
    e += q(set[a], set[a]);
    for (size_t b = a + 1; b < set.size(); ++b) {
      e += 2.0 * q(set[a], set[b]);
    }
  }
  return e;
}

QuboSolution solve_sa(const QuboProblem& p, const AnnealSchedule& schedule,
                      uint64_t seed) {
  if (schedule.sweeps < 1 || schedule.restarts < 1 ||
      schedule.t_init <= 0.0 || schedule.t_final <= 0.0) {
    throw Error(Errc::config_error, "anneal schedule values must be positive");
  }
  if (!(schedule.t_init > schedule.t_final)) {
    throw Error(Errc::config_error, "t_init must exceed t_final");
  }

  const int n = p.size();
  QuboSolution best;
  best.energy = std::numeric_limits<double>::infinity();

  const double ratio = schedule.t_final / schedule.t_init;
  for (int restart = 0; restart < schedule.restarts; ++restart) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(restart)));

    std::vector<uint8_t> bits(n);
    for (int i = 0; i < n; ++i) bits[i] = static_cast<uint8_t>(rng.uniform_int(2));

    // local fields h = Q b; flipping bit i costs 2 s h_i + Q_ii with s = +-1
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (bits[i]) h += p.q.col(i);
    }
    double e = p.energy(bits);
    std::vector<uint8_t> restart_bits = bits;
    double restart_e = e;

    for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
      const double frac = schedule.sweeps > 1
                              ? static_cast<double>(sweep) / (schedule.sweeps - 1)
                              : 0.0;
      const double t = schedule.t_init * std::pow(ratio, frac);
      for (int i = 0; i < n; ++i) {
        const double s = bits[i] ? -1.0 : 1.0;
        const double de = 2.0 * s * h(i) + p.q(i, i);
        if (de <= 0.0 || rng.uniform() < std::exp(-de / t)) {
          bits[i] ^= 1u;
          h += s * p.q.col(i);
          e += de;
          if (e < restart_e) {
            restart_e = e;
            restart_bits = bits;
          }
        }
      }
    }

    // re-evaluate from scratch so incremental drift cannot leak out
    restart_e = p.energy(restart_bits);
    if (restart_e < best.energy) {
      best.energy = restart_e;
      best.bits = restart_bits;
    }
    best.restart_best.push_back(best.energy);
  }
  return best;
}

QuboSolution solve_exact(const QuboProblem& p) {
  const int n = p.size();
  if (n > 24) {
    throw Error(Errc::size_error,
                "exact solver capped at 24 variables, got " + std::to_string(n));
  }

  QuboSolution best;
  best.energy = std::numeric_limits<double>::infinity();
  std::vector<uint8_t> bits(n);
  const uint64_t total = 1ULL << n;
  // bit p of the string is bit (n-1-p) of m, so ascending m enumerates
  // bitstrings in lexicographic order and strict improvement keeps the
  // lexicographically smallest optimum
  for (uint64_t m = 0; m < total; ++m) {
    for (int pbit = 0; pbit < n; ++pbit) {
      bits[pbit] = static_cast<uint8_t>((m >> (n - 1 - pbit)) & 1ULL);
    }
    const double e = p.energy(bits);
    if (e < best.energy) {
      best.energy = e;
      best.bits = bits;
    }
  }
  best.restart_best.push_back(best.energy);
  return best;
}

void save_qubo_text(const QuboProblem& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", p.offset);
  out << "# qubo size " << p.size() << " offset " << buf << '\n';
  for (int i = 0; i < p.size(); ++i) {
    for (int j = i; j < p.size(); ++j) {
      const double v = (i == j) ? p.q(i, i) : 2.0 * p.q(i, j);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << i << ' ' << j << ' ' << buf << '\n';
    }
  }
}

QuboProblem load_qubo_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::io_error, "empty qubo file");

  QuboProblem p;
  int n = 0;
  // header: "# qubo size <n> offset <c>"
  {
    std::istringstream hdr(line);
    std::string tok;
    hdr >> tok >> tok >> tok >> n >> tok >> p.offset;
  }
  if (n <= 0) throw Error(Errc::io_error, "bad qubo header");
  p.q = Eigen::MatrixXd::Zero(n, n);
  int i, j;
  double v;
  while (in >> i >> j >> v) {
    if (i == j) {
      p.q(i, i) = v;
    } else {
      p.q(i, j) = v / 2.0;
      p.q(j, i) = v / 2.0;
    }
  }
  return p;
}

}  // namespace qoeopt
