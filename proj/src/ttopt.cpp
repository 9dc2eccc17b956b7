// SPDX-License-Identifier: Apache-2.0

#include "qoeopt/ttopt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "qoeopt/maxvol.hpp"
#include "qoeopt/rng.hpp"

namespace qoeopt {

long Grid::total() const {
  long t = 1;
  for (const auto& dim : dims) {
    t *= static_cast<long>(dim.values.size());
  }
  return t;
}

std::vector<double> Grid::physical(const std::vector<int>& idx) const {
  std::vector<double> out(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    out[k] = dims[k].values[static_cast<size_t>(idx[k])];
  }
  return out;
}

void Grid::validate() const {
  if (dims.empty()) throw Error(Errc::config_error, "empty grid");
  for (const auto& dim : dims) {
    if (dim.values.empty()) {
      throw Error(Errc::config_error, "empty grid dimension " + dim.name);
    }
    for (size_t i = 1; i < dim.values.size(); ++i) {
      if (!(dim.values[i] > dim.values[i - 1])) {
        throw Error(Errc::config_error,
                    "grid values must be strictly increasing in " + dim.name);
      }
    }
  }
}

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

// Per-run evaluation cache with strict budget accounting: `evals` counts
// actual calls to f; cache hits are free.
class Evaluator {
 public:
  Evaluator(const ObjectiveFn& f, const Grid& grid, long budget)
      : f_(f), budget_(budget) {
    const int d = grid.ndims();
    strides_.resize(d);
    long s = 1;
    for (int k = d - 1; k >= 0; --k) {
      strides_[k] = s;
      s *= grid.size(k);
    }
    total_ = s;
    use_flat_ = total_ <= (1L << 22);
    if (use_flat_) {
      flat_.assign(static_cast<size_t>(total_),
                   std::numeric_limits<double>::quiet_NaN());
    }
  }

  // false when the budget is exhausted and the point is not cached
  bool eval(const std::vector<int>& idx, double& out) {
    const long key = flatten(idx);
    if (use_flat_) {
      const double cached = flat_[static_cast<size_t>(key)];
      if (!std::isnan(cached)) {
        out = cached;
        return true;
      }
    } else {
      const auto it = map_.find(key);
      if (it != map_.end()) {
        out = it->second;
        return true;
      }
    }
    if (evals_ >= budget_) {
      exhausted_ = true;
      return false;
    }
    const double v = f_(idx);
    ++evals_;
    if (!std::isfinite(v)) {
      throw Error(Errc::invalid_value, "objective returned non-finite value");
    }
    if (use_flat_) {
      flat_[static_cast<size_t>(key)] = v;
    } else {
      map_.emplace(key, v);
    }
    if (v > best_) {
      best_ = v;
      best_idx_ = idx;
      improved_ = true;
    }
    out = v;
    return true;
  }

  void reset_improved() { improved_ = false; }
  bool improved() const { return improved_; }
  bool exhausted() const { return exhausted_; }
  long evals() const { return evals_; }
  double best() const { return best_; }
  const std::vector<int>& best_index() const { return best_idx_; }

  long count_ties() const {
    long ties = 0;
    if (use_flat_) {
      for (double v : flat_) {
        if (v == best_) ++ties;
      }
    } else {
      for (const auto& [k, v] : map_) {
        if (v == best_) ++ties;
      }
    }
    return ties;
  }

 private:
  long flatten(const std::vector<int>& idx) const {
    long key = 0;
    for (size_t k = 0; k < idx.size(); ++k) key += idx[k] * strides_[k];
    return key;
  }

  const ObjectiveFn& f_;
  long budget_;
  long total_ = 0;
  std::vector<long> strides_;
  bool use_flat_ = false;
  std::vector<double> flat_;
  std::unordered_map<long, double> map_;
  long evals_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
  std::vector<int> best_idx_;
  bool improved_ = false;
  bool exhausted_ = false;
};

using IndexSet = std::vector<std::vector<int>>;

// monotone localization map: pushes large raw values to large magnitudes
// while best-seen tracking stays on raw values
Eigen::MatrixXd transform(const Eigen::MatrixXd& raw, double best) {
  return (kHalfPi + (raw.array() - best).atan()).matrix();
}

std::vector<int> select_rows(const Eigen::MatrixXd& a, const TtOptConfig& cfg) {
  return maxvol(a, cfg.maxvol_delta, cfg.maxvol_max_iter);
}

}  // namespace

OptResult ttopt_maximize(const ObjectiveFn& f, const Grid& grid,
                         const TtOptConfig& cfg, uint64_t seed) {
  grid.validate();
  if (cfg.rank < 1) throw Error(Errc::config_error, "rank must be >= 1");
  const int d = grid.ndims();

  long sum_n = 0;
  for (int k = 0; k < d; ++k) sum_n += grid.size(k);
  const long min_budget = static_cast<long>(cfg.rank) * sum_n;
  const long budget = cfg.budget > 0 ? cfg.budget : 10 * min_budget;
  if (budget < min_budget) {
    throw Error(Errc::config_error,
                "budget below minimum of rank * sum of grid sizes");
  }

  const auto t0 = std::chrono::steady_clock::now();

  // boundary ranks capped by the unfolding sizes on both sides
  std::vector<int> rb(d + 1, 1);
  for (int k = 1; k < d; ++k) {
    long left = 1, right = 1;
    for (int j = 0; j < k; ++j) left = std::min<long>(left * grid.size(j), 1 << 20);
    for (int j = k; j < d; ++j) right = std::min<long>(right * grid.size(j), 1 << 20);
    rb[k] = static_cast<int>(std::min<long>({cfg.rank, left, right}));
  }

  // left[k]: prefixes over dims < k; right[k]: suffixes over dims >= k
  std::vector<IndexSet> left(d + 1), right(d + 1);
  left[0] = {{}};
  right[d] = {{}};

  Rng rng(seed);
  for (int k = 1; k < d; ++k) {
    IndexSet set;
    int attempts = 0;
    while (static_cast<int>(set.size()) < rb[k] && attempts < 10000) {
      ++attempts;
      std::vector<int> tuple(d - k);
      for (int j = k; j < d; ++j) tuple[j - k] = rng.uniform_int(grid.size(j));
      if (std::find(set.begin(), set.end(), tuple) == set.end()) {
        set.push_back(std::move(tuple));
      }
    }
    if (static_cast<int>(set.size()) < rb[k]) {
      throw Error(Errc::config_error, "could not seed distinct index tuples");
    }
    right[k] = std::move(set);
  }

  Evaluator ev(f, grid, budget);
  int sweeps = 0;
  int no_improve = 0;
  bool out_of_budget = false;
  std::vector<int> idx(d);

  while (!out_of_budget) {
    ev.reset_improved();
    const bool forward = (sweeps % 2 == 0);

    for (int step = 0; step < d && !out_of_budget; ++step) {
      const int k = forward ? step : d - 1 - step;
      const int nk = grid.size(k);
      const auto& lset = left[k];
      const auto& rset = right[k + 1];
      const int nl = static_cast<int>(lset.size());
      const int nr = static_cast<int>(rset.size());

      // forward: rows (l, i) x cols r; backward: rows (i, r) x cols l
      const int rows = forward ? nl * nk : nk * nr;
      const int colc = forward ? nr : nl;
      Eigen::MatrixXd raw(rows, colc);

      for (int row = 0; row < rows && !out_of_budget; ++row) {
        const int li = forward ? row / nk : -1;
        const int i = forward ? row % nk : row / nr;
        const int ri = forward ? -1 : row % nr;
        for (int col = 0; col < colc; ++col) {
          const auto& lt = forward ? lset[li] : lset[col];
          const auto& rt = forward ? rset[col] : rset[ri];
          for (int j = 0; j < k; ++j) idx[j] = lt[j];
          idx[k] = i;
          for (int j = k + 1; j < d; ++j) idx[j] = rt[j - k - 1];
          double v;
          if (!ev.eval(idx, v)) {
            out_of_budget = true;
            break;
          }
          raw(row, col) = v;
        }
      }
      if (out_of_budget) break;

      if (forward && k < d - 1) {
        const std::vector<int> sel = select_rows(transform(raw, ev.best()), cfg);
        IndexSet next;
        for (int row : sel) {
          std::vector<int> tuple = lset[row / nk];
          tuple.push_back(row % nk);
          next.push_back(std::move(tuple));
        }
        left[k + 1] = std::move(next);
      } else if (!forward && k > 0) {
        const std::vector<int> sel = select_rows(transform(raw, ev.best()), cfg);
        IndexSet next;
        for (int row : sel) {
          std::vector<int> tuple;
          tuple.push_back(row / nr);
          const auto& rt = rset[row % nr];
          tuple.insert(tuple.end(), rt.begin(), rt.end());
          next.push_back(std::move(tuple));
        }
        right[k] = std::move(next);
      }
    }

    ++sweeps;
    if (ev.improved()) {
      no_improve = 0;
    } else {
      ++no_improve;
    }
    if (no_improve >= cfg.no_improve_sweeps) break;
  }

  OptResult r;
  r.index = ev.best_index();
  r.values = grid.physical(r.index);
  r.objective = ev.best();
  r.evaluations = ev.evals();
  r.tie_count = ev.count_ties();
  r.sweeps = sweeps;
  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

OptResult brute_force_maximize(const ObjectiveFn& f, const Grid& grid,
                               std::vector<std::vector<int>>* all_optima) {
  grid.validate();
  const long total = grid.total();
  if (total > 10'000'000L) {
    throw Error(Errc::size_error, "grid too large for brute force");
  }
  const auto t0 = std::chrono::steady_clock::now();

  const int d = grid.ndims();
  std::vector<int> idx(d, 0);
  OptResult r;
  r.objective = -std::numeric_limits<double>::infinity();
  if (all_optima) all_optima->clear();

  for (long it = 0; it < total; ++it) {
    const double v = f(idx);
    if (v > r.objective) {
      r.objective = v;
      r.index = idx;
      r.tie_count = 1;
      if (all_optima) {
        all_optima->clear();
        all_optima->push_back(idx);
      }
    } else if (v == r.objective) {
      ++r.tie_count;
      if (all_optima) all_optima->push_back(idx);
    }
    // lexicographic odometer
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < grid.size(k)) break;
      idx[k] = 0;
    }
  }

  r.values = grid.physical(r.index);
  r.evaluations = total;
  r.sweeps = 1;
  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

}  // namespace qoeopt
