// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qoeopt {

// Machine-readable error categories; the numeric value doubles as the CLI
// exit status.
enum class Errc {
  schema_error = 2,
  empty_input = 3,
  degenerate_filter = 4,
  encoding_error = 5,
  too_small = 6,
  degenerate_feature = 7,
  invalid_value = 8,
  undefined_baseline = 9,
  size_error = 10,
  config_error = 11,
  training_diverged = 12,
  missing_model = 13,
  io_error = 14,
  numerical_rank = 15,
  index_error = 16,
  domain_error = 17,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::schema_error: return "schema_error";
    case Errc::empty_input: return "empty_input";
    case Errc::degenerate_filter: return "degenerate_filter";
    case Errc::encoding_error: return "encoding_error";
    case Errc::too_small: return "too_small";
    case Errc::degenerate_feature: return "degenerate_feature";
    case Errc::invalid_value: return "invalid_value";
    case Errc::undefined_baseline: return "undefined_baseline";
    case Errc::size_error: return "size_error";
    case Errc::config_error: return "config_error";
    case Errc::training_diverged: return "training_diverged";
    case Errc::missing_model: return "missing_model";
    case Errc::io_error: return "io_error";
    case Errc::numerical_rank: return "numerical_rank";
    case Errc::index_error: return "index_error";
    case Errc::domain_error: return "domain_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  int exit_status() const noexcept { return static_cast<int>(code_); }

 private:
  Errc code_;
};

}  // namespace qoeopt
