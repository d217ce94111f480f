#pragma once

#include <stdexcept>
#include <string>

namespace ppgbp {

enum class Errc {
  // data errors
  parse_error,
  length_mismatch,
  missing_column,
  empty_input,
  degenerate_input,
  invalid_spec,
  non_finite_sample,
  constant_signal,
  too_short_signal,
  too_few_peaks,
  segment_too_long,
  too_few_beats,
  invalid_sizes,
  non_finite_input,
  empty_batch,
  version_mismatch,
  corrupt_file,
  constant_sequence,
  labels_unavailable,
  dimension_mismatch,
  io_error,
  // numeric failures
  numerical_failure,
  divergence,
  non_positive_power,
};

/// Coarse classification used for process exit codes.
enum class ErrorClass { data, numeric };

constexpr ErrorClass classify(Errc code) {
  switch (code) {
    case Errc::numerical_failure:
    case Errc::divergence:
    case Errc::non_positive_power:
      return ErrorClass::numeric;
    default:
      return ErrorClass::data;
  }
}

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ppgbp
