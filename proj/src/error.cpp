#include "ppgbp/error.hpp"

namespace ppgbp {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::parse_error: return "parse error";
    case Errc::length_mismatch: return "length mismatch";
    case Errc::missing_column: return "missing column";
    case Errc::empty_input: return "empty input";
    case Errc::degenerate_input: return "degenerate input";
    case Errc::invalid_spec: return "invalid spec";
    case Errc::non_finite_sample: return "non-finite sample";
    case Errc::constant_signal: return "constant signal";
    case Errc::too_short_signal: return "signal too short";
    case Errc::too_few_peaks: return "fewer than 2 peaks";
    case Errc::segment_too_long: return "segment too long";
    case Errc::too_few_beats: return "too few beats";
    case Errc::invalid_sizes: return "invalid layer sizes";
    case Errc::non_finite_input: return "non-finite input";
    case Errc::empty_batch: return "empty batch";
    case Errc::version_mismatch: return "version mismatch";
    case Errc::corrupt_file: return "corrupt file";
    case Errc::constant_sequence: return "constant sequence";
    case Errc::labels_unavailable: return "labels unavailable";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::io_error: return "i/o error";
    case Errc::numerical_failure: return "numerical failure";
    case Errc::divergence: return "divergence";
    case Errc::non_positive_power: return "non-positive power";
  }
  return "unknown error";
}

}  // namespace ppgbp
