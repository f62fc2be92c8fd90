#include "retint/errors.hpp"

namespace retint {

const char* errc_name(errc code) {
  switch (code) {
    case errc::malformed_record: return "MalformedRecord";
    case errc::duplicate_slot: return "DuplicateSlot";
    case errc::off_grid_record: return "OffGridRecord";
    case errc::empty_series: return "EmptySeries";
    case errc::grid_mismatch: return "GridMismatch";
    case errc::degenerate_variance: return "DegenerateVariance";
    case errc::too_few_exceedances: return "TooFewExceedances";
    case errc::no_overlap: return "NoOverlap";
    case errc::invalid_sample: return "InvalidSample";
    case errc::insufficient_support: return "InsufficientSupport";
    case errc::fit_diverged: return "FitDiverged";
    case errc::incomplete_input: return "IncompleteInput";
    case errc::insufficient_data: return "InsufficientData";
    case errc::invalid_window: return "InvalidWindow";
    case errc::insufficient_scales: return "InsufficientScales";
    case errc::invalid_length: return "InvalidLength";
    case errc::embedding_failure: return "EmbeddingFailure";
    case errc::infinite_variance: return "InfiniteVariance";
    case errc::io_failure: return "IoFailure";
    case errc::invalid_config: return "InvalidConfig";
  }
  return "UnknownError";
}

}  // namespace retint
