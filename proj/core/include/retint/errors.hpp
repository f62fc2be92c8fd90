#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace retint {

enum class errc {
  malformed_record,
  duplicate_slot,
  off_grid_record,
  empty_series,
  grid_mismatch,
  degenerate_variance,
  too_few_exceedances,
  no_overlap,
  invalid_sample,
  insufficient_support,
  fit_diverged,
  incomplete_input,
  insufficient_data,
  invalid_window,
  insufficient_scales,
  invalid_length,
  embedding_failure,
  infinite_variance,
  io_failure,
  invalid_config,
};

const char* errc_name(errc code);

// Domain error carrying a machine-checkable code and, where the contract
// calls for it, a numeric payload (e.g. the exceedance count).
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message, std::int64_t detail = 0)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        detail_(detail) {}

  errc code() const noexcept { return code_; }
  std::int64_t detail() const noexcept { return detail_; }

 private:
  errc code_;
  std::int64_t detail_;
};

}  // namespace retint
