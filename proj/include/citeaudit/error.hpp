#ifndef CITEAUDIT_ERROR_HPP
#define CITEAUDIT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace citeaudit {

enum class errc {
  missing_doi,
  malformed_ris,
  malformed_payload,
  empty_reference,
  mismatched_input,
  insufficient_formats,
  not_found,
  rate_limited,
  source_unavailable,
  unknown_journal,
  incomplete_listing,
  storage_corrupt,
  cache_miss,
  no_anchor,
  multiple_anchors,
  anchor_date_imprecise,
  empty_volume,
  too_few,
  empty_pool,
  missing_anchor,
  spec_error,
  config_error,
  io_error,
  invalid_record,
};

std::string_view to_string(errc code);

/// Every failure the library reports is one of these; code() is stable,
/// what() carries the human-readable detail.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace citeaudit

#endif  // CITEAUDIT_ERROR_HPP
