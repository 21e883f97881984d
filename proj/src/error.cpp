#include "citeaudit/error.hpp"

namespace citeaudit {

std::string_view to_string(errc code) {
  switch (code) {
    case errc::missing_doi: return "MissingDOI";
    case errc::malformed_ris: return "MalformedRIS";
    case errc::malformed_payload: return "MalformedPayload";
    case errc::empty_reference: return "EmptyReference";
    case errc::mismatched_input: return "MismatchedInput";
    case errc::insufficient_formats: return "InsufficientFormats";
    case errc::not_found: return "NotFound";
    case errc::rate_limited: return "RateLimited";
    case errc::source_unavailable: return "SourceUnavailable";
    case errc::unknown_journal: return "UnknownJournal";
    case errc::incomplete_listing: return "IncompleteListing";
    case errc::storage_corrupt: return "StorageCorrupt";
    case errc::cache_miss: return "CacheMiss";
    case errc::no_anchor: return "NoAnchor";
    case errc::multiple_anchors: return "MultipleAnchors";
    case errc::anchor_date_imprecise: return "AnchorDateImprecise";
    case errc::empty_volume: return "EmptyVolume";
    case errc::too_few: return "TooFew";
    case errc::empty_pool: return "EmptyPool";
    case errc::missing_anchor: return "MissingAnchor";
    case errc::spec_error: return "SpecError";
    case errc::config_error: return "ConfigError";
    case errc::io_error: return "IOError";
    case errc::invalid_record: return "InvalidRecord";
  }
  return "Unknown";
}

}  // namespace citeaudit
