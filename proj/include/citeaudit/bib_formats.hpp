#ifndef CITEAUDIT_BIB_FORMATS_HPP
#define CITEAUDIT_BIB_FORMATS_HPP

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace citeaudit {

// ---------------------------------------------------------------------------
// Dates
// ---------------------------------------------------------------------------

/// Calendar date whose month and day may be unknown. Ordering uses
/// July 1st / the 15th for missing parts; the raw precision is kept so
/// callers can refuse imprecise dates where a day is required.
struct PartialDate {
  int year = 0;
  std::optional<unsigned> month;
  std::optional<unsigned> day;

  bool has_day_precision() const { return month && day; }
  std::chrono::sys_days ordering_key() const;
  std::string iso() const;

  /// Accepts "YYYY", "YYYY-MM", "YYYY-MM-DD" with '-' or '/' separators;
  /// trailing separators and RIS-style "YYYY/MM/DD/other" are tolerated.
  static std::optional<PartialDate> parse(std::string_view text);
  static PartialDate from_sys_days(std::chrono::sys_days d);

  friend bool operator==(const PartialDate&, const PartialDate&) = default;
};

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

enum class SourceFormat { ris, publisher_json, jats, crossref_work, synthetic };

std::string_view to_string(SourceFormat f);
std::optional<SourceFormat> source_format_from_string(std::string_view s);

/// Article metadata normalized across every format we read.
struct ArticleRecord {
  std::string doi;
  std::string journal_title;
  std::optional<std::string> issn;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> article_number;
  std::optional<std::string> start_page;
  std::optional<std::string> end_page;
  std::optional<int> page_count;
  std::optional<PartialDate> publication_date;
  std::string title;
  std::vector<std::string> authors;
  SourceFormat source_format = SourceFormat::synthetic;

  /// RIS has no article-number field; when the start page was promoted it
  /// is only a candidate. Recoverable from the format and the missing EP.
  bool article_number_is_candidate() const {
    return source_format == SourceFormat::ris && article_number.has_value() &&
           !end_page.has_value();
  }

  friend bool operator==(const ArticleRecord&, const ArticleRecord&) = default;
};

/// Throws error(invalid_record) when an invariant is broken.
void validate(const ArticleRecord& record);

/// Lowercase, strip resolver prefixes ("https://doi.org/", "doi:").
std::string normalize_doi(std::string_view raw);
bool is_plausible_doi(std::string_view doi);

bool is_numeric(std::string_view s);

nlohmann::json to_json(const ArticleRecord& record);
ArticleRecord article_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

ArticleRecord parse_ris(std::string_view text);

struct PublisherJsonResult {
  ArticleRecord record;
  std::string raw;

  /// Raw substring search over the untouched payload.
  bool raw_contains(std::string_view needle) const {
    return raw.find(needle) != std::string::npos;
  }
};

/// Accepts a single record object or the API envelope ({"records": [...]}).
PublisherJsonResult parse_publisher_json(std::string_view text);

struct JatsOptions {
  /// custom-meta names whose value carries the article number. Empty by
  /// default; publishers do not document which names they use.
  std::vector<std::string> article_number_meta_names;
};

ArticleRecord parse_jats(std::string_view text, const JatsOptions& options = {});

struct CrossrefWork {
  ArticleRecord record;
  std::optional<std::int64_t> is_referenced_by_count;
};

/// Accepts the bare work object or the {"status","message"} envelope.
CrossrefWork parse_crossref_work(std::string_view text);
CrossrefWork parse_crossref_work(const nlohmann::json& message);

// ---------------------------------------------------------------------------
// Reference strings
// ---------------------------------------------------------------------------

enum class LocatorKind { article_number, start_page, page_range, issue_colon_locator, unknown };

std::string_view to_string(LocatorKind k);

struct ParsedReference {
  std::string journal_hint;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> locator;
  LocatorKind locator_kind = LocatorKind::unknown;
  std::optional<int> year;
  std::string raw;
  /// Best-effort title text preceding the journal name, if any.
  std::string title_hint;

  friend bool operator==(const ParsedReference&, const ParsedReference&) = default;
};

/// Recognizes, in order: "J V(I):L", "J V:L", "J V, X (Y)", "J V, A-B (Y)".
/// Anything else is returned as LocatorKind::unknown with whatever fields
/// could be recovered. Throws error(empty_reference) on blank input.
ParsedReference parse_reference_string(std::string_view text);

/// Inverse of parse_reference_string for the four recognized grammars.
std::string render_reference(const ParsedReference& ref);

// ---------------------------------------------------------------------------
// Bundles
// ---------------------------------------------------------------------------

struct FormatEntry {
  ArticleRecord record;
  std::string raw;
};

struct FormatBundle {
  std::string doi;
  std::map<SourceFormat, FormatEntry> per_format;

  /// Throws error(mismatched_input) on a DOI clash.
  void add(ArticleRecord record, std::string raw);
};

/// Guess the format from content. Used by the CLI for check-record.
std::optional<SourceFormat> sniff_format(std::string_view text);

}  // namespace citeaudit

#endif  // CITEAUDIT_BIB_FORMATS_HPP
