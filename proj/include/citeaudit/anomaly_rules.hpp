#ifndef CITEAUDIT_ANOMALY_RULES_HPP
#define CITEAUDIT_ANOMALY_RULES_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citeaudit/bib_formats.hpp"
#include "json.hpp"

namespace citeaudit {

enum class Rule { I1, I2, O2, O3 };
enum class Severity { info, suspect, confirmed };

std::string_view to_string(Rule r);
std::string_view to_string(Severity s);

struct Evidence {
  std::string label;
  std::string text;
  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct AnomalyFinding {
  Rule rule = Rule::I1;
  std::string doi;
  Severity severity = Severity::info;
  std::vector<Evidence> evidence;
  std::optional<std::string> related_doi;

  friend bool operator==(const AnomalyFinding&, const AnomalyFinding&) = default;
};

/// One JSON object per finding: rule, doi, severity, related_doi, evidence.
nlohmann::json to_json(const AnomalyFinding& f);
std::string to_jsonl(std::span<const AnomalyFinding> findings);

/// Stable order: rule, then doi, then related_doi.
void sort_findings(std::vector<AnomalyFinding>& findings);

// ---------------------------------------------------------------------------

/// RIS puts the article number in SP with no EP while the publisher API
/// reports start page 1 and an end page equal to the PDF length.
/// Throws error(mismatched_input) when the DOIs differ.
std::vector<AnomalyFinding> detect_i1(const ArticleRecord& ris, const ArticleRecord& api);

enum class PayloadFormat { json, jsonp, pam, jats, ris, crossref };

std::string_view to_string(PayloadFormat f);

struct RawPayload {
  PayloadFormat format;
  std::string text;
};

/// Where a standalone occurrence of the article number was found.
struct TokenScan {
  int article_field_hits = 0;  // inside a field that names the article number
  int other_field_hits = 0;    // value of another field (start page, date, ...)
  int unattributed_hits = 0;   // raw occurrences we could not attribute
};

TokenScan scan_payload_for_token(const RawPayload& payload, std::string_view token);

/// Article number missing from JSON/JSONP/PAM API payloads. JATS, RIS and
/// Crossref payloads are exempt. A token found only inside other fields
/// is reported as Suspect rather than Confirmed.
std::vector<AnomalyFinding> detect_i2(std::string_view doi, std::span<const RawPayload> payloads,
                                      std::string_view true_article_number);

/// A "J V(1):L" reference pointing at an article whose PDF has L pages.
std::vector<AnomalyFinding> detect_o2(const ParsedReference& ref, std::span<const ArticleRecord> cited_candidates);

/// Jaccard similarity of lowercased alphanumeric token sets.
double title_similarity(std::string_view a, std::string_view b);

/// Case/punctuation-insensitive; also accepts abbreviations where every
/// token is a prefix of the corresponding full-name token ("Nat Commun").
bool journal_names_match(std::string_view a, std::string_view b);

inline constexpr double kTitleSimilarityThreshold = 0.5;

std::vector<AnomalyFinding> detect_o3(std::string_view ref_title, std::string_view ref_journal,
                                      std::span<const ArticleRecord> link_targets,
                                      std::string_view citing_doi = {});

// ---------------------------------------------------------------------------

struct FieldComparison {
  std::string field;
  /// (format, value); absent values are recorded as std::nullopt.
  std::vector<std::pair<SourceFormat, std::optional<std::string>>> values;
};

struct ConsistencyReport {
  std::string doi;
  std::vector<FieldComparison> fields_compared;
  std::vector<std::string> conflicts;
  std::vector<AnomalyFinding> findings;
};

nlohmann::json to_json(const ConsistencyReport& report);

/// Compares volume, issue, start_page, end_page and article_number across
/// formats and runs detect_i1/detect_i2 where the inputs exist. Publisher
/// JSON is excluded from the article_number comparison since the format
/// cannot carry one. Throws error(insufficient_formats) for < 2 formats.
ConsistencyReport cross_format_consistency(const FormatBundle& bundle);

}  // namespace citeaudit

#endif  // CITEAUDIT_ANOMALY_RULES_HPP
