#ifndef CITEAUDIT_CLI_REPORT_HPP
#define CITEAUDIT_CLI_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "citeaudit/anomaly_rules.hpp"
#include "citeaudit/citation_sources.hpp"
#include "citeaudit/cohort_stats.hpp"
#include "json.hpp"

namespace citeaudit {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;          // at least one unit completed
inline constexpr int kExitNothing = 1;     // nothing completed
inline constexpr int kExitConfig = 2;      // bad configuration or arguments

inline constexpr const char* kContactEmailEnv = "CITEAUDIT_CONTACT_EMAIL";

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct JournalEntry {
  std::string name;
  std::string issn;
  /// Volume label -> year. The label "*" stands for journals whose article
  /// numbers run on across volumes; it audits the whole year unfiltered.
  std::map<std::string, int> volume_years;
};

struct AuditConfig {
  std::vector<JournalEntry> journals;
  std::vector<CitationSource> sources{CitationSource::crossref};
  std::size_t min_cohort = kMinCohortSize;
  std::vector<Exclusion> exclusions;
  int cutoff_year = kDefaultCutoffYear;
  std::filesystem::path output_dir = "citeaudit-out";
  std::filesystem::path cache_dir = ".citeaudit-cache";
  bool offline = false;
  bool include_anchor = true;  // anchor takes part in the cohort mean/sigma
  int workers = 4;
  FetchPolicy policy;
  Endpoints endpoints;

  /// Relative paths in the file resolve against `base_dir`. ISSNs missing
  /// from journal entries are looked up in `registry` by name. Throws
  /// error(config_error).
  static AuditConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                               const std::vector<JournalEntry>& registry = {});
  void validate() const;
};

/// Journal registry file: [{"name", "issn", "abbreviation"?, ...}].
std::vector<JournalEntry> load_registry(const std::filesystem::path& path);

/// Resolves an abbreviated or full journal name against the registry.
const JournalEntry* registry_lookup(const std::vector<JournalEntry>& registry, std::string_view name);

nlohmann::json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// ---------------------------------------------------------------------------
// Commands. Each returns an exit code and never throws for per-unit
// failures; `log` receives progress and per-unit errors.
// ---------------------------------------------------------------------------

struct AuditUnitResult {
  std::string journal;
  std::string volume_label;
  int year = 0;
  std::string status;  // "completed", "failed", "excluded"
  std::string reason;
  std::optional<std::string> anchor_doi;
  std::optional<std::string> anchor_date;
  std::size_t cohort_size = 0;
  int days_extended = 0;
  bool exhausted = false;
  std::size_t listing_size = 0;
  std::map<std::string, double> anchor_z;  // by source
  std::map<std::string, std::size_t> cohort_counts;  // by source, after missing counts
  std::vector<std::string> errors;          // per-item problems ("CacheMiss: ...")
  std::optional<std::size_t> anchor_rank;   // Crossref rank within the year's listing
};

struct AuditResult {
  std::vector<AuditUnitResult> units;
  int exit_code = kExitNothing;
};

AuditResult run_audit(const AuditConfig& config, std::shared_ptr<HttpTransport> transport, std::ostream& log);
int cmd_audit(const AuditConfig& config, std::shared_ptr<HttpTransport> transport, std::ostream& log);

int cmd_check_record(const std::vector<std::filesystem::path>& paths, bool json_output, std::ostream& out,
                     std::ostream& err);

struct ScanOptions {
  std::filesystem::path input;
  std::optional<std::filesystem::path> registry;
  std::optional<std::filesystem::path> candidates;  // JSON array / JSONL of records or Crossref works
  bool json_output = false;
  std::optional<std::filesystem::path> output_dir;
  std::shared_ptr<CitationClient> client;  // optional Crossref resolution
};

int cmd_scan_references(const ScanOptions& options, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::filesystem::path spec;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;
  bool evaluate = true;
};

int cmd_simulate(const SimulateOptions& options, std::ostream& log);

int cmd_render(const std::vector<std::filesystem::path>& csvs, const std::filesystem::path& output_dir,
               std::ostream& log);

struct FetchOptions {
  std::vector<std::string> dois;
  std::vector<CitationSource> sources{CitationSource::crossref};
  bool json_output = false;
};

int cmd_fetch(CitationClient& client, const FetchOptions& options, std::ostream& out, std::ostream& err);

// ---------------------------------------------------------------------------
// Report pieces
// ---------------------------------------------------------------------------

/// Histogram of comparison z-values with one dashed marker per anchor.
std::string render_histogram_svg(const NormalizedHistogram& h);
/// Articles by rank against citation count; anchors drawn as markers.
std::string render_rank_svg(const RankScan& scan, bool log_log);

std::string format_consistency_table(const ConsistencyReport& report);

}  // namespace citeaudit

#endif  // CITEAUDIT_CLI_REPORT_HPP
