#ifndef CITEAUDIT_COHORT_STATS_HPP
#define CITEAUDIT_COHORT_STATS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citeaudit/bib_formats.hpp"
#include "citeaudit/citation_sources.hpp"
#include "json.hpp"

namespace citeaudit {

// ---------------------------------------------------------------------------
// Anchors and cohorts
// ---------------------------------------------------------------------------

/// The unique article numbered 1 in `volume_label`. An empty label means
/// the journal uses one numbering across volumes, so every article counts.
/// Throws error(no_anchor) / error(multiple_anchors).
ArticleRecord find_anchor(std::span<const ArticleRecord> articles, std::string_view volume_label);

struct CohortSelection {
  ArticleRecord anchor;
  std::vector<ArticleRecord> comparisons;  // ordered by (date, doi)
  int days_extended = 0;
  bool exhausted = false;                  // ran out of days below min_size
  std::size_t skipped_imprecise = 0;       // articles without a day-precise date
};

inline constexpr std::size_t kMinCohortSize = 15;

/// Same-day comparison articles, extended one publishing day at a time
/// until min_size is reached. Input order does not matter; the anchor is
/// removed by DOI if present. Throws error(anchor_date_imprecise) and
/// error(empty_volume).
CohortSelection build_cohort(const ArticleRecord& anchor, std::span<const ArticleRecord> volume_articles,
                             std::size_t min_size = kMinCohortSize);

struct CountedArticle {
  ArticleRecord record;
  CitationCount count;
};

struct Cohort {
  std::string journal;
  std::string volume_label;
  int year = 0;
  CitationSource source = CitationSource::synthetic;
  CountedArticle anchor;
  std::vector<CountedArticle> comparisons;
  int days_extended = 0;
  bool exhausted = false;
  std::vector<std::string> missing_counts;  // comparison DOIs with no count

  std::string label() const;
};

using CountLookup = std::function<std::optional<CitationCount>(const std::string& doi)>;

/// Attaches counts from one source. Comparisons without a count are dropped
/// and listed in missing_counts; a missing anchor count throws
/// error(not_found).
Cohort attach_counts(const CohortSelection& selection, std::string journal, std::string volume_label, int year,
                     CitationSource source, const CountLookup& lookup);

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

struct Normalized {
  std::vector<double> z;
  bool degenerate = false;  // zero variance: z is all zeros
};

/// z_i = (c_i - mean) / sigma with population sigma. Computed from the
/// integer deviations n*c_i - sum(c), so integer shifts of the input give
/// bit-identical output. Throws error(too_few) for fewer than two values.
Normalized normalize_counts(std::span<const std::int64_t> counts);

struct NormalizedHistogram {
  std::string label;
  std::optional<int> year;
  std::vector<double> z_values;  // comparisons
  std::vector<double> anchor_z;  // one per cohort pooled in
  std::vector<std::string> anchor_labels;
  double bin_width = 0.25;
  std::size_t cohorts = 0;
  std::size_t degenerate_cohorts = 0;
};

struct NormalizeOptions {
  /// The anchor takes part in mean/sigma by default; when false the anchor
  /// is scored against the comparisons' mean and sigma.
  bool include_anchor = true;
  double bin_width = 0.25;
};

NormalizedHistogram normalize_cohort(const Cohort& cohort, const NormalizeOptions& options = {});

/// Concatenates already-normalized cohorts; no renormalization.
/// Throws error(empty_pool).
NormalizedHistogram pool_histograms(std::span<const NormalizedHistogram> parts, std::string label,
                                    double bin_width = 0.25);

/// Bin index -> number of comparison values; bin i covers [i*w, (i+1)*w).
std::map<std::int64_t, std::size_t> histogram_bins(const NormalizedHistogram& h);

// ---------------------------------------------------------------------------
// Ranks
// ---------------------------------------------------------------------------

struct RankedArticle {
  std::string doi;
  std::int64_t count = 0;
};

inline const std::vector<std::size_t> kDefaultTopK = {10, 100, 300, 10000};

struct RankScan {
  std::size_t total_articles = 0;
  std::vector<std::string> anchor_dois;
  std::vector<std::size_t> anchor_ranks;  // 1 = most cited, same order as anchor_dois
  std::map<std::size_t, std::size_t> top_k_counts;
  std::vector<RankedArticle> ranking;  // count desc, DOI asc
};

/// Throws error(missing_anchor) when an anchor DOI is not in the listing
/// and error(invalid_record) on duplicate DOIs.
RankScan rank_scan(std::vector<RankedArticle> articles, std::span<const std::string> anchor_dois,
                   std::span<const std::size_t> ks = kDefaultTopK);

/// Anchor ranks mapped to (rank - 0.5) / total, uniform on (0,1) under the null.
std::vector<double> rank_quantiles(const RankScan& scan);

// ---------------------------------------------------------------------------
// Temporal split
// ---------------------------------------------------------------------------

inline constexpr int kDefaultCutoffYear = 2011;

struct TemporalSplit {
  NormalizedHistogram pre;   // years < cutoff
  NormalizedHistogram post;  // years >= cutoff
  std::size_t pre_cohorts = 0;
  std::size_t post_cohorts = 0;
  bool pre_empty = false;
  bool post_empty = false;
};

/// Every input must carry a year (error invalid_record otherwise).
TemporalSplit temporal_split(std::span<const NormalizedHistogram> cohorts, int cutoff_year = kDefaultCutoffYear);

double mean(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Uniformity test
// ---------------------------------------------------------------------------

struct KsResult {
  double statistic = 0;
  double p_value = 1;
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test against U(0,1), asymptotic p-value.
KsResult ks_uniform(std::span<const double> samples);

/// Kolmogorov survival function P(K > x).
double kolmogorov_sf(double x);

// ---------------------------------------------------------------------------
// Exclusions and output
// ---------------------------------------------------------------------------

struct Exclusion {
  std::string journal;
  int year = 0;
  std::string reason;
};

std::vector<Exclusion> exclusions_from_json(const nlohmann::json& j);
std::optional<std::string> excluded_reason(std::span<const Exclusion> list, std::string_view journal, int year);

/// CSV with columns label,z,is_anchor. Values use %.17g so they round-trip.
void write_histogram_csv(std::ostream& out, const NormalizedHistogram& h);
NormalizedHistogram read_histogram_csv(std::istream& in);

/// CSV with columns rank,doi,count,is_anchor.
void write_rank_csv(std::ostream& out, const RankScan& scan);
RankScan read_rank_csv(std::istream& in);

nlohmann::json to_json(const NormalizedHistogram& h);
nlohmann::json to_json(const RankScan& scan);

std::string format_double(double v);

}  // namespace citeaudit

#endif  // CITEAUDIT_COHORT_STATS_HPP
