#ifndef CITEAUDIT_SYNTH_CORPUS_HPP
#define CITEAUDIT_SYNTH_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "citeaudit/anomaly_rules.hpp"
#include "citeaudit/bib_formats.hpp"
#include "citeaudit/cohort_stats.hpp"
#include "json.hpp"

namespace citeaudit {

// ---------------------------------------------------------------------------
// PRNG
// ---------------------------------------------------------------------------

/// SplitMix64 (Steele, Lea & Flood). State advances by 0x9E3779B97F4A7C15;
/// output mixes with the two published multipliers. Integer-only, so every
/// platform sees the same stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n), rejection-sampled (no modulo bias). n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// True with probability p; compares a 53-bit draw with p * 2^53.
  bool bernoulli(double p);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Spec
// ---------------------------------------------------------------------------

enum class CorruptionKind { reroute_to_article1, reroute_to_pdf_length };

std::string_view to_string(CorruptionKind k);

struct CorruptionRule {
  CorruptionKind kind = CorruptionKind::reroute_to_article1;
  double probability = 0;
  std::optional<std::pair<int, int>> active_years;  // inclusive, cited article's year
  double cross_volume_probability = 0;              // RerouteToPdfLength only

  bool active_for(int year) const {
    return !active_years || (year >= active_years->first && year <= active_years->second);
  }
};

struct IntRange {
  std::int64_t min = 0;
  std::int64_t max = 0;
};

struct JournalSpec {
  std::string name;
  std::string issn;
  std::string slug;            // used in DOIs; derived from the name if empty
  int volumes = 1;
  int first_volume = 1;
  std::vector<int> volume_years;  // volume i -> year; defaults to first_year + i
  int first_year = 2020;
  int days_per_volume = 365;      // consecutive publishing days from Jan 2
  IntRange articles_per_day{8, 12};
  IntRange pdf_length{3, 30};
  double attachment_exponent = 0.5;    // weight of the preferential draw, in [0,1]
  double external_citation_rate = 10;  // expected citations per article

  int year_of_volume(int index) const;
};

struct SynthSpec {
  std::vector<JournalSpec> journals;
  std::vector<CorruptionRule> corruption;
  std::uint64_t seed = 42;
  int citation_window_days = 730;

  /// Throws error(spec_error).
  void validate() const;
};

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthSpec& spec);

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct Edge {
  std::uint32_t citing = 0;  // index into citing_works
  std::uint32_t cited = 0;   // index into articles
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct CitingWork {
  std::string doi;
  std::chrono::sys_days date;
};

enum class CorruptionOutcome { rerouted, unreroutable };

struct CorruptionLogEntry {
  std::size_t edge_index = 0;
  CorruptionKind rule = CorruptionKind::reroute_to_article1;
  std::uint32_t original_target = 0;
  std::uint32_t new_target = 0;  // == original_target when unreroutable
  CorruptionOutcome outcome = CorruptionOutcome::rerouted;
};

struct VolumeInfo {
  std::size_t journal = 0;
  std::string label;
  int year = 0;
  std::size_t first_article = 0;  // articles are contiguous per volume
  std::size_t article_count = 0;
};

struct GroundTruthGraph {
  std::vector<ArticleRecord> articles;
  std::vector<std::size_t> article_volume;  // index into volumes
  std::vector<VolumeInfo> volumes;
  std::vector<CitingWork> citing_works;
  std::vector<Edge> true_edges;
  std::vector<Edge> corrupted_edges;
  std::vector<CorruptionLogEntry> corruption_log;

  const VolumeInfo& volume_of(std::size_t article) const { return volumes[article_volume[article]]; }
  /// Index of the anchor (article number 1) of a volume.
  std::size_t anchor_of(std::size_t volume) const { return volumes[volume].first_article; }
};

/// Deterministic for a fixed spec. corrupted_edges == true_edges until
/// apply_corruption runs. Throws error(spec_error).
GroundTruthGraph generate_corpus(const SynthSpec& spec);

/// Fills corrupted_edges and corruption_log. Each edge draws each rule in
/// order; the first one that fires is applied.
void apply_corruption(GroundTruthGraph& graph, std::span<const CorruptionRule> rules, std::uint64_t seed);

/// Convenience: generate then corrupt with spec.corruption and spec.seed.
GroundTruthGraph build_corpus(const SynthSpec& spec);

std::vector<Edge> replay_log(std::span<const Edge> true_edges, std::span<const CorruptionLogEntry> log);

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

std::vector<std::int64_t> in_degrees(std::size_t n, std::span<const Edge> edges);

struct JournalYearMetric {
  std::size_t journal = 0;
  int year = 0;
  double true_value = 0;
  double observed_value = 0;
};

struct Distortion {
  std::vector<std::int64_t> true_counts;
  std::vector<std::int64_t> observed_counts;
  std::vector<JournalYearMetric> two_year_metric;
};

/// Counts are in-degrees; the two-year metric for year Y is citations made
/// in Y to articles of Y-1 and Y-2 divided by the number of those articles.
Distortion measure_distortion(const GroundTruthGraph& graph);

/// Same-day cohorts for every volume built from observed (or true) counts.
std::vector<Cohort> synthetic_cohorts(const GroundTruthGraph& graph, const SynthSpec& spec, bool observed = true,
                                      std::size_t min_size = kMinCohortSize);

/// Rank scan of one journal's articles with its volume anchors.
RankScan synthetic_rank_scan(const GroundTruthGraph& graph, std::size_t journal, bool observed = true);

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// How a synthetic record is written out.
///  faithful:  every format carries the article number; pages 1..L.
///  publisher: what the affected publisher emits (RIS SP = article number
///             with no EP; JSON start 1 / end L and no article number).
enum class RenderStyle { faithful, publisher };

std::string render_ris(const ArticleRecord& r, RenderStyle style);
std::string render_publisher_json(const ArticleRecord& r, RenderStyle style);
std::string render_jats(const ArticleRecord& r);
std::string render_crossref_work(const ArticleRecord& r, std::optional<std::int64_t> cited_by = std::nullopt);

/// Parsed bundle of all four renderings.
FormatBundle render_bundle(const ArticleRecord& r, RenderStyle style);

/// The I.1 transformation on RIS text: SP becomes the article number, IS 1,
/// EP removed.
std::string inject_i1(const std::string& ris, const ArticleRecord& truth);
/// The I.2 transformation on publisher JSON: drop the article-number field.
std::string inject_i2(const std::string& json_text);

/// Reference string the citing work prints for an edge. O.2-rerouted edges
/// print "J V(1):L"; all others print "J V, X (Y)".
std::string render_reference_for(const GroundTruthGraph& graph, std::size_t edge_index);

// ---------------------------------------------------------------------------
// Detector evaluation
// ---------------------------------------------------------------------------

struct PrecisionRecall {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision() const;
  double recall() const;
};

struct ThresholdPoint {
  double threshold = 0;
  PrecisionRecall pr;
};

struct DetectorEvaluation {
  PrecisionRecall o2_edges;
  PrecisionRecall o1_anchors;  // at threshold 3
  std::vector<ThresholdPoint> o1_sweep;
};

inline constexpr double kAnchorZThreshold = 3.0;

/// O.2: every edge rendered to a reference string, parsed and checked with
/// detect_o2 against its cited article; truth = rerouted O.2 log entries.
/// O.1: a volume is flagged when its anchor z exceeds the threshold; truth
/// = the volume received at least one O.1 reroute.
DetectorEvaluation evaluate_detectors(const GroundTruthGraph& graph, std::span<const Cohort> cohorts,
                                      std::span<const double> thresholds = {});

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Writes articles.csv, citing_works.csv, true_edges.csv,
/// corrupted_edges.csv, corruption_log.csv and spec.json.
void write_corpus(const std::filesystem::path& dir, const GroundTruthGraph& graph, const SynthSpec& spec);

/// 64-bit FNV-1a over the corpus files in a fixed order.
std::uint64_t corpus_digest(const std::filesystem::path& dir);

}  // namespace citeaudit

#endif  // CITEAUDIT_SYNTH_CORPUS_HPP
