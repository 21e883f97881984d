#include "citeaudit/cohort_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "citeaudit/error.hpp"
#include "citeaudit/text.hpp"

namespace citeaudit {

using nlohmann::json;
namespace chr = std::chrono;

// ---------------------------------------------------------------------------
// Anchors and cohorts
// ---------------------------------------------------------------------------

namespace {

bool is_number_one(const std::optional<std::string>& s) {
  if (!s || !is_numeric(*s)) return false;
  auto t = text::trim(*s);
  auto nz = t.find_first_not_of('0');
  return nz != std::string_view::npos && t.substr(nz) == "1";
}

bool same_volume(const ArticleRecord& r, std::string_view label) {
  if (label.empty()) return true;
  if (!r.volume) return false;
  auto a = text::trim(*r.volume), b = text::trim(label);
  if (is_numeric(a) && is_numeric(b)) {
    auto strip = [](std::string_view s) {
      auto nz = s.find_first_not_of('0');
      return nz == std::string_view::npos ? std::string_view("0") : s.substr(nz);
    };
    return strip(a) == strip(b);
  }
  return a == b;
}

}  // namespace

ArticleRecord find_anchor(std::span<const ArticleRecord> articles, std::string_view volume_label) {
  const ArticleRecord* found = nullptr;
  std::vector<std::string> dois;
  for (const auto& r : articles) {
    if (!same_volume(r, volume_label) || !is_number_one(r.article_number)) continue;
    if (!found) found = &r;
    dois.push_back(r.doi);
  }
  std::string where = volume_label.empty() ? std::string("continuous numbering") : "volume " + std::string(volume_label);
  if (!found) throw error(errc::no_anchor, "no article numbered 1 in " + where);
  if (dois.size() > 1) {
    std::sort(dois.begin(), dois.end());
    std::string list;
    for (const auto& d : dois) list += (list.empty() ? "" : ", ") + d;
    throw error(errc::multiple_anchors, where + ": " + list);
  }
  return *found;
}

CohortSelection build_cohort(const ArticleRecord& anchor, std::span<const ArticleRecord> volume_articles,
                             std::size_t min_size) {
  if (!anchor.publication_date || !anchor.publication_date->has_day_precision())
    throw error(errc::anchor_date_imprecise,
                anchor.doi + " has date " + (anchor.publication_date ? anchor.publication_date->iso() : "none"));
  const chr::sys_days anchor_day = anchor.publication_date->ordering_key();

  CohortSelection out;
  out.anchor = anchor;
  const std::string anchor_doi = normalize_doi(anchor.doi);

  std::map<chr::sys_days, std::vector<const ArticleRecord*>> by_day;
  std::set<std::string> seen;
  std::size_t others = 0;
  for (const auto& r : volume_articles) {
    std::string doi = normalize_doi(r.doi);
    if (doi == anchor_doi) continue;
    if (!seen.insert(doi).second) continue;  // duplicate listing rows
    ++others;
    if (!r.publication_date || !r.publication_date->has_day_precision()) {
      ++out.skipped_imprecise;
      continue;
    }
    auto day = r.publication_date->ordering_key();
    if (day < anchor_day) continue;
    by_day[day].push_back(&r);
  }
  if (others == 0) throw error(errc::empty_volume, "no articles besides the anchor " + anchor.doi);

  for (auto it = by_day.begin(); it != by_day.end(); ++it) {
    if (it->first != anchor_day) {
      if (out.comparisons.size() >= min_size) break;
      ++out.days_extended;
    }
    auto& day = it->second;
    std::sort(day.begin(), day.end(), [](const ArticleRecord* a, const ArticleRecord* b) { return a->doi < b->doi; });
    for (const auto* r : day) out.comparisons.push_back(*r);
  }
  out.exhausted = out.comparisons.size() < min_size;
  return out;
}

std::string Cohort::label() const {
  std::string s = journal;
  if (!volume_label.empty()) s += " vol " + volume_label;
  s += " " + std::to_string(year) + " " + std::string(to_string(source));
  return s;
}

Cohort attach_counts(const CohortSelection& selection, std::string journal, std::string volume_label, int year,
                     CitationSource source, const CountLookup& lookup) {
  Cohort c;
  c.journal = std::move(journal);
  c.volume_label = std::move(volume_label);
  c.year = year;
  c.source = source;
  c.days_extended = selection.days_extended;
  c.exhausted = selection.exhausted;
  auto anchor_count = lookup(selection.anchor.doi);
  if (!anchor_count) throw error(errc::not_found, "no count for anchor " + selection.anchor.doi);
  c.anchor = CountedArticle{selection.anchor, *anchor_count};
  for (const auto& r : selection.comparisons) {
    if (auto n = lookup(r.doi)) c.comparisons.push_back(CountedArticle{r, *n});
    else c.missing_counts.push_back(r.doi);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace {

using i128 = __int128;

// Scores `values` against the population formed by `reference`.
Normalized normalize_against(std::span<const std::int64_t> reference, std::span<const std::int64_t> values) {
  if (reference.size() < 2) throw error(errc::too_few, "need at least 2 counts, got " + std::to_string(reference.size()));
  const i128 n = static_cast<i128>(reference.size());
  i128 sum = 0;
  for (auto c : reference) sum += c;
  // Deviations scaled by n stay integral: d_i = n*c_i - sum.
  long double ss = 0;
  for (auto c : reference) {
    i128 d = n * c - sum;
    ss += static_cast<long double>(d) * static_cast<long double>(d);
  }
  Normalized out;
  out.z.assign(values.size(), 0.0);
  if (ss == 0) {
    out.degenerate = true;
    return out;
  }
  const long double denom = std::sqrt(ss / static_cast<long double>(n));  // = n * sigma
  for (std::size_t i = 0; i < values.size(); ++i) {
    i128 d = n * values[i] - sum;
    out.z[i] = static_cast<double>(static_cast<long double>(d) / denom);
  }
  return out;
}

}  // namespace

Normalized normalize_counts(std::span<const std::int64_t> counts) {
  for (auto c : counts)
    if (c < 0) throw error(errc::invalid_record, "negative citation count");
  return normalize_against(counts, counts);
}

NormalizedHistogram normalize_cohort(const Cohort& cohort, const NormalizeOptions& options) {
  std::vector<std::int64_t> all;
  all.reserve(cohort.comparisons.size() + 1);
  all.push_back(cohort.anchor.count.count);
  for (const auto& c : cohort.comparisons) all.push_back(c.count.count);

  Normalized z = options.include_anchor
                     ? normalize_counts(all)
                     : normalize_against(std::span(all).subspan(1), all);
  NormalizedHistogram h;
  h.label = cohort.label();
  h.year = cohort.year;
  h.bin_width = options.bin_width;
  h.anchor_z = {z.z[0]};
  h.anchor_labels = {h.label};
  h.z_values.assign(z.z.begin() + 1, z.z.end());
  h.cohorts = 1;
  h.degenerate_cohorts = z.degenerate ? 1 : 0;
  return h;
}

NormalizedHistogram pool_histograms(std::span<const NormalizedHistogram> parts, std::string label, double bin_width) {
  if (parts.empty()) throw error(errc::empty_pool, "nothing to pool for " + label);
  NormalizedHistogram out;
  out.label = std::move(label);
  out.bin_width = bin_width;
  std::optional<int> year = parts.front().year;
  for (const auto& p : parts) {
    out.z_values.insert(out.z_values.end(), p.z_values.begin(), p.z_values.end());
    out.anchor_z.insert(out.anchor_z.end(), p.anchor_z.begin(), p.anchor_z.end());
    out.anchor_labels.insert(out.anchor_labels.end(), p.anchor_labels.begin(), p.anchor_labels.end());
    out.cohorts += p.cohorts;
    out.degenerate_cohorts += p.degenerate_cohorts;
    if (p.year != year) year.reset();
  }
  out.year = year;
  return out;
}

std::map<std::int64_t, std::size_t> histogram_bins(const NormalizedHistogram& h) {
  std::map<std::int64_t, std::size_t> bins;
  for (double z : h.z_values) ++bins[static_cast<std::int64_t>(std::floor(z / h.bin_width))];
  return bins;
}

// ---------------------------------------------------------------------------
// Ranks
// ---------------------------------------------------------------------------

RankScan rank_scan(std::vector<RankedArticle> articles, std::span<const std::string> anchor_dois,
                   std::span<const std::size_t> ks) {
  for (auto& a : articles) a.doi = normalize_doi(a.doi);
  std::sort(articles.begin(), articles.end(), [](const RankedArticle& a, const RankedArticle& b) {
    return a.count != b.count ? a.count > b.count : a.doi < b.doi;
  });
  std::map<std::string, std::size_t, std::less<>> rank_of;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    if (!rank_of.emplace(articles[i].doi, i + 1).second)
      throw error(errc::invalid_record, "duplicate DOI in ranking: " + articles[i].doi);
  }

  RankScan scan;
  scan.total_articles = articles.size();
  for (const auto& raw : anchor_dois) {
    std::string doi = normalize_doi(raw);
    auto it = rank_of.find(doi);
    if (it == rank_of.end()) throw error(errc::missing_anchor, doi + " is not in the listing");
    scan.anchor_dois.push_back(doi);
    scan.anchor_ranks.push_back(it->second);
  }
  for (auto k : ks) {
    scan.top_k_counts[k] = static_cast<std::size_t>(
        std::count_if(scan.anchor_ranks.begin(), scan.anchor_ranks.end(), [k](std::size_t r) { return r <= k; }));
  }
  scan.ranking = std::move(articles);
  return scan;
}

std::vector<double> rank_quantiles(const RankScan& scan) {
  std::vector<double> u;
  for (auto r : scan.anchor_ranks)
    u.push_back((static_cast<double>(r) - 0.5) / static_cast<double>(scan.total_articles));
  return u;
}

// ---------------------------------------------------------------------------
// Temporal split
// ---------------------------------------------------------------------------

TemporalSplit temporal_split(std::span<const NormalizedHistogram> cohorts, int cutoff_year) {
  std::vector<NormalizedHistogram> pre, post;
  for (const auto& h : cohorts) {
    if (!h.year) throw error(errc::invalid_record, "cohort '" + h.label + "' has no year");
    (*h.year < cutoff_year ? pre : post).push_back(h);
  }
  TemporalSplit out;
  const std::string cut = std::to_string(cutoff_year);
  out.pre_cohorts = pre.size();
  out.post_cohorts = post.size();
  out.pre_empty = pre.empty();
  out.post_empty = post.empty();
  const double w = cohorts.empty() ? 0.25 : cohorts.front().bin_width;
  if (!pre.empty()) out.pre = pool_histograms(pre, "before " + cut, w);
  else out.pre.label = "before " + cut;
  if (!post.empty()) out.post = pool_histograms(post, cut + " and after", w);
  else out.post.label = cut + " and after";
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::nan("");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

double kolmogorov_sf(double x) {
  if (x <= 0) return 1.0;
  if (x < 1.18) {
    // Jacobi theta form converges fast for small x.
    const double pi = std::numbers::pi;
    double s = 0;
    for (int k = 1; k <= 50; ++k) {
      double t = (2.0 * k - 1) * pi / x;
      s += std::exp(-t * t / 8.0);
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * s, 0.0, 1.0);
  }
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_uniform(std::span<const double> samples) {
  KsResult r;
  r.n = samples.size();
  if (samples.empty()) return r;
  std::vector<double> u(samples.begin(), samples.end());
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double x = std::clamp(u[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1) / n - x, x - static_cast<double>(i) / n});
  }
  r.statistic = d;
  r.p_value = kolmogorov_sf(std::sqrt(n) * d);
  return r;
}

// ---------------------------------------------------------------------------
// Exclusions
// ---------------------------------------------------------------------------

std::vector<Exclusion> exclusions_from_json(const json& j) {
  std::vector<Exclusion> out;
  const json& list = j.is_object() && j.contains("exclusions") ? j["exclusions"] : j;
  if (!list.is_array()) throw error(errc::config_error, "exclusions must be an array");
  for (const auto& e : list) {
    try {
      out.push_back(Exclusion{e.at("journal").get<std::string>(), e.at("year").get<int>(), e.value("reason", "")});
    } catch (const json::exception& ex) {
      throw error(errc::config_error, std::string("bad exclusion entry: ") + ex.what());
    }
  }
  return out;
}

std::optional<std::string> excluded_reason(std::span<const Exclusion> list, std::string_view journal, int year) {
  auto key = text::alnum_tokens(journal);
  for (const auto& e : list)
    if (e.year == year && text::alnum_tokens(e.journal) == key) return e.reason.empty() ? "excluded" : e.reason;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// CSV / JSON
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw error(errc::malformed_payload, "line " + std::to_string(line_no) + ": not a number: " + s);
  }
}

bool parse_flag(const std::string& s, std::size_t line_no) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw error(errc::malformed_payload, "line " + std::to_string(line_no) + ": bad is_anchor value " + s);
}

}  // namespace

void write_histogram_csv(std::ostream& out, const NormalizedHistogram& h) {
  out << "label,z,is_anchor\n";
  for (std::size_t i = 0; i < h.anchor_z.size(); ++i)
    out << csv_field(i < h.anchor_labels.size() ? h.anchor_labels[i] : h.label) << ',' << format_double(h.anchor_z[i])
        << ",1\n";
  for (double z : h.z_values) out << csv_field(h.label) << ',' << format_double(z) << ",0\n";
}

NormalizedHistogram read_histogram_csv(std::istream& in) {
  NormalizedHistogram h;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || text::trim(line) != "label,z,is_anchor")
    throw error(errc::malformed_payload, "histogram CSV must start with label,z,is_anchor");
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto f = csv_split(line);
    if (f.size() != 3) throw error(errc::malformed_payload, "line " + std::to_string(line_no) + ": expected 3 fields");
    double z = parse_double(f[1], line_no);
    if (parse_flag(f[2], line_no)) {
      h.anchor_z.push_back(z);
      h.anchor_labels.push_back(f[0]);
    } else {
      if (h.label.empty()) h.label = f[0];
      h.z_values.push_back(z);
    }
  }
  h.cohorts = h.anchor_z.size();
  return h;
}

void write_rank_csv(std::ostream& out, const RankScan& scan) {
  std::set<std::string> anchors(scan.anchor_dois.begin(), scan.anchor_dois.end());
  out << "rank,doi,count,is_anchor\n";
  for (std::size_t i = 0; i < scan.ranking.size(); ++i) {
    const auto& r = scan.ranking[i];
    out << (i + 1) << ',' << csv_field(r.doi) << ',' << r.count << ',' << (anchors.count(r.doi) ? 1 : 0) << '\n';
  }
}

RankScan read_rank_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || text::trim(line) != "rank,doi,count,is_anchor")
    throw error(errc::malformed_payload, "rank CSV must start with rank,doi,count,is_anchor");
  std::vector<RankedArticle> rows;
  std::vector<std::string> anchors;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto f = csv_split(line);
    if (f.size() != 4) throw error(errc::malformed_payload, "line " + std::to_string(line_no) + ": expected 4 fields");
    if (!is_numeric(f[2])) throw error(errc::malformed_payload, "line " + std::to_string(line_no) + ": bad count");
    rows.push_back(RankedArticle{f[1], std::stoll(f[2])});
    if (parse_flag(f[3], line_no)) anchors.push_back(f[1]);
  }
  return rank_scan(std::move(rows), anchors, kDefaultTopK);
}

json to_json(const NormalizedHistogram& h) {
  json j = {{"label", h.label},
            {"bin_width", h.bin_width},
            {"cohorts", h.cohorts},
            {"degenerate_cohorts", h.degenerate_cohorts},
            {"comparison_count", h.z_values.size()},
            {"anchor_z", h.anchor_z},
            {"anchor_labels", h.anchor_labels}};
  j["year"] = h.year ? json(*h.year) : json(nullptr);
  return j;
}

json to_json(const RankScan& scan) {
  json top = json::object();
  for (const auto& [k, n] : scan.top_k_counts) top[std::to_string(k)] = n;
  json anchors = json::array();
  for (std::size_t i = 0; i < scan.anchor_dois.size(); ++i)
    anchors.push_back({{"doi", scan.anchor_dois[i]}, {"rank", scan.anchor_ranks[i]}});
  return json{{"total_articles", scan.total_articles}, {"anchors", anchors}, {"top_k_counts", top}};
}

}  // namespace citeaudit
