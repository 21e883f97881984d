#include "citeaudit/cli_report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "citeaudit/error.hpp"
#include "citeaudit/synth_corpus.hpp"
#include "citeaudit/text.hpp"

namespace citeaudit {

using nlohmann::json;
namespace chr = std::chrono;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot read " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

json read_json_file(const fs::path& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw error(errc::config_error, path.string() + " is not valid JSON");
  return j;
}

void write_text_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw error(errc::io_error, "cannot write " + path.string());
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::vector<CitationSource> sources_from(const json& j) {
  std::vector<CitationSource> out;
  for (const auto& s : j) {
    auto src = citation_source_from_string(s.get<std::string>());
    if (!src || *src == CitationSource::synthetic)
      throw error(errc::config_error, "unknown citation source '" + s.get<std::string>() + "'");
    if (std::find(out.begin(), out.end(), *src) == out.end()) out.push_back(*src);
  }
  return out;
}

JournalEntry journal_from_json(const json& j) {
  JournalEntry e;
  e.name = j.at("name").get<std::string>();
  if (j.contains("issn") && !j["issn"].is_null()) e.issn = j["issn"].get<std::string>();
  if (j.contains("volumes")) {
    for (const auto& [label, year] : j["volumes"].items()) e.volume_years[label] = year.get<int>();
  }
  return e;
}

}  // namespace

std::vector<JournalEntry> load_registry(const fs::path& path) {
  json j = read_json_file(path);
  const json& list = j.is_object() && j.contains("journals") ? j["journals"] : j;
  if (!list.is_array()) throw error(errc::config_error, path.string() + ": registry must be an array of journals");
  std::vector<JournalEntry> out;
  try {
    for (const auto& e : list) {
      out.push_back(journal_from_json(e));
      if (e.contains("abbreviation") && e["abbreviation"].is_string()) {
        JournalEntry alias = out.back();
        alias.name = e["abbreviation"].get<std::string>();
        out.push_back(std::move(alias));
      }
    }
  } catch (const json::exception& ex) {
    throw error(errc::config_error, path.string() + ": " + ex.what());
  }
  return out;
}

const JournalEntry* registry_lookup(const std::vector<JournalEntry>& registry, std::string_view name) {
  // Exact token match wins over an abbreviation match.
  auto key = text::alnum_tokens(name);
  for (const auto& e : registry)
    if (text::alnum_tokens(e.name) == key) return &e;
  for (const auto& e : registry)
    if (journal_names_match(e.name, name)) return &e;
  return nullptr;
}

AuditConfig AuditConfig::from_json(const json& j, const fs::path& base_dir, const std::vector<JournalEntry>& registry) {
  AuditConfig c;
  try {
    if (!j.is_object()) throw error(errc::config_error, "config must be a JSON object");
    std::vector<JournalEntry> known = registry;
    if (j.contains("registry_file")) {
      auto more = load_registry(resolve(base_dir, j["registry_file"].get<std::string>()));
      known.insert(known.end(), more.begin(), more.end());
    }
    for (const auto& jj : j.at("journals")) {
      JournalEntry e = journal_from_json(jj);
      if (e.issn.empty()) {
        if (const auto* r = registry_lookup(known, e.name)) e.issn = r->issn;
      }
      c.journals.push_back(std::move(e));
    }
    if (j.contains("sources")) c.sources = sources_from(j["sources"]);
    if (j.contains("min_cohort")) {
      auto m = j["min_cohort"].get<std::int64_t>();
      if (m < 2) throw error(errc::config_error, "min_cohort must be >= 2");
      c.min_cohort = static_cast<std::size_t>(m);
    }
    if (j.contains("exclusions")) c.exclusions = exclusions_from_json(j["exclusions"]);
    if (j.contains("exclusions_file")) {
      auto more = exclusions_from_json(read_json_file(resolve(base_dir, j["exclusions_file"].get<std::string>())));
      c.exclusions.insert(c.exclusions.end(), more.begin(), more.end());
    }
    c.cutoff_year = j.value("cutoff_year", c.cutoff_year);
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    if (j.contains("cache_dir")) c.cache_dir = resolve(base_dir, j["cache_dir"].get<std::string>());
    c.offline = j.value("offline", false);
    c.include_anchor = j.value("include_anchor", true);
    c.workers = j.value("workers", c.workers);
    c.policy.contact_email = j.value("contact_email", "");
    if (j.contains("policy")) {
      const json& p = j["policy"];
      c.policy.max_concurrent_requests = p.value("max_concurrent_requests", c.policy.max_concurrent_requests);
      c.policy.crossref_interval = chr::milliseconds(p.value("crossref_interval_ms", c.policy.crossref_interval.count()));
      c.policy.other_interval = chr::milliseconds(p.value("other_interval_ms", c.policy.other_interval.count()));
      c.policy.max_retries = p.value("max_retries", c.policy.max_retries);
      c.policy.backoff_initial = chr::milliseconds(p.value("backoff_initial_ms", c.policy.backoff_initial.count()));
      if (p.contains("cache_ttl_days")) c.policy.cache_ttl = chr::hours(24 * p["cache_ttl_days"].get<std::int64_t>());
    }
    if (j.contains("endpoints")) {
      const json& e = j["endpoints"];
      c.endpoints.crossref = e.value("crossref", c.endpoints.crossref);
      c.endpoints.open_citations = e.value("opencitations", c.endpoints.open_citations);
      c.endpoints.semantic_scholar = e.value("semanticscholar", c.endpoints.semantic_scholar);
    }
  } catch (const json::exception& ex) {
    throw error(errc::config_error, ex.what());
  }
  if (c.policy.contact_email.empty()) {
    if (const char* env = std::getenv(kContactEmailEnv)) c.policy.contact_email = env;
  }
  c.validate();
  return c;
}

void AuditConfig::validate() const {
  if (journals.empty()) throw error(errc::config_error, "no journals configured");
  for (const auto& j : journals) {
    if (j.issn.empty()) throw error(errc::config_error, "journal '" + j.name + "' has no ISSN (not in registry)");
    if (j.volume_years.empty()) throw error(errc::config_error, "journal '" + j.name + "' lists no volumes");
  }
  if (sources.empty()) throw error(errc::config_error, "no citation sources configured");
  if (min_cohort < 2) throw error(errc::config_error, "min_cohort must be >= 2");
  if (workers < 1) throw error(errc::config_error, "workers must be >= 1");
  policy.validate();
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string svg_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr double kW = 720, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string svg_open(std::string_view title) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW
    << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt2(kW / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << svg_escape(title)
    << "</text>\n";
  return o.str();
}

std::string axes(std::string_view xlabel, std::string_view ylabel) {
  std::ostringstream o;
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight << "\" y2=\"" << kH - kBottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kH - kBottom
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << fmt2((kLeft + kW - kRight) / 2) << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">"
    << svg_escape(xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << fmt2((kTop + kH - kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fmt2((kTop + kH - kBottom) / 2) << ")\">" << svg_escape(ylabel) << "</text>\n";
  return o.str();
}

std::string tick(double x, double y, std::string_view label, bool horizontal) {
  std::ostringstream o;
  if (horizontal) {
    o << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(x) << "\" y2=\"" << fmt2(y + 5)
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt2(x) << "\" y=\"" << fmt2(y + 18) << "\" text-anchor=\"middle\">" << svg_escape(label)
      << "</text>\n";
  } else {
    o << "<line x1=\"" << fmt2(x - 5) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(x) << "\" y2=\"" << fmt2(y)
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << fmt2(x - 8) << "\" y=\"" << fmt2(y + 4) << "\" text-anchor=\"end\">" << svg_escape(label)
      << "</text>\n";
  }
  return o.str();
}

std::string short_number(double v) {
  char buf[32];
  if (std::abs(v - std::round(v)) < 1e-9) std::snprintf(buf, sizeof buf, "%.0f", v);
  else std::snprintf(buf, sizeof buf, "%.2g", v);
  return buf;
}

}  // namespace

std::string render_histogram_svg(const NormalizedHistogram& h) {
  const double w = h.bin_width > 0 ? h.bin_width : 0.25;
  auto bins = histogram_bins(h);
  double lo = 0, hi = 0;
  bool any = false;
  auto extend = [&](double v) {
    if (!std::isfinite(v)) return;
    lo = any ? std::min(lo, v) : v;
    hi = any ? std::max(hi, v) : v;
    any = true;
  };
  for (double z : h.z_values) extend(z);
  for (double z : h.anchor_z) extend(z);
  if (!any) lo = -1, hi = 1;
  lo = std::floor(lo / w) * w - w;
  hi = std::ceil(hi / w) * w + w;
  std::size_t peak = 1;
  for (const auto& [k, n] : bins) peak = std::max(peak, n);

  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto sx = [&](double z) { return kLeft + (z - lo) / (hi - lo) * pw; };
  auto sy = [&](double n) { return kH - kBottom - n / static_cast<double>(peak) * ph; };

  std::ostringstream o;
  o << svg_open(h.label.empty() ? "Normalized citation counts" : h.label);
  o << "<g class=\"bars\" fill=\"#4c72b0\">\n";
  for (const auto& [k, n] : bins) {
    double x0 = sx(static_cast<double>(k) * w), x1 = sx(static_cast<double>(k + 1) * w);
    o << "<rect x=\"" << fmt2(x0) << "\" y=\"" << fmt2(sy(static_cast<double>(n))) << "\" width=\""
      << fmt2(std::max(0.0, x1 - x0 - 0.5)) << "\" height=\"" << fmt2(sy(0) - sy(static_cast<double>(n)))
      << "\"/>\n";
  }
  o << "</g>\n";
  o << axes("z (standard deviations from the cohort mean)", "articles");
  const double step = std::max(1.0, std::ceil((hi - lo) / 10.0));
  for (double t = std::ceil(lo / step) * step; t <= hi; t += step) o << tick(sx(t), kH - kBottom, short_number(t), true);
  for (int i = 0; i <= 4; ++i) {
    double n = static_cast<double>(peak) * i / 4.0;
    o << tick(kLeft, sy(n), short_number(std::round(n)), false);
  }
  o << "<g class=\"anchors\">\n";
  for (std::size_t i = 0; i < h.anchor_z.size(); ++i) {
    double x = sx(std::isfinite(h.anchor_z[i]) ? h.anchor_z[i] : 0.0);
    o << "<line class=\"anchor-marker\" x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(kTop) << "\" x2=\"" << fmt2(x)
      << "\" y2=\"" << fmt2(kH - kBottom) << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\">";
    o << "<title>" << svg_escape(i < h.anchor_labels.size() ? h.anchor_labels[i] : "Article 1") << " z="
      << fmt2(h.anchor_z[i]) << "</title></line>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

std::string render_rank_svg(const RankScan& scan, bool log_log) {
  const std::size_t n = scan.ranking.size();
  std::int64_t max_count = 1;
  for (const auto& r : scan.ranking) max_count = std::max(max_count, r.count);
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;

  auto fx = [&](double rank) {
    if (log_log) return std::log10(rank) / std::max(1e-9, std::log10(static_cast<double>(std::max<std::size_t>(n, 2))));
    return n <= 1 ? 0.0 : (rank - 1) / static_cast<double>(n - 1);
  };
  auto fy = [&](double count) {
    if (log_log) return std::log10(count + 1) / std::log10(static_cast<double>(max_count) + 1);
    return count / static_cast<double>(max_count);
  };
  auto sx = [&](double rank) { return kLeft + fx(rank) * pw; };
  auto sy = [&](double count) { return kH - kBottom - fy(count) * ph; };

  std::ostringstream o;
  o << svg_open(log_log ? "Citation counts ranked (log-log)" : "Citation counts ranked");
  o << "<polyline class=\"ranking\" fill=\"none\" stroke=\"#4c72b0\" stroke-width=\"1.5\" points=\"";
  // Consecutive points on the same pixel add nothing; keep the output small.
  std::string last;
  for (std::size_t i = 0; i < n; ++i) {
    std::string pt = fmt2(sx(static_cast<double>(i + 1))) + "," + fmt2(sy(static_cast<double>(scan.ranking[i].count)));
    if (pt == last && i + 1 != n) continue;
    o << (last.empty() ? "" : " ") << pt;
    last = pt;
  }
  o << "\"/>\n";
  o << axes(log_log ? "rank (log scale)" : "rank", log_log ? "citations + 1 (log scale)" : "citations");
  if (log_log) {
    for (double p = 1; p <= static_cast<double>(std::max<std::size_t>(n, 1)); p *= 10) o << tick(sx(p), kH - kBottom, short_number(p), true);
    for (double p = 1; p <= static_cast<double>(max_count) + 1; p *= 10) o << tick(kLeft, sy(p - 1), short_number(p), false);
  } else {
    for (int i = 0; i <= 4; ++i) {
      double r = 1 + (static_cast<double>(std::max<std::size_t>(n, 1)) - 1) * i / 4.0;
      o << tick(sx(r), kH - kBottom, short_number(std::round(r)), true);
      double c = static_cast<double>(max_count) * i / 4.0;
      o << tick(kLeft, sy(c), short_number(std::round(c)), false);
    }
  }
  o << "<g class=\"anchors\" fill=\"#d62728\">\n";
  for (std::size_t i = 0; i < scan.anchor_ranks.size(); ++i) {
    std::size_t r = scan.anchor_ranks[i];
    double count = static_cast<double>(scan.ranking.at(r - 1).count);
    o << "<circle class=\"anchor-point\" cx=\"" << fmt2(sx(static_cast<double>(r))) << "\" cy=\"" << fmt2(sy(count))
      << "\" r=\"4\"><title>" << svg_escape(scan.anchor_dois[i]) << " rank " << r << "</title></circle>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

namespace {

struct UnitWork {
  std::size_t journal = 0;
  std::string label;
  int year = 0;
};

struct UnitOutput {
  AuditUnitResult result;
  std::vector<NormalizedHistogram> histograms;
  std::vector<RankedArticle> listing_counts;  // Crossref counts of the whole year
  std::set<std::string> authors;
};

std::string error_line(const std::exception& e) { return e.what(); }

UnitOutput run_unit(const AuditConfig& cfg, CitationClient& client, const UnitWork& w) {
  UnitOutput out;
  AuditUnitResult& r = out.result;
  const JournalEntry& j = cfg.journals[w.journal];
  r.journal = j.name;
  r.volume_label = w.label;
  r.year = w.year;
  r.status = "failed";

  try {
    JournalQuery q{j.issn, chr::sys_days{chr::year{w.year} / chr::January / 1},
                   chr::sys_days{chr::year{w.year} / chr::December / 31}};
    JournalListing listing = client.fetch_journal_listing(q);
    r.listing_size = listing.records.size();
    for (const auto& rec : listing.records)
      for (const auto& a : rec.authors) out.authors.insert(a);
    for (const auto& [doi, n] : listing.crossref_counts) out.listing_counts.push_back(RankedArticle{doi, n});

    const std::string volume = w.label == "*" ? "" : w.label;
    std::vector<ArticleRecord> in_volume;
    for (const auto& rec : listing.records)
      if (volume.empty() || (rec.volume && text::trim(*rec.volume) == volume)) in_volume.push_back(rec);

    ArticleRecord anchor = find_anchor(in_volume, volume);
    r.anchor_doi = anchor.doi;
    if (anchor.publication_date) r.anchor_date = anchor.publication_date->iso();
    CohortSelection sel = build_cohort(anchor, in_volume, cfg.min_cohort);
    r.cohort_size = sel.comparisons.size();
    r.days_extended = sel.days_extended;
    r.exhausted = sel.exhausted;

    if (listing.crossref_counts.count(anchor.doi)) {
      RankScan scan = rank_scan(out.listing_counts, std::vector<std::string>{anchor.doi});
      r.anchor_rank = scan.anchor_ranks.front();
    }

    std::mutex err_mu;
    for (CitationSource src : cfg.sources) {
      const std::string src_name(to_string(src));
      CountLookup lookup = [&](const std::string& doi) -> std::optional<CitationCount> {
        if (src == CitationSource::crossref) {
          auto it = listing.crossref_counts.find(doi);
          if (it != listing.crossref_counts.end()) return CitationCount{doi, src, it->second, {}};
        }
        try {
          return client.fetch_citation_count(doi, src);
        } catch (const error& e) {
          std::lock_guard lock(err_mu);
          r.errors.push_back(src_name + " " + doi + ": " + e.what());
          return std::nullopt;
        }
      };
      try {
        Cohort cohort = attach_counts(sel, j.name, w.label, w.year, src, lookup);
        if (cohort.comparisons.empty()) {
          r.errors.push_back(src_name + ": no comparison article has a count");
          continue;
        }
        NormalizedHistogram h = normalize_cohort(cohort, NormalizeOptions{cfg.include_anchor, 0.25});
        r.anchor_z[src_name] = h.anchor_z.front();
        r.cohort_counts[src_name] = cohort.comparisons.size();
        out.histograms.push_back(std::move(h));
      } catch (const error& e) {
        r.errors.push_back(src_name + ": " + error_line(e));
      }
    }
    if (!out.histograms.empty()) {
      r.status = "completed";
    } else {
      r.reason = "no citation source produced a cohort";
    }
  } catch (const error& e) {
    r.reason = e.what();
  }
  return out;
}

json unit_json(const AuditUnitResult& u) {
  json j = {{"journal", u.journal},     {"volume", u.volume_label},         {"year", u.year},
            {"status", u.status},       {"reason", u.reason},               {"cohort_size", u.cohort_size},
            {"days_extended", u.days_extended}, {"exhausted", u.exhausted}, {"listing_size", u.listing_size},
            {"anchor_z", u.anchor_z},   {"cohort_counts", u.cohort_counts}, {"errors", u.errors}};
  j["anchor_doi"] = u.anchor_doi ? json(*u.anchor_doi) : json(nullptr);
  j["anchor_date"] = u.anchor_date ? json(*u.anchor_date) : json(nullptr);
  j["anchor_rank"] = u.anchor_rank ? json(*u.anchor_rank) : json(nullptr);
  return j;
}

std::string md_escape(std::string s) {
  text::replace_all(s, "|", "\\|");
  return s;
}

}  // namespace

AuditResult run_audit(const AuditConfig& cfg, std::shared_ptr<HttpTransport> transport, std::ostream& log) {
  cfg.validate();
  FetchPolicy policy = cfg.policy;
  policy.offline = cfg.offline;
  auto cache = std::make_shared<Cache>(cfg.cache_dir, policy.cache_ttl);
  CitationClient client(policy, cfg.endpoints, cache, std::move(transport));

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw error(errc::config_error, "cannot create output directory " + cfg.output_dir.string());

  AuditResult result;
  std::vector<UnitWork> work;
  std::vector<std::optional<UnitOutput>> outputs;
  for (std::size_t ji = 0; ji < cfg.journals.size(); ++ji) {
    for (const auto& [label, year] : cfg.journals[ji].volume_years) {
      if (auto why = excluded_reason(cfg.exclusions, cfg.journals[ji].name, year)) {
        AuditUnitResult u;
        u.journal = cfg.journals[ji].name;
        u.volume_label = label;
        u.year = year;
        u.status = "excluded";
        u.reason = *why;
        log << "skip " << u.journal << " " << year << ": excluded (" << *why << ")\n";
        UnitOutput o;
        o.result = std::move(u);
        outputs.emplace_back(std::move(o));
        work.push_back(UnitWork{ji, label, year});
        continue;
      }
      outputs.emplace_back(std::nullopt);
      work.push_back(UnitWork{ji, label, year});
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next++;
      if (i >= work.size()) return;
      if (outputs[i]) continue;
      UnitOutput o = run_unit(cfg, client, work[i]);
      {
        std::lock_guard lock(log_mu);
        log << (o.result.status == "completed" ? "done " : "FAIL ") << o.result.journal << " vol " << o.result.volume_label
            << " (" << o.result.year << ")";
        if (!o.result.reason.empty()) log << ": " << o.result.reason;
        log << "\n";
        for (const auto& e : o.result.errors) log << "  " << e << "\n";
      }
      outputs[i] = std::move(o);
    }
  };
  const int n_workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(work.size())));
  std::vector<std::thread> threads;
  for (int t = 1; t < n_workers; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  // Outputs are written here, by one thread, in a fixed order.
  json journals_json = json::array();
  std::vector<NormalizedHistogram> all_histograms;
  std::size_t total_articles = 0;
  std::set<std::string> all_authors;
  for (std::size_t ji = 0; ji < cfg.journals.size(); ++ji) {
    const JournalEntry& j = cfg.journals[ji];
    std::vector<NormalizedHistogram> hs;
    std::map<std::string, std::int64_t> counts;
    std::vector<std::string> anchors;
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (work[i].journal != ji || !outputs[i]) continue;
      const UnitOutput& o = *outputs[i];
      if (o.result.status != "completed") continue;
      hs.insert(hs.end(), o.histograms.begin(), o.histograms.end());
      for (const auto& rc : o.listing_counts) counts[rc.doi] = rc.count;
      total_articles += o.result.listing_size;
      all_authors.insert(o.authors.begin(), o.authors.end());
      if (o.result.anchor_doi && std::find(anchors.begin(), anchors.end(), *o.result.anchor_doi) == anchors.end())
        anchors.push_back(*o.result.anchor_doi);
    }
    if (hs.empty()) continue;
    all_histograms.insert(all_histograms.end(), hs.begin(), hs.end());
    const std::string slug = text::slug(j.name);
    NormalizedHistogram pooled = pool_histograms(hs, j.name);
    std::ostringstream hcsv;
    write_histogram_csv(hcsv, pooled);
    write_text_file(cfg.output_dir / ("histogram_" + slug + ".csv"), hcsv.str());

    std::vector<RankedArticle> rows;
    for (const auto& [doi, n] : counts) rows.push_back(RankedArticle{doi, n});
    std::vector<std::string> ranked_anchors;
    for (const auto& a : anchors)
      if (counts.count(normalize_doi(a))) ranked_anchors.push_back(a);
    RankScan scan = rank_scan(rows, ranked_anchors);
    std::ostringstream rcsv;
    write_rank_csv(rcsv, scan);
    write_text_file(cfg.output_dir / ("ranks_" + slug + ".csv"), rcsv.str());

    journals_json.push_back({{"name", j.name},
                             {"issn", j.issn},
                             {"slug", slug},
                             {"histogram_csv", "histogram_" + slug + ".csv"},
                             {"ranks_csv", "ranks_" + slug + ".csv"},
                             {"histogram", to_json(pooled)},
                             {"ranks", to_json(scan)}});
  }

  std::size_t completed = 0, failed = 0, excluded = 0;
  json units = json::array();
  for (auto& o : outputs) {
    const auto& u = o->result;
    completed += u.status == "completed";
    failed += u.status == "failed";
    excluded += u.status == "excluded";
    units.push_back(unit_json(u));
    result.units.push_back(u);
  }

  json split_json = nullptr;
  if (!all_histograms.empty()) {
    TemporalSplit split = temporal_split(all_histograms, cfg.cutoff_year);
    auto side = [](const NormalizedHistogram& h, std::size_t cohorts, bool empty) {
      json s = {{"cohorts", cohorts}, {"empty", empty}, {"anchor_z", h.anchor_z}};
      s["anchor_z_mean"] = empty ? json(nullptr) : json(mean(h.anchor_z));
      return s;
    };
    split_json = {{"cutoff_year", cfg.cutoff_year},
                  {"pre", side(split.pre, split.pre_cohorts, split.pre_empty)},
                  {"post", side(split.post, split.post_cohorts, split.post_empty)}};
  }

  json sources = json::array();
  for (auto s : cfg.sources) sources.push_back(std::string(to_string(s)));
  json summary = {{"tool", "citeaudit"},
                  {"sources", sources},
                  {"min_cohort", cfg.min_cohort},
                  {"include_anchor", cfg.include_anchor},
                  {"units", units},
                  {"journals", journals_json},
                  {"temporal_split", split_json},
                  {"scope", {{"journals", journals_json.size()}, {"articles", total_articles}, {"authors", all_authors.size()}}},
                  {"completed", completed},
                  {"failed", failed},
                  {"excluded", excluded}};
  write_text_file(cfg.output_dir / "summary.json", summary.dump(2) + "\n");

  std::ostringstream md;
  md << "# Article-number audit\n\n";
  md << "Sources: ";
  for (std::size_t i = 0; i < cfg.sources.size(); ++i) md << (i ? ", " : "") << to_string(cfg.sources[i]);
  md << ". Minimum cohort: " << cfg.min_cohort << ".\n\n";
  md << "Completed " << completed << ", failed " << failed << ", excluded " << excluded << ".\n\n";
  md << "| Journal | Volume | Year | Status | Anchor | Date | Cohort | Days added | Anchor z | Rank |\n";
  md << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& u : result.units) {
    std::string zs;
    for (const auto& [src, z] : u.anchor_z) zs += (zs.empty() ? "" : ", ") + src + " " + fmt2(z);
    md << "| " << md_escape(u.journal) << " | " << u.volume_label << " | " << u.year << " | " << u.status << " | "
       << u.anchor_doi.value_or("") << " | " << u.anchor_date.value_or("") << " | " << u.cohort_size << " | "
       << u.days_extended << " | " << zs << " | " << (u.anchor_rank ? std::to_string(*u.anchor_rank) : "") << " |\n";
  }
  bool any_notes = false;
  for (const auto& u : result.units) {
    if (u.reason.empty() && u.errors.empty()) continue;
    if (!any_notes) md << "\n## Notes\n\n";
    any_notes = true;
    md << "- " << md_escape(u.journal) << " " << u.year << ": " << (u.reason.empty() ? "" : md_escape(u.reason));
    if (!u.errors.empty()) md << (u.reason.empty() ? "" : "; ") << u.errors.size() << " item error(s), first: " << md_escape(u.errors.front());
    md << "\n";
  }
  md << "\nScope: " << journals_json.size() << " journal(s), " << total_articles << " listed articles, "
     << all_authors.size() << " distinct author names.\n";
  write_text_file(cfg.output_dir / "summary.md", md.str());

  result.exit_code = completed > 0 ? kExitOk : kExitNothing;
  return result;
}

int cmd_audit(const AuditConfig& config, std::shared_ptr<HttpTransport> transport, std::ostream& log) {
  try {
    return run_audit(config, std::move(transport), log).exit_code;
  } catch (const error& e) {
    log << "error: " << e.what() << "\n";
    return e.code() == errc::config_error ? kExitConfig : kExitNothing;
  }
}

// ---------------------------------------------------------------------------
// check-record
// ---------------------------------------------------------------------------

std::string format_consistency_table(const ConsistencyReport& report) {
  std::ostringstream o;
  o << "DOI " << report.doi << "\n\n";
  std::vector<SourceFormat> formats;
  for (const auto& fc : report.fields_compared)
    for (const auto& [f, v] : fc.values)
      if (std::find(formats.begin(), formats.end(), f) == formats.end()) formats.push_back(f);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"field"};
  for (auto f : formats) header.emplace_back(to_string(f));
  header.emplace_back("");
  rows.push_back(header);
  for (const auto& fc : report.fields_compared) {
    std::vector<std::string> row = {fc.field};
    for (auto f : formats) {
      std::string cell = "n/a";
      for (const auto& [ff, v] : fc.values)
        if (ff == f) cell = v ? *v : "-";
      row.push_back(cell);
    }
    bool conflict = std::find(report.conflicts.begin(), report.conflicts.end(), fc.field) != report.conflicts.end();
    row.emplace_back(conflict ? "CONFLICT" : "");
    rows.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    o << line << "\n";
  }
  o << "\n";
  if (report.findings.empty()) {
    o << "no findings\n";
  } else {
    for (const auto& f : report.findings) {
      o << to_string(f.rule) << " " << to_string(f.severity) << " " << f.doi;
      if (f.related_doi) o << " -> " << *f.related_doi;
      o << "\n";
      for (const auto& e : f.evidence) o << "    " << e.label << ": " << e.text << "\n";
    }
  }
  return o.str();
}

int cmd_check_record(const std::vector<fs::path>& paths, bool json_output, std::ostream& out, std::ostream& err) {
  FormatBundle bundle;
  std::size_t parsed = 0;
  for (const auto& p : paths) {
    try {
      std::string text = read_text_file(p);
      auto fmt = sniff_format(text);
      if (!fmt) throw error(errc::malformed_payload, "unrecognized format");
      ArticleRecord rec;
      switch (*fmt) {
        case SourceFormat::ris: rec = parse_ris(text); break;
        case SourceFormat::publisher_json: rec = parse_publisher_json(text).record; break;
        case SourceFormat::jats: rec = parse_jats(text); break;
        case SourceFormat::crossref_work: rec = parse_crossref_work(std::string_view(text)).record; break;
        case SourceFormat::synthetic: throw error(errc::malformed_payload, "unsupported format");
      }
      if (bundle.per_format.count(rec.source_format))
        throw error(errc::mismatched_input, std::string("second ") + std::string(to_string(rec.source_format)) + " input");
      bundle.add(std::move(rec), std::move(text));
      ++parsed;
    } catch (const error& e) {
      err << p.string() << ": " << e.what() << "\n";
    }
  }
  if (parsed < 2) {
    err << "error: need at least two readable records in different formats, got " << parsed << "\n";
    return kExitNothing;
  }
  ConsistencyReport report = cross_format_consistency(bundle);
  if (json_output) out << to_json(report).dump(2) << "\n";
  else out << format_consistency_table(report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// scan-references
// ---------------------------------------------------------------------------

namespace {

ArticleRecord record_from_any(const json& j) {
  if (j.contains("DOI") || j.contains("message")) return parse_crossref_work(j).record;
  return article_from_json(j);
}

std::vector<ArticleRecord> load_candidates(const fs::path& path) {
  std::string text = read_text_file(path);
  std::vector<ArticleRecord> out;
  json j = json::parse(text, nullptr, false);
  if (!j.is_discarded()) {
    const json& list = j.is_object() && j.contains("records") ? j["records"] : j;
    if (list.is_array()) {
      for (const auto& e : list) out.push_back(record_from_any(e));
      return out;
    }
    out.push_back(record_from_any(list));
    return out;
  }
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    json e = json::parse(line, nullptr, false);
    if (e.is_discarded()) throw error(errc::malformed_payload, path.string() + ": bad JSON line");
    out.push_back(record_from_any(e));
  }
  return out;
}

}  // namespace

int cmd_scan_references(const ScanOptions& opt, std::ostream& out, std::ostream& err) {
  std::string input;
  std::vector<ArticleRecord> pool;
  std::vector<JournalEntry> registry;
  try {
    input = read_text_file(opt.input);
    if (opt.candidates) pool = load_candidates(*opt.candidates);
    if (opt.registry) registry = load_registry(*opt.registry);
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == errc::config_error ? kExitConfig : kExitNothing;
  }

  // Journal identity: registry ISSN when known, else the name itself.
  auto journal_key = [&](std::string_view name) -> std::string {
    if (const auto* e = registry_lookup(registry, name)) return "issn:" + e->issn;
    return "name:" + text::slug(name);
  };
  auto same_journal = [&](std::string_view ref_journal, const ArticleRecord& c) {
    if (journal_names_match(ref_journal, c.journal_title) || journal_names_match(c.journal_title, ref_journal)) return true;
    if (c.issn) {
      if (const auto* e = registry_lookup(registry, ref_journal)) return e->issn == *c.issn;
    }
    return journal_key(ref_journal) == journal_key(c.journal_title);
  };
  std::set<std::string> fetched_listings;

  std::map<std::string, std::size_t> kinds;
  std::map<std::string, std::size_t> by_rule;
  std::vector<AnomalyFinding> findings;
  std::size_t lines = 0, errors = 0;

  std::istringstream in(input);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    ++lines;
    try {
      std::string reference, title, journal, citing;
      std::vector<ArticleRecord> targets, extra;
      if (t.front() == '{') {
        json j = json::parse(t, nullptr, false);
        if (j.is_discarded()) throw error(errc::malformed_payload, "line " + std::to_string(line_no) + ": bad JSON");
        reference = j.value("reference", "");
        title = j.value("title", "");
        journal = j.value("journal", "");
        citing = j.value("citing_doi", "");
        if (j.contains("link_targets"))
          for (const auto& e : j["link_targets"]) targets.push_back(record_from_any(e));
        if (j.contains("candidates"))
          for (const auto& e : j["candidates"]) extra.push_back(record_from_any(e));
      } else {
        reference = std::string(t);
      }

      std::optional<ParsedReference> ref;
      if (!reference.empty()) {
        ref = parse_reference_string(reference);
        ++kinds[std::string(to_string(ref->locator_kind))];
        if (title.empty()) title = ref->title_hint;
        if (journal.empty()) journal = ref->journal_hint;
      }

      if (ref && ref->locator_kind == LocatorKind::issue_colon_locator && ref->locator) {
        // Crossref resolution of the referenced volume when the registry knows its year.
        if (opt.client && ref->volume) {
          if (const auto* e = registry_lookup(registry, ref->journal_hint)) {
            auto vy = e->volume_years.find(*ref->volume);
            if (vy != e->volume_years.end()) {
              std::string key = e->issn + ":" + std::to_string(vy->second);
              if (fetched_listings.insert(key).second) {
                try {
                  JournalQuery q{e->issn, chr::sys_days{chr::year{vy->second} / chr::January / 1},
                                 chr::sys_days{chr::year{vy->second} / chr::December / 31}};
                  auto listing = opt.client->fetch_journal_listing(q);
                  pool.insert(pool.end(), listing.records.begin(), listing.records.end());
                } catch (const error& ex) {
                  err << "line " << line_no << ": resolution failed: " << ex.what() << "\n";
                }
              }
            }
          }
        }
        std::vector<ArticleRecord> candidates = extra;
        for (const auto& c : pool) {
          if (!same_journal(ref->journal_hint, c)) continue;
          bool numbered_l = c.article_number == ref->locator;
          bool cited = title.empty() ? (c.volume == ref->volume)
                                     : title_similarity(title, c.title) >= kTitleSimilarityThreshold;
          if (numbered_l || cited) candidates.push_back(c);
        }
        auto f = detect_o2(*ref, candidates);
        findings.insert(findings.end(), f.begin(), f.end());
      }
      if (!targets.empty()) {
        auto f = detect_o3(title, journal, targets, citing);
        findings.insert(findings.end(), f.begin(), f.end());
      }
    } catch (const error& e) {
      ++errors;
      err << "line " << line_no << ": " << e.what() << "\n";
    }
  }

  for (const auto& f : findings) ++by_rule[std::string(to_string(f.rule))];
  json summary = {{"lines", lines}, {"locator_kinds", kinds}, {"findings", by_rule}, {"errors", errors}};
  if (opt.json_output) {
    out << to_jsonl(findings);
    err << summary.dump() << "\n";
  } else {
    for (const auto& f : findings) {
      out << to_string(f.rule) << " " << to_string(f.severity) << " " << f.doi;
      if (f.related_doi) out << " -> " << *f.related_doi;
      out << "\n";
      for (const auto& e : f.evidence) out << "    " << e.label << ": " << e.text << "\n";
    }
    out << "lines " << lines << ", findings " << findings.size();
    for (const auto& [k, n] : kinds) out << ", " << k << " " << n;
    out << "\n";
  }
  if (opt.output_dir) {
    write_text_file(*opt.output_dir / "findings.jsonl", to_jsonl(findings));
    write_text_file(*opt.output_dir / "scan_summary.json", summary.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const SimulateOptions& opt, std::ostream& log) {
  SynthSpec spec;
  try {
    spec = synth_spec_from_json(read_json_file(opt.spec));
  } catch (const error& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (opt.seed) spec.seed = *opt.seed;

  try {
    GroundTruthGraph g = build_corpus(spec);
    write_corpus(opt.output_dir, g, spec);
    Distortion d = measure_distortion(g);

    std::int64_t sum_true = 0, sum_obs = 0;
    for (auto c : d.true_counts) sum_true += c;
    for (auto c : d.observed_counts) sum_obs += c;
    std::size_t rerouted = 0, unreroutable = 0;
    for (const auto& e : g.corruption_log) (e.outcome == CorruptionOutcome::rerouted ? rerouted : unreroutable)++;

    json metric = json::array();
    std::size_t metric_diffs = 0;
    for (const auto& m : d.two_year_metric) {
      metric.push_back({{"journal", spec.journals[m.journal].name},
                        {"year", m.year},
                        {"true", m.true_value},
                        {"observed", m.observed_value}});
      if (m.true_value != m.observed_value) ++metric_diffs;
    }
    json anchors = json::array();
    for (std::size_t v = 0; v < g.volumes.size(); ++v) {
      std::size_t a = g.anchor_of(v);
      if (g.volumes[v].article_count == 0) continue;
      anchors.push_back({{"journal", spec.journals[g.volumes[v].journal].name},
                         {"volume", g.volumes[v].label},
                         {"year", g.volumes[v].year},
                         {"doi", g.articles[a].doi},
                         {"true", d.true_counts[a]},
                         {"observed", d.observed_counts[a]}});
    }
    json distortion = {{"articles", g.articles.size()},
                       {"edges", g.true_edges.size()},
                       {"sum_true", sum_true},
                       {"sum_observed", sum_obs},
                       {"rerouted", rerouted},
                       {"unreroutable", unreroutable},
                       {"two_year_metric", metric},
                       {"two_year_metric_differences", metric_diffs},
                       {"anchors", anchors}};
    write_text_file(opt.output_dir / "distortion.json", distortion.dump(2) + "\n");

    std::vector<Cohort> cohorts = synthetic_cohorts(g, spec);
    std::ostringstream md;
    md << "# Synthetic corpus report\n\n";
    md << "Seed " << spec.seed << ": " << g.articles.size() << " articles, " << g.true_edges.size() << " citations, "
       << rerouted << " rerouted, " << unreroutable << " unreroutable.\n\n";
    md << "Citation totals: true " << sum_true << ", observed " << sum_obs << ".\n\n";

    json journals = json::array();
    for (std::size_t ji = 0; ji < spec.journals.size(); ++ji) {
      const std::string slug = spec.journals[ji].slug.empty() ? text::slug(spec.journals[ji].name) : spec.journals[ji].slug;
      std::vector<NormalizedHistogram> hs;
      std::vector<const Cohort*> used;
      for (const auto& c : cohorts) {
        if (c.journal != spec.journals[ji].name || c.comparisons.empty()) continue;
        hs.push_back(normalize_cohort(c));
        used.push_back(&c);
      }
      if (hs.empty()) continue;
      NormalizedHistogram pooled = pool_histograms(hs, spec.journals[ji].name);
      std::ostringstream hcsv;
      write_histogram_csv(hcsv, pooled);
      write_text_file(opt.output_dir / ("histogram_" + slug + ".csv"), hcsv.str());
      RankScan scan = synthetic_rank_scan(g, ji);
      std::ostringstream rcsv;
      write_rank_csv(rcsv, scan);
      write_text_file(opt.output_dir / ("ranks_" + slug + ".csv"), rcsv.str());
      KsResult ks = ks_uniform(rank_quantiles(scan));

      double min_z = *std::min_element(pooled.anchor_z.begin(), pooled.anchor_z.end());
      bool all_above = min_z > kAnchorZThreshold;
      md << "## " << spec.journals[ji].name << "\n\n";
      md << "| Volume | Year | Anchor z | Anchor rank |\n|---|---|---|---|\n";
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const std::string doi = normalize_doi(used[k]->anchor.record.doi);
        std::size_t rank = 0;
        for (std::size_t a = 0; a < scan.anchor_dois.size(); ++a)
          if (scan.anchor_dois[a] == doi) rank = scan.anchor_ranks[a];
        md << "| " << used[k]->volume_label << " | " << hs[k].year.value_or(0) << " | " << fmt2(hs[k].anchor_z.front()) << " | "
           << rank << " of " << scan.total_articles << " |\n";
      }
      md << "\nAll anchors above z = " << fmt2(kAnchorZThreshold) << ": " << (all_above ? "yes" : "no")
         << ". Anchor-rank uniformity (Kolmogorov-Smirnov): D = " << fmt2(ks.statistic) << ", p = " << fmt2(ks.p_value)
         << ".\n\n";
      journals.push_back({{"name", spec.journals[ji].name},
                          {"anchor_z", pooled.anchor_z},
                          {"min_anchor_z", min_z},
                          {"all_anchors_above_threshold", all_above},
                          {"ranks", to_json(scan)},
                          {"rank_uniformity", {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"n", ks.n}}}});
    }

    json evaluation = nullptr;
    if (opt.evaluate) {
      DetectorEvaluation ev = evaluate_detectors(g, cohorts);
      auto pr = [](const PrecisionRecall& p) {
        return json{{"true_positives", p.true_positives},
                    {"false_positives", p.false_positives},
                    {"false_negatives", p.false_negatives},
                    {"precision", p.precision()},
                    {"recall", p.recall()}};
      };
      json sweep = json::array();
      for (const auto& pt : ev.o1_sweep) sweep.push_back({{"threshold", pt.threshold}, {"pr", pr(pt.pr)}});
      evaluation = {{"o2_edges", pr(ev.o2_edges)}, {"o1_anchors", pr(ev.o1_anchors)}, {"o1_sweep", sweep}};
      write_text_file(opt.output_dir / "evaluation.json", evaluation.dump(2) + "\n");
      md << "## Detectors\n\n";
      md << "O.2 from rendered references: precision " << fmt2(ev.o2_edges.precision()) << ", recall "
         << fmt2(ev.o2_edges.recall()) << ".\n";
      md << "O.1 anchor flag at z > " << fmt2(kAnchorZThreshold) << ": precision " << fmt2(ev.o1_anchors.precision())
         << ", recall " << fmt2(ev.o1_anchors.recall()) << ".\n";
    }
    write_text_file(opt.output_dir / "report.md", md.str());
    json summary = {{"seed", spec.seed}, {"journals", journals}, {"distortion_file", "distortion.json"}};
    summary["evaluation"] = evaluation;
    write_text_file(opt.output_dir / "simulate_summary.json", summary.dump(2) + "\n");
    log << "corpus written to " << opt.output_dir.string() << "\n";
    return kExitOk;
  } catch (const error& e) {
    log << "error: " << e.what() << "\n";
    return e.code() == errc::spec_error ? kExitConfig : kExitNothing;
  }
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

int cmd_render(const std::vector<fs::path>& csvs, const fs::path& output_dir, std::ostream& log) {
  std::size_t rendered = 0;
  for (const auto& p : csvs) {
    try {
      std::string content = read_text_file(p);
      std::istringstream in(content);
      const std::string stem = p.stem().string();
      if (content.rfind("label,z,is_anchor", 0) == 0) {
        NormalizedHistogram h = read_histogram_csv(in);
        write_text_file(output_dir / (stem + ".svg"), render_histogram_svg(h));
      } else if (content.rfind("rank,doi,count,is_anchor", 0) == 0) {
        RankScan scan = read_rank_csv(in);
        write_text_file(output_dir / (stem + "_linear.svg"), render_rank_svg(scan, false));
        write_text_file(output_dir / (stem + "_loglog.svg"), render_rank_svg(scan, true));
      } else {
        throw error(errc::malformed_payload, "not a histogram or rank CSV");
      }
      ++rendered;
    } catch (const error& e) {
      log << p.string() << ": " << e.what() << "\n";
    }
  }
  return rendered > 0 ? kExitOk : kExitNothing;
}

// ---------------------------------------------------------------------------
// fetch
// ---------------------------------------------------------------------------

int cmd_fetch(CitationClient& client, const FetchOptions& opt, std::ostream& out, std::ostream& err) {
  std::size_t ok = 0;
  for (const auto& doi : opt.dois) {
    for (auto src : opt.sources) {
      try {
        CitationCount c = client.fetch_citation_count(doi, src);
        ++ok;
        if (opt.json_output) out << to_json(c).dump() << "\n";
        else out << c.doi << "\t" << to_string(c.source) << "\t" << c.count << "\n";
      } catch (const error& e) {
        err << doi << " " << to_string(src) << ": " << e.what() << "\n";
      }
    }
  }
  return ok > 0 || opt.dois.empty() ? kExitOk : kExitNothing;
}

}  // namespace citeaudit
