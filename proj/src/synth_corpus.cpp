#include "citeaudit/synth_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "citeaudit/error.hpp"
#include "citeaudit/text.hpp"

namespace citeaudit {

using nlohmann::json;
namespace chr = std::chrono;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PRNG
// ---------------------------------------------------------------------------

std::uint64_t SplitMix64::below(std::uint64_t n) {
  // Lemire-style threshold: reject the low 2^64 mod n values.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t x = next();
    if (x >= threshold) return x % n;
  }
}

std::int64_t SplitMix64::between(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

bool SplitMix64::bernoulli(double p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  // p * 2^53 is exact in binary floating point; the comparison is integral.
  const auto cut = static_cast<std::uint64_t>(p * 9007199254740992.0);
  return (next() >> 11) < cut;
}

// ---------------------------------------------------------------------------
// Spec
// ---------------------------------------------------------------------------

std::string_view to_string(CorruptionKind k) {
  return k == CorruptionKind::reroute_to_article1 ? "RerouteToArticle1" : "RerouteToPdfLength";
}

int JournalSpec::year_of_volume(int index) const {
  if (index >= 0 && static_cast<std::size_t>(index) < volume_years.size()) return volume_years[index];
  return first_year + index;
}

void SynthSpec::validate() const {
  auto fail = [](const std::string& m) { throw error(errc::spec_error, m); };
  auto prob = [&](double p, const std::string& what) {
    if (!(p >= 0 && p <= 1)) fail(what + " must be in [0,1]");
  };
  if (journals.empty()) fail("at least one journal is required");
  if (citation_window_days < 1) fail("citation_window_days must be >= 1");
  std::set<std::string> slugs;
  for (const auto& j : journals) {
    const std::string who = "journal '" + j.name + "': ";
    if (j.name.empty()) fail("journal name must not be empty");
    if (!slugs.insert(j.slug.empty() ? text::slug(j.name) : j.slug).second) fail(who + "duplicate slug");
    if (j.volumes < 1) fail(who + "volumes must be >= 1");
    if (j.first_volume < 1) fail(who + "first_volume must be >= 1");
    if (!j.volume_years.empty() && j.volume_years.size() != static_cast<std::size_t>(j.volumes))
      fail(who + "volume_year_map must list every volume");
    for (int v = 0; v < j.volumes; ++v) {
      int y = j.year_of_volume(v);
      if (y < 1900 || y > 2100) fail(who + "volume year out of [1900, 2100]");
    }
    if (j.days_per_volume < 1 || j.days_per_volume > 364) fail(who + "days_per_volume must be in [1, 364]");
    if (j.articles_per_day.min < 0 || j.articles_per_day.max < j.articles_per_day.min)
      fail(who + "articles_per_day needs 0 <= min <= max");
    if (j.articles_per_day.min + j.articles_per_day.max < 2) fail(who + "articles_per_day mean must be >= 1");
    if (j.pdf_length.min < 3 || j.pdf_length.max > 30 || j.pdf_length.max < j.pdf_length.min)
      fail(who + "pdf_length must lie within [3, 30]");
    prob(j.attachment_exponent, who + "attachment_exponent");
    if (!(j.external_citation_rate >= 0) || j.external_citation_rate > 1e4)
      fail(who + "external_citation_rate must be in [0, 10000]");
    std::uint64_t n = static_cast<std::uint64_t>(j.volumes) * j.days_per_volume * j.articles_per_day.max;
    if (n > 10'000'000) fail(who + "too many articles");
  }
  for (const auto& r : corruption) {
    prob(r.probability, std::string(to_string(r.kind)) + " probability");
    prob(r.cross_volume_probability, "cross_volume_probability");
    if (r.active_years && r.active_years->first > r.active_years->second) fail("active_years range is reversed");
  }
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      throw error(errc::spec_error, where + ": unknown key '" + k + "'");
  }
}

IntRange range_from(const json& j, const std::string& where) {
  if (j.is_array() && j.size() == 2) return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
  if (j.is_object()) {
    check_keys(j, {"min", "max"}, where);
    return {j.at("min").get<std::int64_t>(), j.at("max").get<std::int64_t>()};
  }
  throw error(errc::spec_error, where + " must be {min, max} or [min, max]");
}

}  // namespace

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec s;
  try {
    if (!j.is_object()) throw error(errc::spec_error, "spec must be a JSON object");
    check_keys(j, {"seed", "citation_window_days", "journals", "corruption"}, "spec");
    if (j.contains("seed")) {
      const json& seed = j["seed"];
      if (seed.is_string()) s.seed = std::stoull(seed.get<std::string>(), nullptr, 0);
      else if (seed.is_number_unsigned()) s.seed = seed.get<std::uint64_t>();
      else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0) s.seed = seed.get<std::uint64_t>();
      else throw error(errc::spec_error, "seed must be a non-negative integer");
    }
    s.citation_window_days = j.value("citation_window_days", s.citation_window_days);
    for (const auto& jj : j.at("journals")) {
      check_keys(jj,
                 {"name", "issn", "slug", "volumes", "first_volume", "first_year", "volume_year_map", "days_per_volume",
                  "articles_per_day", "pdf_length", "attachment_exponent", "external_citation_rate"},
                 "journal");
      JournalSpec js;
      js.name = jj.at("name").get<std::string>();
      js.issn = jj.value("issn", "");
      js.slug = jj.value("slug", "");
      js.volumes = jj.value("volumes", js.volumes);
      js.first_volume = jj.value("first_volume", js.first_volume);
      js.first_year = jj.value("first_year", js.first_year);
      if (jj.contains("volume_year_map")) {
        const json& m = jj["volume_year_map"];
        if (m.is_array()) {
          for (const auto& y : m) js.volume_years.push_back(y.get<int>());
        } else if (m.is_object()) {
          std::map<int, int> by_label;
          for (const auto& [k, y] : m.items()) by_label[std::stoi(k)] = y.get<int>();
          for (int v = 0; v < js.volumes; ++v) {
            auto it = by_label.find(js.first_volume + v);
            if (it == by_label.end()) throw error(errc::spec_error, "volume_year_map misses volume " + std::to_string(js.first_volume + v));
            js.volume_years.push_back(it->second);
          }
        } else {
          throw error(errc::spec_error, "volume_year_map must be an array or object");
        }
      }
      js.days_per_volume = jj.value("days_per_volume", js.days_per_volume);
      if (jj.contains("articles_per_day")) js.articles_per_day = range_from(jj["articles_per_day"], "articles_per_day");
      if (jj.contains("pdf_length")) js.pdf_length = range_from(jj["pdf_length"], "pdf_length");
      js.attachment_exponent = jj.value("attachment_exponent", js.attachment_exponent);
      js.external_citation_rate = jj.value("external_citation_rate", js.external_citation_rate);
      s.journals.push_back(std::move(js));
    }
    if (j.contains("corruption")) {
      for (const auto& jr : j["corruption"]) {
        check_keys(jr, {"kind", "probability", "active_years", "cross_volume_probability"}, "corruption rule");
        CorruptionRule r;
        std::string kind = jr.at("kind").get<std::string>();
        if (kind == "RerouteToArticle1" || kind == "O1") r.kind = CorruptionKind::reroute_to_article1;
        else if (kind == "RerouteToPdfLength" || kind == "O2") r.kind = CorruptionKind::reroute_to_pdf_length;
        else throw error(errc::spec_error, "unknown corruption kind '" + kind + "'");
        r.probability = jr.at("probability").get<double>();
        r.cross_volume_probability = jr.value("cross_volume_probability", 0.0);
        if (jr.contains("active_years") && !jr["active_years"].is_null()) {
          IntRange yr = range_from(jr["active_years"], "active_years");
          r.active_years = std::pair<int, int>(static_cast<int>(yr.min), static_cast<int>(yr.max));
        }
        s.corruption.push_back(r);
      }
    }
  } catch (const json::exception& e) {
    throw error(errc::spec_error, e.what());
  } catch (const std::invalid_argument& e) {
    throw error(errc::spec_error, std::string("bad number: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw error(errc::spec_error, std::string("number out of range: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const SynthSpec& s) {
  json journals = json::array();
  for (const auto& j : s.journals) {
    json years = json::array();
    for (int v = 0; v < j.volumes; ++v) years.push_back(j.year_of_volume(v));
    journals.push_back({{"name", j.name},
                        {"issn", j.issn},
                        {"slug", j.slug.empty() ? text::slug(j.name) : j.slug},
                        {"volumes", j.volumes},
                        {"first_volume", j.first_volume},
                        {"first_year", j.first_year},
                        {"volume_year_map", years},
                        {"days_per_volume", j.days_per_volume},
                        {"articles_per_day", {{"min", j.articles_per_day.min}, {"max", j.articles_per_day.max}}},
                        {"pdf_length", {{"min", j.pdf_length.min}, {"max", j.pdf_length.max}}},
                        {"attachment_exponent", j.attachment_exponent},
                        {"external_citation_rate", j.external_citation_rate}});
  }
  json rules = json::array();
  for (const auto& r : s.corruption) {
    json jr = {{"kind", std::string(to_string(r.kind))},
               {"probability", r.probability},
               {"cross_volume_probability", r.cross_volume_probability}};
    jr["active_years"] = r.active_years ? json::array({r.active_years->first, r.active_years->second}) : json(nullptr);
    rules.push_back(jr);
  }
  return json{{"seed", s.seed},
              {"citation_window_days", s.citation_window_days},
              {"journals", journals},
              {"corruption", rules}};
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

chr::sys_days publishing_day(int year, int offset) {
  return chr::sys_days{chr::year{year} / chr::January / 2} + chr::days{offset};
}

std::string hex8(std::uint64_t v) {
  char buf[12];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(v >> 32));
  return buf;
}

std::string ymd_compact(chr::sys_days d) {
  chr::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

struct CitationEvent {
  chr::sys_days date;
  std::uint32_t target;
  std::uint64_t seq;
};

}  // namespace

GroundTruthGraph generate_corpus(const SynthSpec& spec) {
  spec.validate();
  GroundTruthGraph g;
  SplitMix64 master(spec.seed);
  std::vector<CitationEvent> events;
  std::uint64_t seq = 0;

  for (std::size_t ji = 0; ji < spec.journals.size(); ++ji) {
    const JournalSpec& js = spec.journals[ji];
    const std::string slug = js.slug.empty() ? text::slug(js.name) : js.slug;
    SplitMix64 rng(master.next());
    SplitMix64 doi_hash(master.next());  // separate stream so DOIs do not follow article order
    const std::size_t journal_first = g.articles.size();

    for (int v = 0; v < js.volumes; ++v) {
      VolumeInfo vi;
      vi.journal = ji;
      vi.label = std::to_string(js.first_volume + v);
      vi.year = js.year_of_volume(v);
      vi.first_article = g.articles.size();
      int number = 0;
      for (int d = 0; d < js.days_per_volume; ++d) {
        const auto day = publishing_day(vi.year, d);
        const auto n_day = rng.between(js.articles_per_day.min, js.articles_per_day.max);
        for (std::int64_t k = 0; k < n_day; ++k) {
          ++number;
          ArticleRecord r;
          const std::string num = std::to_string(number);
          r.doi = "10.5555/" + slug + "." + hex8(doi_hash.next()) + ".v" + vi.label + ".a" + num;
          r.journal_title = js.name;
          if (!js.issn.empty()) r.issn = js.issn;
          r.volume = vi.label;
          r.issue = "1";
          r.article_number = num;
          r.page_count = static_cast<int>(rng.between(js.pdf_length.min, js.pdf_length.max));
          r.publication_date = PartialDate::from_sys_days(day);
          r.title = "Synthetic article " + slug + " v" + vi.label + "-a" + num;
          r.authors = {"Synth, A."};
          r.source_format = SourceFormat::synthetic;
          g.articles.push_back(std::move(r));
          g.article_volume.push_back(g.volumes.size());
        }
      }
      vi.article_count = g.articles.size() - vi.first_article;
      g.volumes.push_back(vi);
    }

    // Citations: an urn over the journal's articles. With probability
    // attachment_exponent a draw picks a slot from (one base slot per
    // article + one slot per citation already received), otherwise it picks
    // uniformly. Each citation is dated a uniform 1..W days after the cited
    // article, so it always comes from a later work.
    const std::size_t n = g.articles.size() - journal_first;
    if (n == 0) continue;
    const auto total = static_cast<std::uint64_t>(std::llround(js.external_citation_rate * static_cast<double>(n)));
    std::vector<std::uint32_t> received;
    received.reserve(total);
    for (std::uint64_t e = 0; e < total; ++e) {
      std::uint64_t local;
      if (rng.bernoulli(js.attachment_exponent)) {
        std::uint64_t u = rng.below(n + received.size());
        local = u < n ? u : received[u - n];
      } else {
        local = rng.below(n);
      }
      received.push_back(static_cast<std::uint32_t>(local));
      const auto target = static_cast<std::uint32_t>(journal_first + local);
      const auto age = rng.between(1, spec.citation_window_days);
      const auto cited_day = g.articles[target].publication_date->ordering_key();
      events.push_back(CitationEvent{cited_day + chr::days{age}, target, seq++});
    }
  }

  // Group citations into citing works: on each day the k-th citation of a
  // given article goes to work k, so no work cites the same article twice.
  std::sort(events.begin(), events.end(), [](const CitationEvent& a, const CitationEvent& b) {
    if (a.date != b.date) return a.date < b.date;
    if (a.target != b.target) return a.target < b.target;
    return a.seq < b.seq;
  });
  std::size_t i = 0;
  while (i < events.size()) {
    std::size_t j = i;
    std::size_t works = 0;
    while (j < events.size() && events[j].date == events[i].date) {
      std::size_t run = j;
      while (run < events.size() && events[run].date == events[i].date && events[run].target == events[j].target) ++run;
      works = std::max(works, run - j);
      j = run;
    }
    const auto base = static_cast<std::uint32_t>(g.citing_works.size());
    const std::string stamp = ymd_compact(events[i].date);
    for (std::size_t w = 0; w < works; ++w)
      g.citing_works.push_back(CitingWork{"10.5555/citing.d" + stamp + ".w" + std::to_string(w), events[i].date});
    for (std::size_t k = i; k < j;) {
      std::size_t run = k;
      while (run < j && events[run].target == events[k].target) {
        g.true_edges.push_back(Edge{base + static_cast<std::uint32_t>(run - k), events[run].target});
        ++run;
      }
      k = run;
    }
    i = j;
  }
  std::sort(g.true_edges.begin(), g.true_edges.end(), [](const Edge& a, const Edge& b) {
    return a.citing != b.citing ? a.citing < b.citing : a.cited < b.cited;
  });
  g.corrupted_edges = g.true_edges;
  return g;
}

void apply_corruption(GroundTruthGraph& g, std::span<const CorruptionRule> rules, std::uint64_t seed) {
  SplitMix64 rng(seed ^ 0xA0761D6478BD642FULL);
  g.corrupted_edges = g.true_edges;
  g.corruption_log.clear();

  // Volumes of each journal, for cross-volume rerouting.
  std::map<std::size_t, std::vector<std::size_t>> journal_volumes;
  for (std::size_t v = 0; v < g.volumes.size(); ++v) journal_volumes[g.volumes[v].journal].push_back(v);

  for (std::size_t i = 0; i < g.true_edges.size(); ++i) {
    const std::uint32_t cited = g.true_edges[i].cited;
    const std::size_t vol = g.article_volume[cited];
    const int year = g.volumes[vol].year;
    for (const auto& rule : rules) {
      if (!rule.active_for(year) || !rng.bernoulli(rule.probability)) continue;
      CorruptionLogEntry entry{i, rule.kind, cited, cited, CorruptionOutcome::rerouted};
      if (rule.kind == CorruptionKind::reroute_to_article1) {
        entry.new_target = static_cast<std::uint32_t>(g.anchor_of(vol));
      } else {
        std::size_t target_vol = vol;
        const auto& siblings = journal_volumes[g.volumes[vol].journal];
        if (siblings.size() > 1 && rng.bernoulli(rule.cross_volume_probability)) {
          std::size_t k = rng.below(siblings.size() - 1);
          std::size_t pos = static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), vol) - siblings.begin());
          target_vol = siblings[k >= pos ? k + 1 : k];
        }
        const auto length = static_cast<std::size_t>(g.articles[cited].page_count.value_or(0));
        const VolumeInfo& tv = g.volumes[target_vol];
        if (length >= 1 && length <= tv.article_count) {
          entry.new_target = static_cast<std::uint32_t>(tv.first_article + length - 1);
        } else {
          entry.outcome = CorruptionOutcome::unreroutable;
        }
      }
      if (entry.outcome == CorruptionOutcome::rerouted && entry.new_target == cited) break;  // no-op
      if (entry.outcome == CorruptionOutcome::rerouted) g.corrupted_edges[i].cited = entry.new_target;
      g.corruption_log.push_back(entry);
      break;
    }
  }
}

GroundTruthGraph build_corpus(const SynthSpec& spec) {
  GroundTruthGraph g = generate_corpus(spec);
  apply_corruption(g, spec.corruption, spec.seed);
  return g;
}

std::vector<Edge> replay_log(std::span<const Edge> true_edges, std::span<const CorruptionLogEntry> log) {
  std::vector<Edge> out(true_edges.begin(), true_edges.end());
  for (const auto& e : log)
    if (e.outcome == CorruptionOutcome::rerouted) out.at(e.edge_index).cited = e.new_target;
  return out;
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

std::vector<std::int64_t> in_degrees(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::int64_t> deg(n, 0);
  for (const auto& e : edges) ++deg.at(e.cited);
  return deg;
}

Distortion measure_distortion(const GroundTruthGraph& g) {
  Distortion d;
  d.true_counts = in_degrees(g.articles.size(), g.true_edges);
  d.observed_counts = in_degrees(g.articles.size(), g.corrupted_edges);

  // (journal, year) -> articles published that year
  std::map<std::pair<std::size_t, int>, std::int64_t> published;
  for (const auto& v : g.volumes) published[{v.journal, v.year}] += static_cast<std::int64_t>(v.article_count);

  // (journal, citing year) -> citations to the two previous years
  std::map<std::pair<std::size_t, int>, std::int64_t> cites_true, cites_obs;
  auto tally = [&](const std::vector<Edge>& edges, auto& into) {
    for (const auto& e : edges) {
      const VolumeInfo& v = g.volume_of(e.cited);
      int cy = static_cast<int>(chr::year_month_day{g.citing_works[e.citing].date}.year());
      if (cy - v.year == 1 || cy - v.year == 2) ++into[{v.journal, cy}];
    }
  };
  tally(g.true_edges, cites_true);
  tally(g.corrupted_edges, cites_obs);

  std::set<std::pair<std::size_t, int>> keys;
  for (const auto& [k, n] : published) {
    keys.insert({k.first, k.second + 1});
    keys.insert({k.first, k.second + 2});
  }
  for (const auto& [journal, year] : keys) {
    std::int64_t denom = 0;
    for (int back : {1, 2}) {
      auto it = published.find({journal, year - back});
      if (it != published.end()) denom += it->second;
    }
    if (denom == 0) continue;
    auto get = [&](const auto& m) {
      auto it = m.find({journal, year});
      return it == m.end() ? 0.0 : static_cast<double>(it->second);
    };
    d.two_year_metric.push_back(JournalYearMetric{journal, year, get(cites_true) / static_cast<double>(denom),
                                                  get(cites_obs) / static_cast<double>(denom)});
  }
  return d;
}

std::vector<Cohort> synthetic_cohorts(const GroundTruthGraph& g, const SynthSpec& spec, bool observed,
                                      std::size_t min_size) {
  const auto counts = in_degrees(g.articles.size(), observed ? g.corrupted_edges : g.true_edges);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.articles.size(); ++i) index.emplace(g.articles[i].doi, i);
  const CountLookup lookup = [&](const std::string& doi) -> std::optional<CitationCount> {
    auto it = index.find(doi);
    if (it == index.end()) return std::nullopt;
    return CitationCount{doi, CitationSource::synthetic, counts[it->second], {}};
  };

  std::vector<Cohort> out;
  for (const auto& v : g.volumes) {
    if (v.article_count < 2) continue;
    std::span<const ArticleRecord> arts(g.articles.data() + v.first_article, v.article_count);
    const ArticleRecord anchor = find_anchor(arts, v.label);
    CohortSelection sel = build_cohort(anchor, arts, min_size);
    out.push_back(attach_counts(sel, spec.journals.at(v.journal).name, v.label, v.year, CitationSource::synthetic, lookup));
  }
  return out;
}

RankScan synthetic_rank_scan(const GroundTruthGraph& g, std::size_t journal, bool observed) {
  const auto counts = in_degrees(g.articles.size(), observed ? g.corrupted_edges : g.true_edges);
  std::vector<RankedArticle> rows;
  std::vector<std::string> anchors;
  for (std::size_t vi = 0; vi < g.volumes.size(); ++vi) {
    const auto& v = g.volumes[vi];
    if (v.journal != journal) continue;
    for (std::size_t a = v.first_article; a < v.first_article + v.article_count; ++a)
      rows.push_back(RankedArticle{g.articles[a].doi, counts[a]});
    if (v.article_count > 0) anchors.push_back(g.articles[g.anchor_of(vi)].doi);
  }
  return rank_scan(std::move(rows), anchors);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string date_slash(const ArticleRecord& r) {
  std::string iso = r.publication_date ? r.publication_date->iso() : "";
  text::replace_all(iso, "-", "/");
  return iso;
}

std::string xml_escape(std::string_view s) {
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

std::string length_text(const ArticleRecord& r) { return std::to_string(r.page_count.value_or(1)); }

}  // namespace

std::string render_ris(const ArticleRecord& r, RenderStyle style) {
  std::ostringstream o;
  o << "TY  - JOUR\n";
  o << "TI  - " << r.title << "\n";
  for (const auto& a : r.authors) o << "AU  - " << a << "\n";
  o << "JO  - " << r.journal_title << "\n";
  if (r.issn) o << "SN  - " << *r.issn << "\n";
  if (r.volume) o << "VL  - " << *r.volume << "\n";
  if (style == RenderStyle::publisher) {
    o << "IS  - 1\n";
    o << "SP  - " << r.article_number.value_or("") << "\n";
  } else {
    if (r.issue) o << "IS  - " << *r.issue << "\n";
    o << "SP  - 1\n";
    o << "EP  - " << length_text(r) << "\n";
    if (r.article_number) o << "C7  - " << *r.article_number << "\n";
  }
  if (r.publication_date) {
    o << "PY  - " << r.publication_date->year << "\n";
    o << "DA  - " << date_slash(r) << "\n";
  }
  o << "DO  - " << r.doi << "\n";
  o << "ER  - \n";
  return o.str();
}

std::string render_publisher_json(const ArticleRecord& r, RenderStyle style) {
  json creators = json::array();
  for (const auto& a : r.authors) creators.push_back({{"creator", a}});
  json rec = {{"doi", r.doi},
              {"title", r.title},
              {"publicationName", r.journal_title},
              {"creators", creators},
              {"startingPage", "1"},
              {"endingPage", length_text(r)}};
  if (r.issn) rec["eIssn"] = *r.issn;
  if (r.volume) rec["volume"] = *r.volume;
  rec["number"] = r.issue.value_or("1");
  if (r.publication_date) rec["publicationDate"] = r.publication_date->iso();
  if (style == RenderStyle::faithful && r.article_number) rec["articleNumber"] = *r.article_number;
  return json{{"records", json::array({rec})}}.dump();
}

std::string render_jats(const ArticleRecord& r) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<article article-type=\"research-article\">\n<front>\n";
  o << "<journal-meta><journal-title-group><journal-title>" << xml_escape(r.journal_title)
    << "</journal-title></journal-title-group>";
  if (r.issn) o << "<issn pub-type=\"epub\">" << xml_escape(*r.issn) << "</issn>";
  o << "</journal-meta>\n<article-meta>\n";
  o << "<article-id pub-id-type=\"doi\">" << xml_escape(r.doi) << "</article-id>\n";
  o << "<title-group><article-title>" << xml_escape(r.title) << "</article-title></title-group>\n";
  o << "<contrib-group>";
  for (const auto& a : r.authors) {
    auto comma = a.find(',');
    std::string surname = a.substr(0, comma), given = comma == std::string::npos ? "" : std::string(text::trim(a.substr(comma + 1)));
    o << "<contrib contrib-type=\"author\"><name><surname>" << xml_escape(surname) << "</surname><given-names>"
      << xml_escape(given) << "</given-names></name></contrib>";
  }
  o << "</contrib-group>\n";
  if (r.publication_date) {
    const auto& d = *r.publication_date;
    o << "<pub-date pub-type=\"epub\">";
    if (d.day) o << "<day>" << *d.day << "</day>";
    if (d.month) o << "<month>" << *d.month << "</month>";
    o << "<year>" << d.year << "</year></pub-date>\n";
  }
  if (r.volume) o << "<volume>" << xml_escape(*r.volume) << "</volume>\n";
  o << "<issue>" << xml_escape(r.issue.value_or("1")) << "</issue>\n";
  o << "<fpage>1</fpage><lpage>" << length_text(r) << "</lpage>\n";
  if (r.article_number) o << "<elocation-id>" << xml_escape(*r.article_number) << "</elocation-id>\n";
  o << "</article-meta>\n</front>\n</article>\n";
  return o.str();
}

std::string render_crossref_work(const ArticleRecord& r, std::optional<std::int64_t> cited_by) {
  json msg = {{"DOI", r.doi}, {"type", "journal-article"}, {"title", {r.title}}, {"container-title", {r.journal_title}},
              {"page", "1-" + length_text(r)}};
  if (r.issn) msg["ISSN"] = {*r.issn}, msg["issn-type"] = {{{"value", *r.issn}, {"type", "electronic"}}};
  if (r.volume) msg["volume"] = *r.volume;
  msg["issue"] = r.issue.value_or("1");
  if (r.article_number) msg["article-number"] = *r.article_number;
  if (r.publication_date) {
    json parts = json::array({r.publication_date->year});
    if (r.publication_date->month) parts.push_back(*r.publication_date->month);
    if (r.publication_date->day) parts.push_back(*r.publication_date->day);
    msg["published-online"] = {{"date-parts", json::array({parts})}};
  }
  json authors = json::array();
  for (const auto& a : r.authors) {
    auto comma = a.find(',');
    json au = {{"family", a.substr(0, comma)}};
    if (comma != std::string::npos) au["given"] = std::string(text::trim(a.substr(comma + 1)));
    authors.push_back(au);
  }
  msg["author"] = authors;
  if (cited_by) msg["is-referenced-by-count"] = *cited_by;
  return json{{"status", "ok"}, {"message-type", "work"}, {"message", msg}}.dump();
}

FormatBundle render_bundle(const ArticleRecord& r, RenderStyle style) {
  FormatBundle b;
  std::string ris = render_ris(r, style);
  b.add(parse_ris(ris), ris);
  std::string pj = render_publisher_json(r, style);
  b.add(parse_publisher_json(pj).record, pj);
  std::string jats = render_jats(r);
  b.add(parse_jats(jats), jats);
  std::string cr = render_crossref_work(r);
  b.add(parse_crossref_work(std::string_view(cr)).record, cr);
  return b;
}

std::string inject_i1(const std::string& ris, const ArticleRecord& truth) {
  std::istringstream in(ris);
  std::ostringstream out;
  std::string line;
  bool wrote_is = false;
  while (std::getline(in, line)) {
    std::string_view tag = std::string_view(line).substr(0, 2);
    if (tag == "EP" || tag == "C7") continue;
    if (tag == "IS") {
      out << "IS  - 1\n";
      wrote_is = true;
      continue;
    }
    if (tag == "SP") {
      if (!wrote_is) out << "IS  - 1\n", wrote_is = true;
      out << "SP  - " << truth.article_number.value_or("") << "\n";
      continue;
    }
    out << line << "\n";
  }
  return out.str();
}

std::string inject_i2(const std::string& json_text) {
  json j = json::parse(json_text);
  auto strip = [](json& rec) {
    for (const char* k : {"articleNumber", "article-number", "articleNo", "elocation-id"}) rec.erase(k);
  };
  if (j.contains("records")) {
    for (auto& rec : j["records"]) strip(rec);
  } else {
    strip(j);
  }
  return j.dump();
}

std::string render_reference_for(const GroundTruthGraph& g, std::size_t edge_index) {
  const Edge& e = g.true_edges.at(edge_index);
  const ArticleRecord& cited = g.articles.at(e.cited);
  const VolumeInfo& v = g.volume_of(e.cited);
  // O.1 always lands on Article 1 and O.2 on Article L with L >= 3, so a
  // changed target tells the two apart. Only O.2 changes the printed locator.
  const std::uint32_t observed = g.corrupted_edges.at(edge_index).cited;
  const bool o2 = observed != e.cited && g.articles[observed].article_number != std::optional<std::string>("1");
  ParsedReference ref;
  ref.journal_hint = cited.journal_title;
  ref.volume = v.label;
  ref.year = v.year;
  if (o2) {
    ref.issue = "1";
    ref.locator = std::to_string(cited.page_count.value_or(0));
    ref.locator_kind = LocatorKind::issue_colon_locator;
  } else {
    ref.locator = cited.article_number;
    ref.locator_kind = LocatorKind::article_number;
  }
  return render_reference(ref);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double PrecisionRecall::precision() const {
  auto d = true_positives + false_positives;
  return d == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(d);
}

double PrecisionRecall::recall() const {
  auto d = true_positives + false_negatives;
  return d == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(d);
}

DetectorEvaluation evaluate_detectors(const GroundTruthGraph& g, std::span<const Cohort> cohorts,
                                      std::span<const double> thresholds) {
  DetectorEvaluation ev;

  std::vector<char> o2_truth(g.true_edges.size(), 0);
  std::set<std::size_t> o1_volumes;
  for (const auto& e : g.corruption_log) {
    if (e.outcome != CorruptionOutcome::rerouted) continue;
    if (e.rule == CorruptionKind::reroute_to_pdf_length) o2_truth[e.edge_index] = 1;
    else o1_volumes.insert(g.article_volume[e.original_target]);
  }

  for (std::size_t i = 0; i < g.true_edges.size(); ++i) {
    const std::uint32_t cited = g.true_edges[i].cited;
    std::vector<ArticleRecord> candidates = {g.articles[cited]};
    const VolumeInfo& v = g.volume_of(cited);
    auto len = static_cast<std::size_t>(g.articles[cited].page_count.value_or(0));
    if (len >= 1 && len <= v.article_count) candidates.push_back(g.articles[v.first_article + len - 1]);
    bool flagged = !detect_o2(parse_reference_string(render_reference_for(g, i)), candidates).empty();
    bool truth = o2_truth[i] != 0;
    if (flagged && truth) ++ev.o2_edges.true_positives;
    else if (flagged) ++ev.o2_edges.false_positives;
    else if (truth) ++ev.o2_edges.false_negatives;
  }

  std::unordered_map<std::string, std::size_t> volume_of_anchor;
  for (std::size_t vi = 0; vi < g.volumes.size(); ++vi)
    if (g.volumes[vi].article_count > 0) volume_of_anchor[g.articles[g.anchor_of(vi)].doi] = vi;

  std::vector<std::pair<double, bool>> scored;  // (anchor z, truly corrupted)
  for (const auto& c : cohorts) {
    auto it = volume_of_anchor.find(c.anchor.record.doi);
    if (it == volume_of_anchor.end() || c.comparisons.empty()) continue;
    double z = normalize_cohort(c).anchor_z.front();
    scored.emplace_back(z, o1_volumes.count(it->second) > 0);
  }
  auto score_at = [&](double t) {
    PrecisionRecall pr;
    for (const auto& [z, truth] : scored) {
      bool flagged = z > t;
      if (flagged && truth) ++pr.true_positives;
      else if (flagged) ++pr.false_positives;
      else if (truth) ++pr.false_negatives;
    }
    return pr;
  };
  ev.o1_anchors = score_at(kAnchorZThreshold);
  std::vector<double> sweep(thresholds.begin(), thresholds.end());
  if (sweep.empty())
    for (int k = -2; k <= 20; ++k) sweep.push_back(0.5 * k);
  std::sort(sweep.begin(), sweep.end());
  for (double t : sweep) ev.o1_sweep.push_back(ThresholdPoint{t, score_at(t)});
  return ev;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

const char* const kCorpusFiles[] = {"articles.csv",        "citing_works.csv",   "true_edges.csv",
                                    "corrupted_edges.csv", "corruption_log.csv", "spec.json"};

std::ofstream open_out(const fs::path& p) {
  std::ofstream o(p, std::ios::binary | std::ios::trunc);
  if (!o) throw error(errc::io_error, "cannot write " + p.string());
  return o;
}

std::string csv_cell(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_corpus(const fs::path& dir, const GroundTruthGraph& g, const SynthSpec& spec) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw error(errc::io_error, "cannot create " + dir.string() + ": " + ec.message());

  {
    auto o = open_out(dir / "articles.csv");
    o << "index,doi,journal,volume,year,issue,article_number,page_count,publication_date,title\n";
    for (std::size_t i = 0; i < g.articles.size(); ++i) {
      const auto& a = g.articles[i];
      o << i << ',' << a.doi << ',' << csv_cell(a.journal_title) << ',' << a.volume.value_or("") << ','
        << g.volume_of(i).year << ',' << a.issue.value_or("") << ',' << a.article_number.value_or("") << ','
        << a.page_count.value_or(0) << ',' << (a.publication_date ? a.publication_date->iso() : "") << ','
        << csv_cell(a.title) << '\n';
    }
  }
  {
    auto o = open_out(dir / "citing_works.csv");
    o << "index,doi,date\n";
    for (std::size_t i = 0; i < g.citing_works.size(); ++i)
      o << i << ',' << g.citing_works[i].doi << ',' << PartialDate::from_sys_days(g.citing_works[i].date).iso() << '\n';
  }
  auto edges = [&](const char* name, const std::vector<Edge>& list) {
    auto o = open_out(dir / name);
    o << "citing_doi,cited_doi\n";
    for (const auto& e : list) o << g.citing_works[e.citing].doi << ',' << g.articles[e.cited].doi << '\n';
  };
  edges("true_edges.csv", g.true_edges);
  edges("corrupted_edges.csv", g.corrupted_edges);
  {
    auto o = open_out(dir / "corruption_log.csv");
    o << "edge_index,rule,original_target,new_target,outcome\n";
    for (const auto& e : g.corruption_log)
      o << e.edge_index << ',' << to_string(e.rule) << ',' << g.articles[e.original_target].doi << ','
        << g.articles[e.new_target].doi << ',' << (e.outcome == CorruptionOutcome::rerouted ? "Rerouted" : "Unreroutable")
        << '\n';
  }
  {
    auto o = open_out(dir / "spec.json");
    o << to_json(spec).dump(2) << '\n';
  }
}

std::uint64_t corpus_digest(const fs::path& dir) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const char* name : kCorpusFiles) {
    for (const char* p = name; *p; ++p) mix(static_cast<unsigned char>(*p));
    mix(0);
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) throw error(errc::io_error, "missing corpus file " + (dir / name).string());
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
      for (std::streamsize i = 0; i < in.gcount(); ++i) mix(static_cast<unsigned char>(buf[i]));
    }
  }
  return h;
}

}  // namespace citeaudit
