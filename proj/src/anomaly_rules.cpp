#include "citeaudit/anomaly_rules.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "citeaudit/error.hpp"
#include "citeaudit/text.hpp"
#include "citeaudit/xml.hpp"

namespace citeaudit {

using nlohmann::json;

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::I1: return "I1";
    case Rule::I2: return "I2";
    case Rule::O2: return "O2";
    case Rule::O3: return "O3";
  }
  return "I1";
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::info: return "Info";
    case Severity::suspect: return "Suspect";
    case Severity::confirmed: return "Confirmed";
  }
  return "Info";
}

std::string_view to_string(PayloadFormat f) {
  switch (f) {
    case PayloadFormat::json: return "JSON";
    case PayloadFormat::jsonp: return "JSONP";
    case PayloadFormat::pam: return "PAM";
    case PayloadFormat::jats: return "JATS";
    case PayloadFormat::ris: return "RIS";
    case PayloadFormat::crossref: return "Crossref";
  }
  return "JSON";
}

json to_json(const AnomalyFinding& f) {
  json ev = json::array();
  for (const auto& e : f.evidence) ev.push_back({{"label", e.label}, {"text", e.text}});
  return json{{"rule", std::string(to_string(f.rule))},
              {"doi", f.doi},
              {"severity", std::string(to_string(f.severity))},
              {"related_doi", f.related_doi ? json(*f.related_doi) : json(nullptr)},
              {"evidence", ev}};
}

std::string to_jsonl(std::span<const AnomalyFinding> findings) {
  std::string out;
  for (const auto& f : findings) {
    out += to_json(f).dump();
    out += '\n';
  }
  return out;
}

void sort_findings(std::vector<AnomalyFinding>& findings) {
  std::stable_sort(findings.begin(), findings.end(), [](const AnomalyFinding& a, const AnomalyFinding& b) {
    return std::tie(a.rule, a.doi, a.related_doi) < std::tie(b.rule, b.doi, b.related_doi);
  });
}

namespace {

std::string show(const std::optional<std::string>& v) { return v ? *v : std::string("(absent)"); }

}  // namespace

// ---------------------------------------------------------------------------
// I.1
// ---------------------------------------------------------------------------

std::vector<AnomalyFinding> detect_i1(const ArticleRecord& ris, const ArticleRecord& api) {
  if (normalize_doi(ris.doi) != normalize_doi(api.doi))
    throw error(errc::mismatched_input, "RIS DOI " + ris.doi + " vs API DOI " + api.doi);

  const bool ris_side = !ris.end_page && ris.start_page && *ris.start_page != "1";
  const bool api_side = api.start_page == std::optional<std::string>("1") && api.end_page.has_value();
  const bool pages_disagree = ris.start_page != api.start_page || ris.end_page != api.end_page;

  Severity severity;
  if (ris_side && api_side) severity = Severity::confirmed;
  else if (ris_side) severity = Severity::suspect;
  // A start page of 1 is normal for paged articles; only suspicious when
  // the RIS export tells a different story.
  else if (api_side && pages_disagree) severity = Severity::suspect;
  else return {};

  AnomalyFinding f;
  f.rule = Rule::I1;
  f.doi = normalize_doi(ris.doi);
  f.severity = severity;
  f.evidence = {
      {"RIS SP", show(ris.start_page)},
      {"RIS EP", show(ris.end_page)},
      {"API startingPage", show(api.start_page)},
      {"API endingPage", show(api.end_page)},
      {"signature", std::string(ris_side ? "RIS" : "") + (ris_side && api_side ? "+" : "") + (api_side ? "API" : "")},
  };
  return {f};
}

// ---------------------------------------------------------------------------
// I.2
// ---------------------------------------------------------------------------

namespace {

std::string key_class(std::string_view key) {
  std::string k;
  for (const auto& t : text::alnum_tokens(key)) k += t;
  return k;
}

bool is_article_number_key(std::string_view key) {
  static const std::set<std::string> keys = {"articlenumber", "articleno", "elocationid", "elocation"};
  return keys.count(key_class(key)) > 0;
}

struct ScanState {
  std::string_view token;
  TokenScan scan;
  std::set<std::string> other_fields;

  void leaf(std::string_view key, std::string_view value) {
    int n = static_cast<int>(text::standalone_occurrences(value, token).size());
    if (n == 0) return;
    if (is_article_number_key(key)) {
      scan.article_field_hits += n;
    } else if (key.empty() || text::trim(value) == token) {
      // The whole value of an unrecognized field: may well be the number.
      static const std::set<std::string> known = {
          "startingpage", "endingpage", "number", "volume", "issue", "publicationdate", "onlinedate",
          "coverdate", "printdate", "doi", "identifier", "url", "value", "issn", "eissn", "isbn",
          "printisbn", "electronicisbn", "title", "publicationname", "abstract", "creator", "creators",
          "journalid", "genre", "contenttype", "publisher", "language", "copyright", "openaccess",
          "pagecount", "year", "month", "day", "seq", "fpage", "lpage",
      };
      if (!key.empty() && known.count(key_class(key))) {
        scan.other_field_hits += n;
        other_fields.insert(std::string(key));
      } else {
        scan.unattributed_hits += n;
      }
    } else {
      // Part of a compound value (date, DOI, URL, sentence).
      scan.other_field_hits += n;
      other_fields.insert(std::string(key));
    }
  }

  void walk_json(const json& j, std::string_view key) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it) walk_json(it.value(), it.key());
    } else if (j.is_array()) {
      for (const auto& e : j) walk_json(e, key);
    } else if (j.is_string()) {
      leaf(key, j.get<std::string>());
    } else if (j.is_number() || j.is_boolean()) {
      leaf(key, j.dump());
    }
  }

  void walk_xml(const xml::Node& n) {
    if (n.kind != xml::Node::Kind::element) return;
    for (const auto& [k, v] : n.attributes) {
      std::string_view local = k;
      if (auto c = local.find(':'); c != std::string_view::npos) local = local.substr(c + 1);
      leaf(local, v);
    }
    for (const auto& c : n.children) {
      if (c.kind == xml::Node::Kind::text) leaf(n.local_name(), c.text);
      else walk_xml(c);
    }
  }
};

}  // namespace

TokenScan scan_payload_for_token(const RawPayload& payload, std::string_view token) {
  ScanState state{token, {}, {}};
  bool structured = false;
  if (payload.format == PayloadFormat::json || payload.format == PayloadFormat::jsonp ||
      payload.format == PayloadFormat::crossref) {
    std::string_view body = text::trim(payload.text);
    if (!body.empty() && body.front() != '{' && body.front() != '[') {
      auto open = body.find('(');
      auto close = body.rfind(')');
      if (open != std::string_view::npos && close != std::string_view::npos && close > open)
        body = body.substr(open + 1, close - open - 1);
    }
    json j = json::parse(body, nullptr, false);
    if (!j.is_discarded()) {
      state.walk_json(j, "");
      structured = true;
    }
  } else if (payload.format == PayloadFormat::pam || payload.format == PayloadFormat::jats) {
    try {
      state.walk_xml(xml::parse(payload.text));
      structured = true;
    } catch (const error&) {
    }
  }
  if (!structured)
    state.scan.unattributed_hits = static_cast<int>(text::standalone_occurrences(payload.text, token).size());
  return state.scan;
}

std::vector<AnomalyFinding> detect_i2(std::string_view doi, std::span<const RawPayload> payloads,
                                      std::string_view true_article_number) {
  std::vector<AnomalyFinding> out;
  std::string number(text::trim(true_article_number));
  if (number.empty()) return out;
  for (const auto& p : payloads) {
    if (p.format != PayloadFormat::json && p.format != PayloadFormat::jsonp && p.format != PayloadFormat::pam)
      continue;
    TokenScan scan = scan_payload_for_token(p, number);
    if (scan.article_field_hits > 0 || scan.unattributed_hits > 0) continue;

    AnomalyFinding f;
    f.rule = Rule::I2;
    f.doi = normalize_doi(doi);
    f.evidence.push_back({"payload format", std::string(to_string(p.format))});
    f.evidence.push_back({"true article number", number});
    if (scan.other_field_hits > 0) {
      f.severity = Severity::suspect;
      f.evidence.push_back({"token collisions", std::to_string(scan.other_field_hits) +
                                                    " occurrence(s) only inside other fields"});
    } else {
      f.severity = Severity::confirmed;
      f.evidence.push_back({"standalone occurrences", "0"});
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// O.2
// ---------------------------------------------------------------------------

std::vector<AnomalyFinding> detect_o2(const ParsedReference& ref, std::span<const ArticleRecord> cited_candidates) {
  std::vector<AnomalyFinding> out;
  if (ref.locator_kind != LocatorKind::issue_colon_locator || !ref.locator || !is_numeric(*ref.locator))
    return out;
  const std::string& locator = *ref.locator;
  const long long length = std::stoll(locator);

  // Article numbered L, preferring the referenced volume.
  const ArticleRecord* related = nullptr;
  for (const auto& c : cited_candidates) {
    if (!c.article_number || *c.article_number != locator) continue;
    if (ref.volume && c.volume == ref.volume) {
      related = &c;
      break;
    }
    if (!related) related = &c;
  }

  for (const auto& c : cited_candidates) {
    if (!c.page_count || *c.page_count != length) continue;
    if (c.article_number == ref.locator) continue;
    if (ref.volume && c.volume && *c.volume != *ref.volume) continue;

    AnomalyFinding f;
    f.rule = Rule::O2;
    f.doi = normalize_doi(c.doi);
    f.severity = Severity::confirmed;
    f.evidence = {
        {"reference", ref.raw},
        {"pdf length L", locator},
        {"article number X", show(c.article_number)},
        {"volume V", show(ref.volume)},
    };
    if (related) {
      f.related_doi = normalize_doi(related->doi);
      if (related->volume != ref.volume)
        f.evidence.push_back({"volume W", show(related->volume) + " (differs from V)"});
    } else {
      f.evidence.push_back({"related", "unresolvable: no article numbered " + locator + " among candidates"});
    }
    out.push_back(std::move(f));
  }
  sort_findings(out);
  return out;
}

// ---------------------------------------------------------------------------
// O.3
// ---------------------------------------------------------------------------

double title_similarity(std::string_view a, std::string_view b) {
  auto ta = text::alnum_tokens(a);
  auto tb = text::alnum_tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

bool journal_names_match(std::string_view a, std::string_view b) {
  auto ta = text::alnum_tokens(a);
  auto tb = text::alnum_tokens(b);
  if (ta == tb) return true;
  if (ta.empty() || tb.empty()) return false;
  auto drop_stopwords = [](std::vector<std::string>& v) {
    std::erase_if(v, [](const std::string& t) { return t == "of" || t == "the" || t == "and" || t == "amp"; });
  };
  drop_stopwords(ta);
  drop_stopwords(tb);
  if (ta.size() != tb.size()) return false;
  auto prefix_match = [](const std::vector<std::string>& shorter, const std::vector<std::string>& longer) {
    for (std::size_t i = 0; i < shorter.size(); ++i)
      if (longer[i].rfind(shorter[i], 0) != 0) return false;
    return true;
  };
  return prefix_match(ta, tb) || prefix_match(tb, ta);
}

std::vector<AnomalyFinding> detect_o3(std::string_view ref_title, std::string_view ref_journal,
                                      std::span<const ArticleRecord> link_targets, std::string_view citing_doi) {
  std::vector<AnomalyFinding> out;
  if (link_targets.empty()) return out;

  std::size_t mismatched = 0, title_mismatched = 0;
  std::vector<Evidence> evidence;
  evidence.push_back({"reference title", std::string(ref_title)});
  evidence.push_back({"reference journal", std::string(ref_journal)});
  for (const auto& t : link_targets) {
    double sim = title_similarity(ref_title, t.title);
    bool title_bad = sim < kTitleSimilarityThreshold;
    bool journal_bad = !ref_journal.empty() && !journal_names_match(ref_journal, t.journal_title);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", sim);
    std::string verdict = title_bad ? "title mismatch" : (journal_bad ? "journal mismatch" : "consistent");
    evidence.push_back({"link target " + t.doi,
                        "\"" + t.title + "\" in " + t.journal_title + " (similarity " + buf + ", " + verdict + ")"});
    if (title_bad || journal_bad) ++mismatched;
    if (title_bad) ++title_mismatched;
  }
  if (mismatched == 0) return out;

  AnomalyFinding f;
  f.rule = Rule::O3;
  f.doi = citing_doi.empty() ? std::string("unknown") : normalize_doi(citing_doi);
  // Same title under another journal may be a legitimate duplicate; only a
  // full mismatch that includes a wrong title is treated as certain.
  f.severity = (mismatched == link_targets.size() && title_mismatched > 0) ? Severity::confirmed : Severity::suspect;
  f.evidence = std::move(evidence);
  out.push_back(std::move(f));
  return out;
}

// ---------------------------------------------------------------------------
// Cross-format consistency
// ---------------------------------------------------------------------------

json to_json(const ConsistencyReport& r) {
  json fields = json::array();
  for (const auto& fc : r.fields_compared) {
    json vals = json::object();
    for (const auto& [fmt, v] : fc.values) vals[std::string(to_string(fmt))] = v ? json(*v) : json(nullptr);
    fields.push_back({{"field", fc.field}, {"values", vals}});
  }
  json findings = json::array();
  for (const auto& f : r.findings) findings.push_back(to_json(f));
  return json{{"doi", r.doi}, {"fields_compared", fields}, {"conflicts", r.conflicts}, {"findings", findings}};
}

ConsistencyReport cross_format_consistency(const FormatBundle& bundle) {
  if (bundle.per_format.size() < 2)
    throw error(errc::insufficient_formats, "need at least two formats, got " + std::to_string(bundle.per_format.size()));

  ConsistencyReport report;
  report.doi = normalize_doi(bundle.doi);

  using Getter = const std::optional<std::string>& (*)(const ArticleRecord&);
  const std::pair<const char*, Getter> fields[] = {
      {"volume", [](const ArticleRecord& r) -> const std::optional<std::string>& { return r.volume; }},
      {"issue", [](const ArticleRecord& r) -> const std::optional<std::string>& { return r.issue; }},
      {"start_page", [](const ArticleRecord& r) -> const std::optional<std::string>& { return r.start_page; }},
      {"end_page", [](const ArticleRecord& r) -> const std::optional<std::string>& { return r.end_page; }},
      {"article_number", [](const ArticleRecord& r) -> const std::optional<std::string>& { return r.article_number; }},
  };
  for (const auto& [name, get] : fields) {
    FieldComparison fc;
    fc.field = name;
    std::set<std::optional<std::string>> distinct;
    for (const auto& [fmt, entry] : bundle.per_format) {
      if (fc.field == "article_number" && fmt == SourceFormat::publisher_json) continue;
      const auto& v = get(entry.record);
      fc.values.emplace_back(fmt, v);
      distinct.insert(v);
    }
    if (distinct.size() >= 2) report.conflicts.push_back(fc.field);
    report.fields_compared.push_back(std::move(fc));
  }

  auto ris = bundle.per_format.find(SourceFormat::ris);
  auto api = bundle.per_format.find(SourceFormat::publisher_json);
  if (ris != bundle.per_format.end() && api != bundle.per_format.end()) {
    auto found = detect_i1(ris->second.record, api->second.record);
    report.findings.insert(report.findings.end(), found.begin(), found.end());
  }

  std::optional<std::string> true_number;
  for (auto fmt : {SourceFormat::jats, SourceFormat::crossref_work}) {
    auto it = bundle.per_format.find(fmt);
    if (it != bundle.per_format.end() && it->second.record.article_number) {
      true_number = it->second.record.article_number;
      break;
    }
  }
  if (true_number && api != bundle.per_format.end()) {
    std::string_view raw = text::trim(api->second.raw);
    PayloadFormat pf = (!raw.empty() && raw.front() != '{') ? PayloadFormat::jsonp : PayloadFormat::json;
    RawPayload payloads[] = {{pf, api->second.raw}};
    auto found = detect_i2(report.doi, payloads, *true_number);
    report.findings.insert(report.findings.end(), found.begin(), found.end());
  }
  sort_findings(report.findings);
  return report;
}

}  // namespace citeaudit
