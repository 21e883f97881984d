#include "citeaudit/bib_formats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>

#include "citeaudit/error.hpp"
#include "citeaudit/text.hpp"
#include "citeaudit/xml.hpp"

namespace citeaudit {

using nlohmann::json;
namespace chr = std::chrono;

// ---------------------------------------------------------------------------
// PartialDate
// ---------------------------------------------------------------------------

chr::sys_days PartialDate::ordering_key() const {
  chr::year_month_day ymd{chr::year{year}, chr::month{month.value_or(7)},
                          chr::day{day.value_or(month ? 15u : 1u)}};
  return chr::sys_days{ymd};
}

std::string PartialDate::iso() const {
  char buf[16];
  if (month && day)
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, *month, *day);
  else if (month)
    std::snprintf(buf, sizeof buf, "%04d-%02u", year, *month);
  else
    std::snprintf(buf, sizeof buf, "%04d", year);
  return buf;
}

std::optional<PartialDate> PartialDate::parse(std::string_view text) {
  static const std::regex re(R"(^\s*(\d{4})(?:[-/](\d{1,2})?(?:[-/](\d{1,2})?)?)?.*$)");
  std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, re)) return std::nullopt;
  PartialDate d;
  d.year = std::stoi(m[1].str());
  if (m[2].matched) {
    unsigned mo = static_cast<unsigned>(std::stoul(m[2].str()));
    if (mo < 1 || mo > 12) return std::nullopt;
    d.month = mo;
    if (m[3].matched) {
      unsigned dy = static_cast<unsigned>(std::stoul(m[3].str()));
      chr::year_month_day ymd{chr::year{d.year}, chr::month{mo}, chr::day{dy}};
      if (!ymd.ok()) return std::nullopt;
      d.day = dy;
    }
  }
  return d;
}

PartialDate PartialDate::from_sys_days(chr::sys_days days) {
  chr::year_month_day ymd{days};
  return PartialDate{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day())};
}

// ---------------------------------------------------------------------------
// Record helpers
// ---------------------------------------------------------------------------

std::string_view to_string(SourceFormat f) {
  switch (f) {
    case SourceFormat::ris: return "RIS";
    case SourceFormat::publisher_json: return "PublisherJSON";
    case SourceFormat::jats: return "JATS";
    case SourceFormat::crossref_work: return "CrossrefWork";
    case SourceFormat::synthetic: return "Synthetic";
  }
  return "Synthetic";
}

std::optional<SourceFormat> source_format_from_string(std::string_view s) {
  for (auto f : {SourceFormat::ris, SourceFormat::publisher_json, SourceFormat::jats,
                 SourceFormat::crossref_work, SourceFormat::synthetic})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::string normalize_doi(std::string_view raw) {
  std::string s = text::to_lower(text::trim(raw));
  for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
                                  "http://dx.doi.org/", "doi.org/", "doi:"}) {
    if (s.rfind(prefix, 0) == 0) {
      s.erase(0, prefix.size());
      break;
    }
  }
  return std::string(text::trim(s));
}

bool is_plausible_doi(std::string_view doi) {
  return !doi.empty() && doi.find('/') != std::string_view::npos;
}

bool is_numeric(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

namespace {

std::optional<long long> to_number(const std::optional<std::string>& s) {
  if (!s || !is_numeric(*s) || s->size() > 15) return std::nullopt;
  return std::stoll(*s);
}

std::optional<int> span_page_count(const std::optional<std::string>& start,
                                   const std::optional<std::string>& end) {
  auto a = to_number(start);
  auto b = to_number(end);
  if (!a || !b || *b < *a) return std::nullopt;
  return static_cast<int>(*b - *a + 1);
}

std::optional<std::string> non_empty(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  return std::string(s);
}

}  // namespace

void validate(const ArticleRecord& r) {
  if (!is_plausible_doi(r.doi)) throw error(errc::invalid_record, "doi must be non-empty and contain '/': '" + r.doi + "'");
  if (r.end_page && !r.start_page) throw error(errc::invalid_record, "end page without start page for " + r.doi);
  if (r.page_count && *r.page_count < 1) throw error(errc::invalid_record, "page_count < 1 for " + r.doi);
  if (r.publication_date && (r.publication_date->year < 1900 || r.publication_date->year > 2100))
    throw error(errc::invalid_record, "publication year out of range for " + r.doi);
}

json to_json(const ArticleRecord& r) {
  auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["doi"] = r.doi;
  j["journal_title"] = r.journal_title;
  j["issn"] = opt(r.issn);
  j["volume"] = opt(r.volume);
  j["issue"] = opt(r.issue);
  j["article_number"] = opt(r.article_number);
  j["start_page"] = opt(r.start_page);
  j["end_page"] = opt(r.end_page);
  j["page_count"] = r.page_count ? json(*r.page_count) : json(nullptr);
  j["publication_date"] = r.publication_date ? json(r.publication_date->iso()) : json(nullptr);
  j["title"] = r.title;
  j["authors"] = r.authors;
  j["source_format"] = std::string(to_string(r.source_format));
  return j;
}

ArticleRecord article_from_json(const json& j) {
  auto opt = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
  };
  ArticleRecord r;
  try {
    r.doi = j.at("doi").get<std::string>();
    r.journal_title = j.value("journal_title", "");
    r.issn = opt("issn");
    r.volume = opt("volume");
    r.issue = opt("issue");
    r.article_number = opt("article_number");
    r.start_page = opt("start_page");
    r.end_page = opt("end_page");
    if (j.contains("page_count") && !j["page_count"].is_null()) r.page_count = j["page_count"].get<int>();
    if (auto d = opt("publication_date")) r.publication_date = PartialDate::parse(*d);
    r.title = j.value("title", "");
    if (j.contains("authors")) r.authors = j["authors"].get<std::vector<std::string>>();
    r.source_format = source_format_from_string(j.value("source_format", "Synthetic")).value_or(SourceFormat::synthetic);
  } catch (const json::exception& e) {
    throw error(errc::malformed_payload, std::string("article record: ") + e.what());
  }
  return r;
}

// ---------------------------------------------------------------------------
// RIS
// ---------------------------------------------------------------------------

ArticleRecord parse_ris(std::string_view input) {
  static const std::regex tag_re(R"(^([A-Z][A-Z0-9])  -(?: (.*))?$)");
  if (text::trim(input).empty()) throw error(errc::malformed_ris, "empty input");

  std::map<std::string, std::vector<std::string>> tags;
  bool terminated = false;
  for (auto& line : text::split(input, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    std::smatch m;
    if (!std::regex_match(line, m, tag_re)) continue;
    std::string tag = m[1].str();
    if (tag == "ER") {
      terminated = true;
      break;
    }
    std::string value(text::trim(m[2].str()));
    if (!value.empty()) tags[tag].push_back(std::move(value));
  }
  if (!terminated) throw error(errc::malformed_ris, "no ER terminator");

  auto first = [&](std::initializer_list<const char*> keys) -> std::optional<std::string> {
    for (const char* k : keys) {
      auto it = tags.find(k);
      if (it != tags.end() && !it->second.empty()) return it->second.front();
    }
    return std::nullopt;
  };

  auto doi = first({"DO"});
  if (!doi) throw error(errc::missing_doi, "RIS record has no DO tag");

  ArticleRecord r;
  r.source_format = SourceFormat::ris;
  r.doi = normalize_doi(*doi);
  r.title = first({"TI", "T1"}).value_or("");
  r.journal_title = first({"JF", "JO", "T2", "JA"}).value_or("");
  r.issn = first({"SN"});
  r.volume = first({"VL"});
  r.issue = first({"IS"});
  r.start_page = first({"SP"});
  r.end_page = first({"EP"});
  for (const char* k : {"AU", "A1"})
    if (auto it = tags.find(k); it != tags.end())
      for (auto& a : it->second) r.authors.push_back(a);

  std::optional<PartialDate> da, py;
  if (auto v = first({"DA"})) da = PartialDate::parse(*v);
  if (auto v = first({"PY", "Y1"})) py = PartialDate::parse(*v);
  if (da && (!py || da->has_day_precision() || !py->has_day_precision())) r.publication_date = da;
  else r.publication_date = py;

  // C7 is EndNote's article-number tag; otherwise promote SP for the
  // online-only signature (no EP, issue absent or 1, numeric SP).
  if (auto c7 = first({"C7"})) {
    r.article_number = c7;
  } else if (!r.end_page && r.start_page && is_numeric(*r.start_page) &&
             (!r.issue || *r.issue == "1")) {
    r.article_number = r.start_page;
  }
  r.page_count = span_page_count(r.start_page, r.end_page);
  validate(r);
  return r;
}

// ---------------------------------------------------------------------------
// Publisher JSON
// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> json_text(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = obj.find(k);
    if (it == obj.end() || it->is_null()) continue;
    if (it->is_string()) {
      if (auto v = non_empty(it->get<std::string>())) return v;
    } else if (it->is_number_integer()) {
      return std::to_string(it->get<long long>());
    } else if (it->is_array() && !it->empty()) {
      const auto& f = it->front();
      if (f.is_string()) {
        if (auto v = non_empty(f.get<std::string>())) return v;
      }
    }
  }
  return std::nullopt;
}

json parse_json_payload(std::string_view text) {
  std::string_view body = text::trim(text);
  // JSONP: callback({...});
  if (!body.empty() && body.front() != '{' && body.front() != '[') {
    auto open = body.find('(');
    auto close = body.rfind(')');
    if (open != std::string_view::npos && close != std::string_view::npos && close > open)
      body = body.substr(open + 1, close - open - 1);
  }
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw error(errc::malformed_payload, "unparseable JSON");
  return j;
}

}  // namespace

PublisherJsonResult parse_publisher_json(std::string_view text) {
  json j = parse_json_payload(text);
  if (j.is_object() && j.contains("records")) {
    const auto& recs = j["records"];
    if (!recs.is_array() || recs.empty()) throw error(errc::malformed_payload, "empty records array");
    j = recs.front();
  }
  if (!j.is_object()) throw error(errc::malformed_payload, "record is not an object");

  auto doi = json_text(j, {"doi", "DOI"});
  if (!doi) throw error(errc::missing_doi, "publisher record has no doi");

  PublisherJsonResult out;
  out.raw = std::string(text);
  ArticleRecord& r = out.record;
  r.source_format = SourceFormat::publisher_json;
  r.doi = normalize_doi(*doi);
  r.title = json_text(j, {"title"}).value_or("");
  r.journal_title = json_text(j, {"publicationName"}).value_or("");
  r.issn = json_text(j, {"eIssn", "eissn", "issn"});
  r.volume = json_text(j, {"volume"});
  r.issue = json_text(j, {"number"});
  r.start_page = json_text(j, {"startingPage"});
  r.end_page = json_text(j, {"endingPage"});
  if (auto d = json_text(j, {"publicationDate", "onlineDate", "coverDate"})) r.publication_date = PartialDate::parse(*d);
  if (auto it = j.find("creators"); it != j.end() && it->is_array()) {
    for (const auto& c : *it) {
      if (c.is_string()) r.authors.push_back(c.get<std::string>());
      else if (c.is_object())
        if (auto name = json_text(c, {"creator", "name"})) r.authors.push_back(*name);
    }
  }
  r.page_count = span_page_count(r.start_page, r.end_page);
  validate(r);
  return out;
}

// ---------------------------------------------------------------------------
// JATS
// ---------------------------------------------------------------------------

ArticleRecord parse_jats(std::string_view text, const JatsOptions& options) {
  xml::Node root = xml::parse(text);
  const xml::Node* meta = root.find("article-meta");
  if (!meta) throw error(errc::malformed_payload, "no article-meta element");

  ArticleRecord r;
  r.source_format = SourceFormat::jats;

  for (const auto* id : meta->children_named("article-id")) {
    if (id->attribute("pub-id-type") == "doi") {
      r.doi = normalize_doi(id->trimmed_text());
      break;
    }
  }
  if (r.doi.empty()) throw error(errc::missing_doi, "JATS article-meta has no DOI article-id");

  if (const xml::Node* jmeta = root.find("journal-meta")) {
    if (const auto* jt = jmeta->find("journal-title")) r.journal_title = jt->trimmed_text();
    std::optional<std::string> any_issn;
    for (const auto* issn : jmeta->children_named("issn")) {
      auto type = issn->attribute("pub-type").value_or(issn->attribute("publication-format").value_or(""));
      if (type == "epub" || type == "electronic") r.issn = issn->trimmed_text();
      if (!any_issn) any_issn = issn->trimmed_text();
    }
    if (!r.issn) r.issn = any_issn;
  }

  if (const auto* t = meta->find("article-title")) r.title = t->trimmed_text();

  std::vector<const xml::Node*> contribs;
  meta->find_all("contrib", contribs);
  for (const auto* c : contribs) {
    if (c->attribute("contrib-type").value_or("author") != "author") continue;
    if (const auto* name = c->find("name")) {
      std::string surname = name->child("surname") ? name->child("surname")->trimmed_text() : "";
      std::string given = name->child("given-names") ? name->child("given-names")->trimmed_text() : "";
      r.authors.push_back(given.empty() ? surname : surname + ", " + given);
    } else if (const auto* sn = c->find("string-name")) {
      r.authors.push_back(sn->trimmed_text());
    }
  }

  const xml::Node* date = nullptr;
  for (const auto* pd : meta->children_named("pub-date")) {
    auto type = pd->attribute("pub-type").value_or(pd->attribute("date-type").value_or(""));
    if (type == "epub" || type == "pub" || type == "electronic") {
      date = pd;
      break;
    }
    if (!date) date = pd;
  }
  if (date) {
    const auto* y = date->child("year");
    if (y && is_numeric(y->trimmed_text())) {
      PartialDate d;
      d.year = std::stoi(y->trimmed_text());
      const auto* m = date->child("month");
      if (m && is_numeric(m->trimmed_text())) {
        d.month = static_cast<unsigned>(std::stoul(m->trimmed_text()));
        const auto* dd = date->child("day");
        if (dd && is_numeric(dd->trimmed_text())) d.day = static_cast<unsigned>(std::stoul(dd->trimmed_text()));
      }
      r.publication_date = d;
    }
  }

  if (const auto* v = meta->child("volume")) r.volume = non_empty(v->trimmed_text());
  const xml::Node* issue = meta->child("issue");
  if (issue) r.issue = non_empty(issue->trimmed_text());
  if (const auto* fp = meta->child("fpage")) r.start_page = non_empty(fp->trimmed_text());
  if (const auto* lp = meta->child("lpage")) r.end_page = non_empty(lp->trimmed_text());

  if (const auto* eloc = meta->child("elocation-id")) r.article_number = non_empty(eloc->trimmed_text());
  if (!r.article_number && issue) {
    if (auto seq = issue->attribute("seq")) r.article_number = non_empty(*seq);
  }
  if (!r.article_number && !options.article_number_meta_names.empty()) {
    std::vector<const xml::Node*> customs;
    meta->find_all("custom-meta", customs);
    for (const auto* cm : customs) {
      const auto* name = cm->child("meta-name");
      const auto* value = cm->child("meta-value");
      if (!name || !value) continue;
      auto n = name->trimmed_text();
      if (std::find(options.article_number_meta_names.begin(), options.article_number_meta_names.end(), n) !=
          options.article_number_meta_names.end()) {
        r.article_number = non_empty(value->trimmed_text());
        if (r.article_number) break;
      }
    }
  }

  if (const auto* pc = meta->find("page-count")) {
    if (auto c = pc->attribute("count"); c && is_numeric(*c)) r.page_count = std::stoi(*c);
  }
  if (!r.page_count) r.page_count = span_page_count(r.start_page, r.end_page);
  validate(r);
  return r;
}

// ---------------------------------------------------------------------------
// Crossref
// ---------------------------------------------------------------------------

CrossrefWork parse_crossref_work(const json& in) {
  const json* msg = &in;
  if (in.is_object() && in.contains("message") && in["message"].is_object()) msg = &in["message"];
  const json& j = *msg;
  if (!j.is_object()) throw error(errc::malformed_payload, "Crossref work is not an object");

  auto doi = json_text(j, {"DOI", "doi"});
  if (!doi) throw error(errc::missing_doi, "Crossref work has no DOI");

  CrossrefWork out;
  ArticleRecord& r = out.record;
  r.source_format = SourceFormat::crossref_work;
  r.doi = normalize_doi(*doi);
  r.title = json_text(j, {"title"}).value_or("");
  r.journal_title = json_text(j, {"container-title"}).value_or("");
  if (auto it = j.find("issn-type"); it != j.end() && it->is_array()) {
    for (const auto& t : *it)
      if (t.value("type", "") == "electronic" && t.contains("value")) r.issn = t["value"].get<std::string>();
  }
  if (!r.issn) r.issn = json_text(j, {"ISSN"});
  r.volume = json_text(j, {"volume"});
  r.issue = json_text(j, {"issue"});
  r.article_number = json_text(j, {"article-number"});
  if (auto page = json_text(j, {"page"})) {
    std::string p = text::ascii_punctuation(*page);
    auto dash = p.find('-');
    if (dash == std::string::npos) {
      r.start_page = non_empty(p);
    } else {
      r.start_page = non_empty(std::string_view(p).substr(0, dash));
      r.end_page = non_empty(std::string_view(p).substr(dash + 1));
    }
  }
  for (const char* key : {"published-online", "issued", "published", "published-print"}) {
    auto it = j.find(key);
    if (it == j.end() || !it->contains("date-parts")) continue;
    const auto& parts = (*it)["date-parts"];
    if (!parts.is_array() || parts.empty() || !parts[0].is_array() || parts[0].empty() ||
        !parts[0][0].is_number_integer())
      continue;
    PartialDate d;
    d.year = parts[0][0].get<int>();
    if (parts[0].size() > 1 && parts[0][1].is_number_integer()) d.month = parts[0][1].get<unsigned>();
    if (d.month && parts[0].size() > 2 && parts[0][2].is_number_integer()) d.day = parts[0][2].get<unsigned>();
    r.publication_date = d;
    break;
  }
  if (auto it = j.find("author"); it != j.end() && it->is_array()) {
    for (const auto& a : *it) {
      std::string family = a.value("family", "");
      std::string given = a.value("given", "");
      if (family.empty()) family = a.value("name", "");
      if (!family.empty()) r.authors.push_back(given.empty() ? family : family + ", " + given);
    }
  }
  if (auto it = j.find("is-referenced-by-count"); it != j.end() && it->is_number_integer())
    out.is_referenced_by_count = it->get<std::int64_t>();
  r.page_count = span_page_count(r.start_page, r.end_page);
  validate(r);
  return out;
}

CrossrefWork parse_crossref_work(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw error(errc::malformed_payload, "unparseable Crossref JSON");
  return parse_crossref_work(j);
}

// ---------------------------------------------------------------------------
// Reference strings
// ---------------------------------------------------------------------------

std::string_view to_string(LocatorKind k) {
  switch (k) {
    case LocatorKind::article_number: return "ArticleNumber";
    case LocatorKind::start_page: return "StartPage";
    case LocatorKind::page_range: return "PageRange";
    case LocatorKind::issue_colon_locator: return "IssueColonLocator";
    case LocatorKind::unknown: return "Unknown";
  }
  return "Unknown";
}

namespace {

std::string strip_trailing(std::string s, std::string_view chars) {
  while (!s.empty() && (chars.find(s.back()) != std::string_view::npos ||
                        std::isspace(static_cast<unsigned char>(s.back()))))
    s.pop_back();
  return s;
}

// Splits the text before the volume into title and journal. Springer-style
// references put "(YYYY)" between authors and title.
void split_prefix(std::string prefix, ParsedReference& out, bool take_year) {
  static const std::regex year_re(R"(\((\d{4})[a-z]?\))");
  prefix = strip_trailing(std::move(prefix), ",.");
  std::smatch m;
  std::string rest = prefix;
  std::string::const_iterator search_from = prefix.cbegin();
  std::ptrdiff_t after = -1;
  while (std::regex_search(search_from, prefix.cend(), m, year_re)) {
    if (take_year) out.year = std::stoi(m[1].str());
    after = m[0].second - prefix.cbegin();
    search_from = m[0].second;
  }
  bool had_year_prefix = after >= 0;
  if (had_year_prefix) rest = std::string(text::trim(prefix.substr(static_cast<std::size_t>(after))));

  auto cut = rest.rfind(". ");
  if (cut == std::string::npos) {
    out.journal_hint = std::string(text::trim(rest));
    return;
  }
  out.journal_hint = std::string(text::trim(rest.substr(cut + 2)));
  std::string before = rest.substr(0, cut);
  if (!had_year_prefix) {
    // "Authors. Title. Journal": the title is the last sentence.
    auto prev = before.rfind(". ");
    if (prev != std::string::npos) before = before.substr(prev + 2);
  }
  out.title_hint = std::string(text::trim(before));
}

}  // namespace

ParsedReference parse_reference_string(std::string_view input) {
  std::string_view trimmed = text::trim(input);
  if (trimmed.empty()) throw error(errc::empty_reference, "blank reference");

  static const std::regex enumerator_re(R"(^\[?\d+[.\]]\s+)");
  static const std::regex trailing_link_re(R"(\s+(?:https?://\S+|doi:\s*\S+)\s*$)");
  static const std::regex issue_colon_re(R"(^(.*?)\s*(\d+)\s*\(\s*([^()\s]+)\s*\)\s*:\s*([A-Za-z]?\d+)$)");
  static const std::regex colon_re(R"(^(.*?)\s*(\d+)\s*:\s*([A-Za-z]?\d+)$)");
  static const std::regex number_re(R"(^(.*?)\s*(\d+)\s*,\s*([A-Za-z]?\d+)\s*\(\s*(\d{4})\s*\)$)");
  static const std::regex range_re(R"(^(.*?)\s*(\d+)\s*,\s*(\d+)\s*-\s*(\d+)\s*\(\s*(\d{4})\s*\)$)");
  static const std::regex any_year_re(R"(\((\d{4})\)|\b((?:19|20)\d{2})\b)");

  ParsedReference out;
  out.raw = std::string(trimmed);

  std::string work = text::ascii_punctuation(trimmed);
  work = std::regex_replace(work, enumerator_re, "");
  for (std::string prev; prev != work;) {
    prev = work;
    work = std::regex_replace(work, trailing_link_re, "");
  }
  work = strip_trailing(work, ".");

  std::smatch m;
  if (std::regex_match(work, m, issue_colon_re)) {
    split_prefix(m[1].str(), out, true);
    out.volume = m[2].str();
    out.issue = m[3].str();
    out.locator = m[4].str();
    out.locator_kind = LocatorKind::issue_colon_locator;
    return out;
  }
  if (std::regex_match(work, m, colon_re)) {
    split_prefix(m[1].str(), out, true);
    out.volume = m[2].str();
    out.locator = m[3].str();
    out.locator_kind = LocatorKind::issue_colon_locator;
    return out;
  }
  if (std::regex_match(work, m, number_re)) {
    split_prefix(m[1].str(), out, false);
    out.volume = m[2].str();
    out.locator = m[3].str();
    out.year = std::stoi(m[4].str());
    out.locator_kind = LocatorKind::article_number;
    return out;
  }
  if (std::regex_match(work, m, range_re)) {
    long long a = std::stoll(m[3].str());
    long long b = std::stoll(m[4].str());
    split_prefix(m[1].str(), out, false);
    out.volume = m[2].str();
    out.year = std::stoi(m[5].str());
    if (b >= a) {
      out.locator = m[3].str() + "-" + m[4].str();
      out.locator_kind = LocatorKind::page_range;
      return out;
    }
    // Abbreviated or inverted range: keep the fields, leave the kind open.
    out.locator = m[3].str();
    out.locator_kind = LocatorKind::unknown;
    return out;
  }

  if (std::regex_search(work, m, any_year_re)) out.year = std::stoi(m[1].matched ? m[1].str() : m[2].str());
  out.journal_hint = work;
  return out;
}

std::string render_reference(const ParsedReference& ref) {
  std::string prefix;
  bool springer = ref.locator_kind == LocatorKind::issue_colon_locator;
  if (springer && ref.year) prefix = "(" + std::to_string(*ref.year) + ") ";
  if (!ref.title_hint.empty()) prefix += ref.title_hint + ". ";
  prefix += ref.journal_hint;

  const std::string vol = ref.volume.value_or("");
  const std::string loc = ref.locator.value_or("");
  const std::string year = ref.year ? std::to_string(*ref.year) : "";
  switch (ref.locator_kind) {
    case LocatorKind::issue_colon_locator:
      if (ref.issue) return prefix + " " + vol + "(" + *ref.issue + "):" + loc;
      return prefix + " " + vol + ":" + loc;
    case LocatorKind::article_number:
      return prefix + " " + vol + ", " + loc + " (" + year + ")";
    case LocatorKind::page_range: {
      std::string range = loc;
      text::replace_all(range, "-", "\xE2\x80\x93");
      return prefix + " " + vol + ", " + range + " (" + year + ")";
    }
    case LocatorKind::start_page:
    case LocatorKind::unknown:
      break;
  }
  return ref.raw;
}

// ---------------------------------------------------------------------------
// Bundles & sniffing
// ---------------------------------------------------------------------------

void FormatBundle::add(ArticleRecord record, std::string raw) {
  if (doi.empty()) doi = record.doi;
  if (normalize_doi(record.doi) != normalize_doi(doi))
    throw error(errc::mismatched_input, "bundle DOI " + doi + " vs record DOI " + record.doi);
  auto fmt = record.source_format;
  per_format[fmt] = FormatEntry{std::move(record), std::move(raw)};
}

std::optional<SourceFormat> sniff_format(std::string_view input) {
  std::string_view t = text::trim(input);
  if (t.rfind("\xEF\xBB\xBF", 0) == 0) t.remove_prefix(3);
  if (t.empty()) return std::nullopt;
  if (t.rfind("TY  -", 0) == 0 || t.find("\nER  -") != std::string_view::npos) return SourceFormat::ris;
  if (t.front() == '<') return SourceFormat::jats;
  if (t.front() == '{') {
    if (t.find("\"message\"") != std::string_view::npos || t.find("\"DOI\"") != std::string_view::npos)
      return SourceFormat::crossref_work;
    return SourceFormat::publisher_json;
  }
  if (t.find("({") != std::string_view::npos) return SourceFormat::publisher_json;
  return std::nullopt;
}

}  // namespace citeaudit
