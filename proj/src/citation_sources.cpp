#include "citeaudit/citation_sources.hpp"

#include <cctype>
#include <sstream>
#include <thread>

#include "citeaudit/text.hpp"
#include "httplib.h"

namespace citeaudit {

using nlohmann::json;
namespace chr = std::chrono;
namespace fs = std::filesystem;

std::string_view to_string(CitationSource s) {
  switch (s) {
    case CitationSource::crossref: return "crossref";
    case CitationSource::open_citations: return "opencitations";
    case CitationSource::semantic_scholar: return "semanticscholar";
    case CitationSource::synthetic: return "synthetic";
  }
  return "synthetic";
}

std::optional<CitationSource> citation_source_from_string(std::string_view s) {
  std::string k = text::to_lower(s);
  text::replace_all(k, "_", "");
  text::replace_all(k, "-", "");
  text::replace_all(k, " ", "");
  for (auto src : {CitationSource::crossref, CitationSource::open_citations, CitationSource::semantic_scholar,
                   CitationSource::synthetic})
    if (to_string(src) == k) return src;
  return std::nullopt;
}

chr::sys_seconds system_now() { return chr::time_point_cast<chr::seconds>(chr::system_clock::now()); }

json to_json(const CitationCount& c) {
  return json{{"doi", c.doi},
              {"source", std::string(to_string(c.source))},
              {"count", c.count},
              {"retrieved_at", c.retrieved_at.time_since_epoch().count()}};
}

CitationCount citation_count_from_json(const json& j) {
  try {
    CitationCount c;
    c.doi = j.at("doi").get<std::string>();
    c.source = citation_source_from_string(j.at("source").get<std::string>()).value_or(CitationSource::synthetic);
    c.count = j.at("count").get<std::int64_t>();
    c.retrieved_at = chr::sys_seconds{chr::seconds{j.at("retrieved_at").get<std::int64_t>()}};
    return c;
  } catch (const json::exception& e) {
    throw error(errc::malformed_payload, std::string("citation count: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Response parsers
// ---------------------------------------------------------------------------

namespace {

json parse_body(std::string_view body, const char* what) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw error(errc::malformed_payload, std::string(what) + ": unparseable JSON");
  return j;
}

std::int64_t count_value(const json& v, const char* what) {
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::int64_t>();
  if (v.is_string() && is_numeric(v.get<std::string>()) && v.get<std::string>().size() < 18)
    return std::stoll(v.get<std::string>());
  throw error(errc::malformed_payload, std::string(what) + ": count is not a non-negative integer");
}

}  // namespace

std::int64_t parse_crossref_count(std::string_view body) {
  json j = parse_body(body, "crossref");
  const json& msg = j.contains("message") ? j["message"] : j;
  if (!msg.is_object() || !msg.contains("is-referenced-by-count"))
    throw error(errc::malformed_payload, "crossref: missing is-referenced-by-count");
  return count_value(msg["is-referenced-by-count"], "crossref");
}

std::int64_t parse_opencitations_count(std::string_view body) {
  json j = parse_body(body, "opencitations");
  if (j.is_array()) {
    if (j.empty()) throw error(errc::not_found, "opencitations: empty result");
    j = j.front();
  }
  if (!j.is_object() || !j.contains("count")) throw error(errc::malformed_payload, "opencitations: missing count");
  return count_value(j["count"], "opencitations");
}

std::int64_t parse_semantic_scholar_count(std::string_view body) {
  json j = parse_body(body, "semanticscholar");
  if (!j.is_object() || !j.contains("citationCount") || j["citationCount"].is_null())
    throw error(errc::malformed_payload, "semanticscholar: missing citationCount");
  return count_value(j["citationCount"], "semanticscholar");
}

// ---------------------------------------------------------------------------
// Policy / endpoints
// ---------------------------------------------------------------------------

void FetchPolicy::validate() const {
  if (max_concurrent_requests < 1) throw error(errc::config_error, "max_concurrent_requests must be >= 1");
  if (crossref_interval.count() < 0 || other_interval.count() < 0)
    throw error(errc::config_error, "request intervals must be non-negative");
  if (max_retries < 0) throw error(errc::config_error, "max_retries must be >= 0");
  if (backoff_initial.count() < 0) throw error(errc::config_error, "backoff must be non-negative");
  if (cache_ttl.count() <= 0) throw error(errc::config_error, "cache_ttl must be positive");
}

const std::string& Endpoints::base(CitationSource s) const {
  switch (s) {
    case CitationSource::crossref: return crossref;
    case CitationSource::open_citations: return open_citations;
    case CitationSource::semantic_scholar: return semantic_scholar;
    case CitationSource::synthetic: break;
  }
  throw error(errc::config_error, "synthetic source has no endpoint");
}

std::string user_agent(const std::string& contact_email) {
  return "citeaudit/0.1 (mailto:" + contact_email + ")";
}

std::string url_encode_doi(std::string_view doi) {
  std::string out;
  static const char hex[] = "0123456789ABCDEF";
  for (char c : doi) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/') {
      out.push_back(c);
    } else {
      out.push_back('%');
      out.push_back(hex[u >> 4]);
      out.push_back(hex[u & 0xF]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

std::string Cache::file_for(std::string_view ns) { return std::string(ns) + ".jsonl"; }

Cache::Cache(fs::path dir, chr::seconds ttl, Clock clock) : dir_(std::move(dir)), ttl_(ttl), clock_(std::move(clock)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw error(errc::storage_corrupt, "cannot create cache directory " + dir_.string() + ": " + ec.message());
  std::lock_guard lock(mu_);
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.path().extension() == ".jsonl") load(e.path().stem().string());
  }
}

void Cache::load(std::string_view ns) {
  Namespace& n = namespaces_[std::string(ns)];
  fs::path path = dir_ / file_for(ns);
  std::ifstream in(path, std::ios::binary);
  if (in) {
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
      auto nl = content.find('\n', pos);
      bool terminated = nl != std::string::npos;
      std::string_view line(content.data() + pos, (terminated ? nl : content.size()) - pos);
      ++line_no;
      json j = json::parse(line, nullptr, false);
      bool ok = !j.is_discarded() && j.is_object() && j.contains("k") && j["k"].is_string() && j.contains("t") &&
                j["t"].is_number_integer() && j.contains("v");
      if (!ok) {
        if (!terminated) {
          // Torn final write: drop it so later appends start on a clean line.
          fs::resize_file(path, pos);
          break;
        }
        throw error(errc::storage_corrupt, path.string() + ":" + std::to_string(line_no) + ": unreadable entry");
      }
      n.entries[j["k"].get<std::string>()] = Entry{std::move(j["v"]), chr::sys_seconds{chr::seconds{j["t"].get<std::int64_t>()}}};
      ++n.journal_lines;
      if (!terminated) {
        std::ofstream fix(path, std::ios::app | std::ios::binary);
        fix << '\n';
      }
      pos = terminated ? nl + 1 : content.size();
    }
  }
  n.out.open(path, std::ios::app | std::ios::binary);
  if (!n.out) throw error(errc::storage_corrupt, "cannot open " + path.string() + " for append");
}

Cache::Namespace& Cache::ns_locked(std::string_view ns) {
  auto it = namespaces_.find(ns);
  if (it != namespaces_.end()) return it->second;
  load(ns);
  return namespaces_.find(ns)->second;
}

std::optional<Cache::Entry> Cache::get(std::string_view ns, std::string_view key) const {
  std::lock_guard lock(mu_);
  auto nit = namespaces_.find(ns);
  if (nit == namespaces_.end()) return std::nullopt;
  auto it = nit->second.entries.find(key);
  if (it == nit->second.entries.end()) return std::nullopt;
  if (clock_() - it->second.stored_at >= ttl_) return std::nullopt;
  return it->second;
}

void Cache::put(std::string_view ns, std::string_view key, json value) {
  std::lock_guard lock(mu_);
  Namespace& n = ns_locked(ns);
  auto now = clock_();
  json line = {{"k", std::string(key)}, {"t", now.time_since_epoch().count()}, {"v", value}};
  n.out << line.dump() << '\n';
  n.out.flush();
  if (!n.out) throw error(errc::storage_corrupt, "write failed for " + (dir_ / file_for(ns)).string());
  n.entries[std::string(key)] = Entry{std::move(value), now};
  ++n.journal_lines;
  if (n.journal_lines > 4096 && n.journal_lines > 2 * n.entries.size()) compact_locked(ns, n);
}

void Cache::compact_locked(std::string_view ns, Namespace& n) {
  fs::path path = dir_ / file_for(ns);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    for (const auto& [k, e] : n.entries)
      out << json{{"k", k}, {"t", e.stored_at.time_since_epoch().count()}, {"v", e.value}}.dump() << '\n';
    if (!out) throw error(errc::storage_corrupt, "compaction write failed for " + tmp.string());
  }
  n.out.close();
  fs::rename(tmp, path);
  n.journal_lines = n.entries.size();
  n.out.open(path, std::ios::app | std::ios::binary);
}

void Cache::compact() {
  std::lock_guard lock(mu_);
  for (auto& [ns, n] : namespaces_) compact_locked(ns, n);
}

std::size_t Cache::size() const {
  std::lock_guard lock(mu_);
  std::size_t total = 0;
  for (const auto& [ns, n] : namespaces_) total += n.entries.size();
  return total;
}

std::optional<CitationCount> Cache::get_count(const std::string& doi, CitationSource source) const {
  auto e = get(to_string(source), normalize_doi(doi));
  if (!e) return std::nullopt;
  return citation_count_from_json(e->value);
}

void Cache::put_count(const CitationCount& count) {
  put(to_string(count.source), normalize_doi(count.doi), to_json(count));
}

std::optional<JournalListing> Cache::get_listing(const std::string& key) const {
  auto e = get("listings", key);
  if (!e) return std::nullopt;
  JournalListing listing;
  for (const auto& r : e->value.at("records")) listing.records.push_back(article_from_json(r));
  for (const auto& [doi, n] : e->value.at("counts").items()) listing.crossref_counts[doi] = n.get<std::int64_t>();
  return listing;
}

void Cache::put_listing(const std::string& key, const JournalListing& listing) {
  json records = json::array();
  for (const auto& r : listing.records) records.push_back(to_json(r));
  json counts = json::object();
  for (const auto& [doi, n] : listing.crossref_counts) counts[doi] = n;
  put("listings", key, json{{"records", records}, {"counts", counts}});
}

// ---------------------------------------------------------------------------
// HTTP transport
// ---------------------------------------------------------------------------

namespace {

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(chr::seconds timeout) : timeout_(timeout) {}

  HttpResponse get(const std::string& base_url, const std::string& path_and_query,
                   const std::map<std::string, std::string>& headers) override {
    httplib::Client cli(base_url);
    cli.set_follow_location(true);
    cli.set_connection_timeout(timeout_);
    cli.set_read_timeout(timeout_);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = cli.Get(path_and_query, h);
    if (!res) return HttpResponse{0, {}};
    return HttpResponse{res->status, res->body};
  }

 private:
  chr::seconds timeout_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(chr::seconds timeout) {
  return std::make_shared<HttplibTransport>(timeout);
}

// ---------------------------------------------------------------------------
// Rate limiter
// ---------------------------------------------------------------------------

RateLimiter::Permit::~Permit() {
  if (!owner_) return;
  {
    std::lock_guard lock(owner_->mu_);
    --owner_->hosts_[host_].in_flight;
  }
  owner_->cv_.notify_all();
}

RateLimiter::Permit RateLimiter::acquire(const std::string& host, chr::milliseconds min_interval) {
  std::unique_lock lock(mu_);
  for (;;) {
    HostState& st = hosts_[host];
    auto now = chr::steady_clock::now();
    if (st.in_flight < max_concurrent_ && now >= st.next_start) {
      ++st.in_flight;
      st.next_start = now + min_interval;
      return Permit(this, host);
    }
    if (st.in_flight >= max_concurrent_) cv_.wait(lock);
    else cv_.wait_until(lock, st.next_start);
  }
}

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

CitationClient::CitationClient(FetchPolicy policy, Endpoints endpoints, std::shared_ptr<Cache> cache,
                               std::shared_ptr<HttpTransport> transport, Clock clock)
    : policy_(std::move(policy)),
      endpoints_(std::move(endpoints)),
      cache_(std::move(cache)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      limiter_(policy_.max_concurrent_requests) {
  policy_.validate();
  if (!policy_.offline) {
    if (policy_.contact_email.empty())
      throw error(errc::config_error, "contact email required for live requests (set CITEAUDIT_CONTACT_EMAIL)");
    if (!transport_) transport_ = make_http_transport();
  }
}

HttpResponse CitationClient::get_with_retries(CitationSource source, const std::string& path, errc* failure) {
  const std::string& base = endpoints_.base(source);
  std::map<std::string, std::string> headers = {{"User-Agent", user_agent(policy_.contact_email)},
                                                {"Accept", "application/json"}};
  HttpResponse res;
  for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(policy_.backoff_initial * (1LL << (attempt - 1)));
    {
      auto permit = limiter_.acquire(base, policy_.min_interval(source));
      ++live_requests_;
      res = transport_->get(base, path, headers);
    }
    if (res.status == 200 || res.status == 404) return res;
    bool retryable = res.status == 0 || res.status == 429 || res.status >= 500;
    if (!retryable) break;
  }
  *failure = res.status == 429 ? errc::rate_limited : errc::source_unavailable;
  return res;
}

CitationCount CitationClient::fetch_citation_count(const std::string& doi_in, CitationSource source) {
  if (source == CitationSource::synthetic) throw error(errc::config_error, "synthetic counts are not fetchable");
  std::string doi = normalize_doi(doi_in);
  if (!is_plausible_doi(doi)) throw error(errc::invalid_record, "not a DOI: " + doi_in);
  if (cache_) {
    if (auto hit = cache_->get_count(doi, source)) return *hit;
  }
  if (policy_.offline)
    throw error(errc::cache_miss, std::string(to_string(source)) + " count for " + doi + " not cached (offline)");

  std::string path;
  switch (source) {
    case CitationSource::crossref: {
      path = "/works/" + url_encode_doi(doi);
      if (!policy_.contact_email.empty()) path += "?mailto=" + policy_.contact_email;
      break;
    }
    case CitationSource::open_citations:
      path = "/index/api/v2/citation-count/doi:" + url_encode_doi(doi);
      break;
    case CitationSource::semantic_scholar:
      path = "/graph/v1/paper/DOI:" + url_encode_doi(doi) + "?fields=citationCount";
      break;
    case CitationSource::synthetic:
      break;
  }

  errc failure = errc::source_unavailable;
  HttpResponse res = get_with_retries(source, path, &failure);
  if (res.status == 404) throw error(errc::not_found, std::string(to_string(source)) + " does not know " + doi);
  if (res.status != 200)
    throw error(failure, std::string(to_string(source)) + " request for " + doi + " failed (status " +
                             std::to_string(res.status) + ")");

  std::int64_t n = 0;
  switch (source) {
    case CitationSource::crossref: n = parse_crossref_count(res.body); break;
    case CitationSource::open_citations: n = parse_opencitations_count(res.body); break;
    case CitationSource::semantic_scholar: n = parse_semantic_scholar_count(res.body); break;
    case CitationSource::synthetic: break;
  }
  CitationCount count{doi, source, n, clock_()};
  if (cache_) cache_->put_count(count);
  return count;
}

std::string JournalQuery::cache_key() const {
  return issn + ":" + PartialDate::from_sys_days(from).iso() + ":" + PartialDate::from_sys_days(until).iso();
}

JournalListing CitationClient::fetch_journal_listing(const JournalQuery& q) {
  if (q.until < q.from) return {};
  const std::string key = q.cache_key();
  if (cache_) {
    if (auto hit = cache_->get_listing(key)) return *hit;
  }
  if (policy_.offline) throw error(errc::cache_miss, "listing " + key + " not cached (offline)");

  JournalListing listing;
  std::map<std::string, ArticleRecord> by_doi;
  std::string cursor = "*";
  const std::string filter = "from-pub-date:" + PartialDate::from_sys_days(q.from).iso() +
                             ",until-pub-date:" + PartialDate::from_sys_days(q.until).iso();
  auto finish = [&] {
    listing.records.clear();
    for (auto& [doi, r] : by_doi) listing.records.push_back(r);
  };

  for (int page = 0;; ++page) {
    std::string path = "/journals/" + q.issn + "/works?filter=" + filter + "&rows=" + std::to_string(q.rows) +
                       "&cursor=" + httplib::detail::encode_url(cursor);
    if (!policy_.contact_email.empty()) path += "&mailto=" + policy_.contact_email;
    errc failure = errc::source_unavailable;
    HttpResponse res = get_with_retries(CitationSource::crossref, path, &failure);
    if (res.status == 404) throw error(errc::unknown_journal, "Crossref does not know ISSN " + q.issn);
    if (res.status != 200) {
      finish();
      throw IncompleteListing("listing page " + std::to_string(page) + " for " + key + " failed (status " +
                                  std::to_string(res.status) + ")",
                              std::move(listing));
    }
    json j = json::parse(res.body, nullptr, false);
    if (j.is_discarded() || !j.contains("message") || !j["message"].contains("items"))
      throw error(errc::malformed_payload, "Crossref listing page without message.items");
    const json& msg = j["message"];
    const json& items = msg["items"];
    for (const auto& item : items) {
      try {
        CrossrefWork w = parse_crossref_work(item);
        if (w.is_referenced_by_count) listing.crossref_counts[w.record.doi] = *w.is_referenced_by_count;
        by_doi[w.record.doi] = std::move(w.record);
      } catch (const error&) {
        // Works without a usable DOI are skipped.
      }
    }
    std::string next = msg.value("next-cursor", "");
    if (items.empty() || next.empty() || next == cursor) break;
    cursor = next;
  }
  finish();

  if (cache_) {
    auto now = clock_();
    for (const auto& [doi, n] : listing.crossref_counts) cache_->put_count(CitationCount{doi, CitationSource::crossref, n, now});
    cache_->put_listing(key, listing);
  }
  return listing;
}

}  // namespace citeaudit
