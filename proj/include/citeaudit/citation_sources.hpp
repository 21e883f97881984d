#ifndef CITEAUDIT_CITATION_SOURCES_HPP
#define CITEAUDIT_CITATION_SOURCES_HPP

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citeaudit/bib_formats.hpp"
#include "citeaudit/error.hpp"
#include "json.hpp"

namespace citeaudit {

enum class CitationSource { crossref, open_citations, semantic_scholar, synthetic };

std::string_view to_string(CitationSource s);
std::optional<CitationSource> citation_source_from_string(std::string_view s);

using Clock = std::function<std::chrono::sys_seconds()>;
std::chrono::sys_seconds system_now();

struct CitationCount {
  std::string doi;
  CitationSource source = CitationSource::crossref;
  std::int64_t count = 0;
  std::chrono::sys_seconds retrieved_at{};

  friend bool operator==(const CitationCount&, const CitationCount&) = default;
};

nlohmann::json to_json(const CitationCount& c);
CitationCount citation_count_from_json(const nlohmann::json& j);

// Pure response parsers. Each rejects a payload without its count field
// (error malformed_payload) instead of defaulting to zero.
std::int64_t parse_crossref_count(std::string_view body);
std::int64_t parse_opencitations_count(std::string_view body);
std::int64_t parse_semantic_scholar_count(std::string_view body);

struct FetchPolicy {
  int max_concurrent_requests = 4;
  std::chrono::milliseconds crossref_interval{1000};
  std::chrono::milliseconds other_interval{2000};
  int max_retries = 3;
  std::chrono::milliseconds backoff_initial{1000};  // doubles per retry
  std::chrono::seconds cache_ttl = std::chrono::hours(24 * 30);
  std::string contact_email;
  bool offline = false;

  std::chrono::milliseconds min_interval(CitationSource s) const {
    return s == CitationSource::crossref ? crossref_interval : other_interval;
  }
  /// Throws error(config_error) on non-positive limits.
  void validate() const;
};

/// Base URLs; overridable so tests can point the client at a local mock.
struct Endpoints {
  std::string crossref = "https://api.crossref.org";
  std::string open_citations = "https://opencitations.net";
  std::string semantic_scholar = "https://api.semanticscholar.org";

  const std::string& base(CitationSource s) const;
};

struct JournalListing {
  std::vector<ArticleRecord> records;  // sorted by DOI
  std::map<std::string, std::int64_t> crossref_counts;
};

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

/// Durable key/value store: one append-only JSONL journal per namespace
/// ("crossref", "opencitations", "semanticscholar", "listings") in a
/// directory. Later lines win; compaction rewrites the live set.
class Cache {
 public:
  struct Entry {
    nlohmann::json value;
    std::chrono::sys_seconds stored_at;
  };

  /// Opens (creating if needed) the directory and replays every journal.
  /// Throws error(storage_corrupt) on an unreadable line.
  explicit Cache(std::filesystem::path dir, std::chrono::seconds ttl = std::chrono::hours(24 * 30),
                 Clock clock = system_now);

  std::optional<Entry> get(std::string_view ns, std::string_view key) const;
  void put(std::string_view ns, std::string_view key, nlohmann::json value);

  std::optional<CitationCount> get_count(const std::string& doi, CitationSource source) const;
  void put_count(const CitationCount& count);

  std::optional<JournalListing> get_listing(const std::string& key) const;
  void put_listing(const std::string& key, const JournalListing& listing);

  /// Rewrites each journal with only its live entries.
  void compact();

  std::size_t size() const;
  const std::filesystem::path& directory() const { return dir_; }

  static std::string file_for(std::string_view ns);

 private:
  struct Namespace {
    std::map<std::string, Entry, std::less<>> entries;
    std::size_t journal_lines = 0;
    std::ofstream out;
  };

  Namespace& ns_locked(std::string_view ns);
  void load(std::string_view ns);
  void compact_locked(std::string_view ns, Namespace& n);

  std::filesystem::path dir_;
  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, Namespace, std::less<>> namespaces_;
};

// ---------------------------------------------------------------------------
// HTTP
// ---------------------------------------------------------------------------

struct HttpResponse {
  int status = 0;  // 0 = connection failure
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& base_url, const std::string& path_and_query,
                           const std::map<std::string, std::string>& headers) = 0;
};

/// cpp-httplib backed transport (http and https).
std::shared_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(30));

/// Caps in-flight requests and spaces request starts per host.
class RateLimiter {
 public:
  explicit RateLimiter(int max_concurrent) : max_concurrent_(max_concurrent) {}

  class Permit {
   public:
    Permit(RateLimiter* owner, std::string host) : owner_(owner), host_(std::move(host)) {}
    Permit(Permit&& o) noexcept : owner_(std::exchange(o.owner_, nullptr)), host_(std::move(o.host_)) {}
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    Permit& operator=(Permit&&) = delete;
    ~Permit();

   private:
    RateLimiter* owner_;
    std::string host_;
  };

  Permit acquire(const std::string& host, std::chrono::milliseconds min_interval);

 private:
  struct HostState {
    int in_flight = 0;
    std::chrono::steady_clock::time_point next_start{};
  };
  int max_concurrent_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, HostState> hosts_;
};

struct JournalQuery {
  std::string issn;
  std::chrono::sys_days from;
  std::chrono::sys_days until;  // inclusive
  int rows = 1000;

  std::string cache_key() const;
};

/// Thrown when a listing page keeps failing; carries what was collected.
class IncompleteListing : public error {
 public:
  IncompleteListing(const std::string& detail, JournalListing partial)
      : error(errc::incomplete_listing, detail), partial_(std::move(partial)) {}
  const JournalListing& partial() const { return partial_; }

 private:
  JournalListing partial_;
};

class CitationClient {
 public:
  CitationClient(FetchPolicy policy, Endpoints endpoints, std::shared_ptr<Cache> cache,
                 std::shared_ptr<HttpTransport> transport = nullptr, Clock clock = system_now);

  /// Cache first (TTL-respecting); offline mode turns a miss into
  /// error(cache_miss). Live errors: not_found, rate_limited,
  /// source_unavailable, malformed_payload.
  CitationCount fetch_citation_count(const std::string& doi, CitationSource source);

  /// Crossref works listing for one journal over a date range, following
  /// cursor pagination. Crossref counts are cached as a side effect.
  JournalListing fetch_journal_listing(const JournalQuery& query);
  std::vector<ArticleRecord> fetch_journal_articles(const JournalQuery& query) {
    return fetch_journal_listing(query).records;
  }

  std::uint64_t live_requests() const { return live_requests_.load(); }
  const FetchPolicy& policy() const { return policy_; }

 private:
  HttpResponse get_with_retries(CitationSource source, const std::string& path, errc* failure);

  FetchPolicy policy_;
  Endpoints endpoints_;
  std::shared_ptr<Cache> cache_;
  std::shared_ptr<HttpTransport> transport_;
  Clock clock_;
  RateLimiter limiter_;
  std::atomic<std::uint64_t> live_requests_{0};
};

std::string user_agent(const std::string& contact_email);

/// Percent-encodes everything outside the URL unreserved set except '/'.
std::string url_encode_doi(std::string_view doi);

}  // namespace citeaudit

#endif  // CITEAUDIT_CITATION_SOURCES_HPP
