// Acceptance run: one PASS/FAIL line per criterion. Criterion 12 talks to
// the live Crossref API and only runs with --live or CITEAUDIT_LIVE=1; it
// never affects the exit status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <array>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "citeaudit/anomaly_rules.hpp"
#include "citeaudit/cli_report.hpp"
#include "citeaudit/cohort_stats.hpp"
#include "citeaudit/error.hpp"
#include "citeaudit/synth_corpus.hpp"
#include "support/fixtures.hpp"
#include "support/mock_api.hpp"

using namespace citeaudit;
namespace fs = std::filesystem;
namespace chr = std::chrono;
using citeaudit::testing::config_dir;
using citeaudit::testing::fixture;
using citeaudit::testing::fixture_dir;
using citeaudit::testing::scratch_dir;
using citeaudit::testing::slurp;

namespace {

// Pinned tolerances.
constexpr double kFixtureRuntimeS = 1.0;
constexpr double kMomentTol = 1e-9;
constexpr double kZThreshold = 3.0;
constexpr double kSeedShareCorrupted = 0.95;
constexpr double kSeedShareClean = 0.99;
constexpr double kSyntheticRuntimeS = 60.0;
constexpr double kKsAlpha = 0.01;
constexpr double kTopDecile = 0.10;
constexpr double kSplitGap = 2.0;
constexpr double kExpectationTol = 0.05;
constexpr std::int64_t kMinVolumeCitations = 1000;
constexpr int kSeeds = 100;
constexpr double kIntervalSlackMs = 5.0;
constexpr double kLiveCohortTarget = 322;
constexpr double kLiveCohortTol = 0.10;

// Golden FNV-1a digests recorded on linux x86_64 / g++ 11; a build on any
// other platform compares against these.
constexpr std::uint64_t kGoldenCorpusDigest = 0x38ab86c3413eca2fULL;
constexpr std::uint64_t kGoldenSvgDigest = 0xb0e0cd58b5de59f0ULL;

struct Outcome {
  enum { pass, fail, skip } status = fail;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(chr::steady_clock::time_point t0) {
  return chr::duration<double>(chr::steady_clock::now() - t0).count();
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SynthSpec load_spec(const std::string& name) {
  return synth_spec_from_json(nlohmann::json::parse(slurp(config_dir() / name)));
}

std::int64_t sum(const std::vector<std::int64_t>& v) {
  std::int64_t s = 0;
  for (auto x : v) s += x;
  return s;
}

// --- 1 -----------------------------------------------------------------------------

Outcome criterion_1() {
  const auto t0 = chr::steady_clock::now();
  auto manifest = nlohmann::json::parse(fixture("asymmetry/manifest.json"));
  int ris_ok = 0, json_ok = 0, i1 = 0, i2 = 0;
  for (const auto& m : manifest) {
    const std::string stem = m["stem"], doi = m["doi"], number = m["article_number"];
    const auto ris = parse_ris(fixture("asymmetry/" + stem + ".ris"));
    const std::string js = fixture("asymmetry/" + stem + ".json");
    const auto api = parse_publisher_json(js).record;
    ris_ok += ris.article_number == number && ris.article_number_is_candidate();
    json_ok += !api.article_number && api.start_page == "1";
    for (const auto& f : detect_i1(ris, api)) i1 += f.severity == Severity::confirmed;
    std::vector<RawPayload> payloads = {{PayloadFormat::json, js}};
    for (const auto& f : detect_i2(doi, payloads, number)) i2 += f.severity == Severity::confirmed;
  }
  const int n = static_cast<int>(manifest.size());
  const double t = seconds_since(t0);
  return verdict(n == 20 && ris_ok == n && json_ok == n && i1 == n && i2 == n && t < kFixtureRuntimeS,
                 fmt("RIS candidate %d/%d, JSON absent+start 1 %d/%d, I1 %d/%d, I2 %d/%d, %.3f s", ris_ok, n, json_ok, n,
                     i1, n, i2, n, t));
}

// --- 2 -----------------------------------------------------------------------------

Outcome criterion_2() {
  const auto t0 = chr::steady_clock::now();
  std::vector<ArticleRecord> candidates;
  for (const auto& w : nlohmann::json::parse(fixture("scan/candidates.json")))
    candidates.push_back(parse_crossref_work(w).record);
  auto findings_for = [&](const std::string& line) {
    auto ref = parse_reference_string(line);
    std::vector<ArticleRecord> same;
    for (const auto& c : candidates)
      if (c.volume == ref.volume) same.push_back(c);
    return detect_o2(ref, same);
  };
  struct Case {
    std::string wrong, right, doi;
  };
  const std::vector<Case> cases = {{"Nat Commun 13(1):8", "Nat Commun 13, 2193 (2022)", "10.5555/natcomm.13.2193"},
                                   {"Nat Commun 11(1):10", "Nat Commun 11, 3315 (2020)", "10.5555/natcomm.11.3315"}};
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    auto bad = findings_for(c.wrong);
    auto good = findings_for(c.right);
    bool one = bad.size() == 1 && bad[0].rule == Rule::O2 && bad[0].severity == Severity::confirmed && bad[0].doi == c.doi;
    ok &= one && good.empty();
    detail += fmt("'%s' -> %zu finding(s); '%s' -> %zu; ", c.wrong.c_str(), bad.size(), c.right.c_str(), good.size());
  }
  const double t = seconds_since(t0);
  ok &= t < kFixtureRuntimeS;
  return verdict(ok, detail + fmt("%.3f s", t));
}

// --- 3 -----------------------------------------------------------------------------

Outcome criterion_3() {
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<std::size_t> size_d(2, 500);
  std::uniform_int_distribution<std::int64_t> count_d(0, 100000);
  std::uniform_int_distribution<std::int64_t> shift_d(1, 1'000'000'000);
  double worst_mu = 0, worst_sigma = 0;
  std::size_t degenerate = 0, shift_mismatch = 0;
  for (int t = 0; t < 10000; ++t) {
    std::vector<std::int64_t> c(size_d(rng));
    // Every 500th cohort is constant so the degenerate path is exercised.
    for (auto& x : c) x = t % 500 == 0 ? 7 : count_d(rng);
    auto z = normalize_counts(c);
    std::vector<std::int64_t> shifted = c;
    const auto k = shift_d(rng);
    for (auto& x : shifted) x += k;
    auto zs = normalize_counts(shifted);
    if (std::memcmp(z.z.data(), zs.z.data(), z.z.size() * sizeof(double)) != 0) ++shift_mismatch;
    if (z.degenerate) {
      ++degenerate;
      continue;
    }
    long double s = 0, ss = 0;
    for (double v : z.z) s += v;
    const long double mu = s / static_cast<long double>(z.z.size());
    for (double v : z.z) ss += (v - mu) * (v - mu);
    const double sigma = static_cast<double>(std::sqrt(ss / static_cast<long double>(z.z.size())));
    worst_mu = std::max(worst_mu, static_cast<double>(std::fabs(mu)));
    worst_sigma = std::max(worst_sigma, std::fabs(sigma - 1.0));
  }
  return verdict(worst_mu < kMomentTol && worst_sigma < kMomentTol && shift_mismatch == 0,
                 fmt("max |mu| %.2e, max |sigma-1| %.2e, degenerate %zu, shift mismatches %zu", worst_mu, worst_sigma,
                     degenerate, shift_mismatch));
}

// --- 4 -----------------------------------------------------------------------------

ArticleRecord dated(std::string doi, std::string number, int y, unsigned m, unsigned d) {
  ArticleRecord r;
  r.doi = std::move(doi);
  r.volume = "1";
  r.article_number = std::move(number);
  PartialDate pd;
  pd.year = y;
  pd.month = m;
  pd.day = d;
  r.publication_date = pd;
  return r;
}

// Brute force: grow the window [anchor day, D] over candidate end days D in
// calendar order and keep the first window holding min_size others.
std::set<std::string> brute_force_cohort(const ArticleRecord& anchor, const std::vector<ArticleRecord>& v,
                                         std::size_t min_size) {
  const auto a = anchor.publication_date->ordering_key();
  auto last = a;
  for (const auto& r : v) last = std::max(last, r.publication_date->ordering_key());
  std::set<std::string> window;
  for (auto end = a; end <= last; end += chr::days{1}) {
    window.clear();
    for (const auto& r : v) {
      auto d = r.publication_date->ordering_key();
      if (r.doi != anchor.doi && d >= a && d <= end) window.insert(r.doi);
    }
    if (window.size() >= min_size) break;
  }
  return window;
}

Outcome criterion_4() {
  std::mt19937_64 rng(77);
  int agree = 0, perm_stable = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const std::string p = "10.5555/acc" + std::to_string(t) + ".";
    const unsigned a_day = static_cast<unsigned>(rng() % 10 + 1);
    auto anchor = dated(p + "1", "1", 2022, 5, a_day);
    std::vector<ArticleRecord> v = {anchor};
    const int n = static_cast<int>(rng() % 120 + 1);
    for (int i = 0; i < n; ++i)
      v.push_back(dated(p + std::to_string(i + 2), std::to_string(i + 2), 2022, 5, static_cast<unsigned>(rng() % 28 + 1)));
    const std::size_t min_size = rng() % 40 + 1;
    const auto oracle = brute_force_cohort(anchor, v, min_size);
    auto as_set = [](const CohortSelection& s) {
      std::set<std::string> out;
      for (const auto& c : s.comparisons) out.insert(c.doi);
      return out;
    };
    const auto first = build_cohort(anchor, v, min_size);
    agree += as_set(first) == oracle && first.comparisons.size() == oracle.size();
    bool stable = true;
    for (int k = 0; k < 5; ++k) {
      std::shuffle(v.begin(), v.end(), rng);
      auto again = build_cohort(anchor, v, min_size);
      stable &= again.comparisons == first.comparisons && again.days_extended == first.days_extended;
    }
    perm_stable += stable;
  }
  return verdict(agree == trials && perm_stable == trials,
                 fmt("oracle agreement %d/%d, permutation-stable %d/%d", agree, trials, perm_stable, trials));
}

// --- 5, 6, 9: shared seed sweep ------------------------------------------------------------

struct SeedRun {
  std::vector<double> anchor_z;
  std::vector<std::size_t> anchor_ranks;
  std::size_t total_articles = 0;
  // per volume: (own true count, volume total true count, observed anchor count, recount)
  std::vector<std::array<std::int64_t, 4>> anchor_counts;
};

SeedRun run_seed(const SynthSpec& spec) {
  SeedRun out;
  auto g = build_corpus(spec);
  for (const auto& c : synthetic_cohorts(g, spec)) out.anchor_z.push_back(normalize_cohort(c).anchor_z.front());
  auto scan = synthetic_rank_scan(g, 0);
  out.anchor_ranks = scan.anchor_ranks;
  out.total_articles = scan.total_articles;
  const auto truth = in_degrees(g.articles.size(), g.true_edges);
  const auto observed = in_degrees(g.articles.size(), g.corrupted_edges);
  for (std::size_t v = 0; v < g.volumes.size(); ++v) {
    const auto& vi = g.volumes[v];
    std::int64_t total = 0;
    for (std::size_t k = 0; k < vi.article_count; ++k) total += truth[vi.first_article + k];
    const auto anchor = g.anchor_of(v);
    std::int64_t recount = 0;
    for (const auto& e : g.corrupted_edges) recount += e.cited == anchor;
    out.anchor_counts.push_back({truth[anchor], total, observed[anchor], recount});
  }
  return out;
}

struct Sweep {
  std::vector<SeedRun> corrupted, clean;
  double seconds = 0;
  double probability = 0;
};

Sweep sweep() {
  Sweep s;
  const auto t0 = chr::steady_clock::now();
  SynthSpec spec = load_spec("synth_o1.json");
  s.probability = spec.corruption.at(0).probability;
  SynthSpec clean = spec;
  clean.corruption.clear();
  for (int seed = 1; seed <= kSeeds; ++seed) {
    spec.seed = clean.seed = static_cast<std::uint64_t>(seed);
    s.corrupted.push_back(run_seed(spec));
    s.clean.push_back(run_seed(clean));
  }
  s.seconds = seconds_since(t0);
  return s;
}

Outcome criterion_5(const Sweep& s) {
  // Per seed, the anchor z is the mean over the seed's volumes.
  int hot = 0, calm = 0;
  std::size_t anchors_hot = 0, anchors_calm = 0, anchors = 0;
  for (const auto& r : s.corrupted) {
    hot += mean(r.anchor_z) > kZThreshold;
    for (double z : r.anchor_z) anchors_hot += z > kZThreshold;
    anchors += r.anchor_z.size();
  }
  for (const auto& r : s.clean) {
    calm += std::fabs(mean(r.anchor_z)) < kZThreshold;
    for (double z : r.anchor_z) anchors_calm += std::fabs(z) < kZThreshold;
  }
  const double share_hot = hot / static_cast<double>(kSeeds), share_calm = calm / static_cast<double>(kSeeds);
  return verdict(share_hot >= kSeedShareCorrupted && share_calm >= kSeedShareClean && s.seconds < kSyntheticRuntimeS,
                 fmt("p=%.1f: z>3 in %d/%d seeds; p=0: |z|<3 in %d/%d seeds (per anchor: %zu/%zu and %zu/%zu); "
                     "%.1f s for %d seeds x 2 corpora",
                     s.probability, hot, kSeeds, calm, kSeeds, anchors_hot, anchors, anchors_calm, anchors, s.seconds,
                     kSeeds));
}

Outcome criterion_6(const Sweep& s) {
  int top = 0;
  for (const auto& r : s.corrupted) {
    const double cut = kTopDecile * static_cast<double>(r.total_articles);
    top += std::all_of(r.anchor_ranks.begin(), r.anchor_ranks.end(),
                       [&](std::size_t k) { return static_cast<double>(k) <= cut; });
  }
  std::vector<double> u;
  for (const auto& r : s.clean)
    for (auto k : r.anchor_ranks) u.push_back((static_cast<double>(k) - 0.5) / static_cast<double>(r.total_articles));
  auto ks = ks_uniform(u);
  return verdict(top / static_cast<double>(kSeeds) >= kSeedShareCorrupted && ks.p_value > kKsAlpha,
                 fmt("all anchors in top decile in %d/%d seeds; clean ranks KS D=%.4f p=%.3f over %zu anchors", top, kSeeds,
                     ks.statistic, ks.p_value, ks.n));
}

Outcome criterion_9(const Sweep& s) {
  long double expected = 0, observed = 0;
  std::size_t volumes = 0, recount_mismatch = 0;
  for (const auto& r : s.corrupted) {
    for (const auto& [own, total, obs, recount] : r.anchor_counts) {
      recount_mismatch += obs != recount;
      if (total < kMinVolumeCitations) continue;
      ++volumes;
      expected += own + s.probability * static_cast<double>(total - own);
      observed += obs;
    }
  }
  const double rel = volumes ? static_cast<double>(std::fabs(observed - expected) / expected) : 1.0;
  return verdict(volumes > 0 && rel < kExpectationTol && recount_mismatch == 0,
                 fmt("%zu volumes with C>=%lld: mean observed %.1f vs expected %.1f (%.2f%% off); recount mismatches %zu",
                     volumes, static_cast<long long>(kMinVolumeCitations),
                     static_cast<double>(observed / std::max<std::size_t>(volumes, 1)),
                     static_cast<double>(expected / std::max<std::size_t>(volumes, 1)), 100 * rel, recount_mismatch));
}

// --- 7 -----------------------------------------------------------------------------

Outcome criterion_7() {
  SynthSpec spec = load_spec("synth_o1.json");
  spec.journals[0].volumes = 6;
  spec.journals[0].first_year = 2008;
  spec.corruption = {CorruptionRule{CorruptionKind::reroute_to_article1, 0.3, std::make_pair(kDefaultCutoffYear, 2100), 0}};
  int ok = 0;
  double worst = 1e300;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    spec.seed = static_cast<std::uint64_t>(seed);
    auto g = build_corpus(spec);
    std::vector<NormalizedHistogram> hs;
    for (const auto& c : synthetic_cohorts(g, spec)) hs.push_back(normalize_cohort(c));
    auto split = temporal_split(hs, kDefaultCutoffYear);
    if (split.pre_empty || split.post_empty) continue;
    const double gap = mean(split.post.anchor_z) - mean(split.pre.anchor_z);
    worst = std::min(worst, gap);
    ok += gap >= kSplitGap;
  }
  return verdict(ok / static_cast<double>(kSeeds) >= kSeedShareCorrupted,
                 fmt("post-pre anchor-z gap >= %.0f in %d/%d seeds (smallest gap %.2f)", kSplitGap, ok, kSeeds, worst));
}

// --- 8 -----------------------------------------------------------------------------

std::string edges_csv(const std::vector<Edge>& edges) {
  std::string s;
  for (const auto& e : edges) s += std::to_string(e.citing) + "," + std::to_string(e.cited) + "\n";
  return s;
}

Outcome criterion_8() {
  std::vector<SynthSpec> specs = {load_spec("synth_o1.json"), load_spec("synth_clean.json"), load_spec("synth_mixed.json")};
  SynthSpec both = load_spec("synth_mixed.json");
  both.corruption.push_back(CorruptionRule{CorruptionKind::reroute_to_pdf_length, 0.2, std::nullopt, 0.5});
  both.corruption.push_back(CorruptionRule{CorruptionKind::reroute_to_article1, 0.5, std::nullopt, 0});
  specs.push_back(both);
  for (int seed = 1; seed <= 20; ++seed) {
    SynthSpec s = load_spec("synth_o1.json");
    s.seed = static_cast<std::uint64_t>(1000 + seed);
    s.corruption.push_back(CorruptionRule{CorruptionKind::reroute_to_pdf_length, 0.1, std::nullopt, 0.3});
    specs.push_back(s);
  }
  std::size_t conserved = 0, replayed = 0;
  for (const auto& spec : specs) {
    auto g = build_corpus(spec);
    auto d = measure_distortion(g);
    conserved += sum(d.true_counts) == sum(d.observed_counts);
    replayed += edges_csv(replay_log(g.true_edges, g.corruption_log)) == edges_csv(g.corrupted_edges);
  }
  return verdict(conserved == specs.size() && replayed == specs.size(),
                 fmt("sum conserved %zu/%zu corpora, log replay byte-identical %zu/%zu", conserved, specs.size(), replayed,
                     specs.size()));
}

// --- 10 ----------------------------------------------------------------------------

Outcome criterion_10() {
  const auto cr = parse_crossref_count(fixture("counts/crossref_work.json"));
  const auto oc = parse_opencitations_count(fixture("counts/opencitations.json"));
  const auto s2 = parse_semantic_scholar_count(fixture("counts/semanticscholar.json"));

  citeaudit::testing::MockApi api;
  const int n = 16;
  for (int i = 0; i < n; ++i) api.set_count("opencitations", "10.5555/rl." + std::to_string(i), i);
  api.set_delay(chr::milliseconds(80));
  FetchPolicy p;
  p.max_concurrent_requests = 2;
  p.other_interval = chr::milliseconds(25);
  p.max_retries = 0;
  p.contact_email = "acceptance@example.org";
  Endpoints e;
  e.crossref = e.open_citations = e.semantic_scholar = api.base_url();
  CitationClient client(p, e, nullptr, make_http_transport());
  std::vector<std::thread> ts;
  for (int i = 0; i < n; ++i)
    ts.emplace_back([&, i] { client.fetch_citation_count("10.5555/rl." + std::to_string(i), CitationSource::open_citations); });
  for (auto& t : ts) t.join();
  auto reqs = api.requests();
  std::vector<chr::steady_clock::time_point> starts;
  for (const auto& r : reqs) starts.push_back(r.start);
  std::sort(starts.begin(), starts.end());
  double min_gap = 1e9;
  for (std::size_t i = 1; i < starts.size(); ++i)
    min_gap = std::min(min_gap, chr::duration<double, std::milli>(starts[i] - starts[i - 1]).count());
  const bool counts_ok = cr == 6476 && oc == 7181 && s2 == 5279;
  const bool limits_ok = api.max_in_flight() <= p.max_concurrent_requests && reqs.size() == static_cast<std::size_t>(n) &&
                         min_gap >= static_cast<double>(p.other_interval.count()) - kIntervalSlackMs;
  return verdict(counts_ok && limits_ok,
                 fmt("counts %lld/%lld/%lld; max in flight %d (cap %d); min start gap %.1f ms (interval %lld ms)",
                     static_cast<long long>(cr), static_cast<long long>(oc), static_cast<long long>(s2),
                     api.max_in_flight(), p.max_concurrent_requests, min_gap,
                     static_cast<long long>(p.other_interval.count())));
}

// --- 11 ----------------------------------------------------------------------------

std::uint64_t dir_digest(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ext) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : files) h = fnv1a(slurp(f), fnv1a(f.filename().string(), h));
  return h;
}

Outcome criterion_11() {
  auto a = scratch_dir("acc_sim_a"), b = scratch_dir("acc_sim_b");
  std::ostringstream log;
  const SimulateOptions oa{config_dir() / "synth_o1.json", std::nullopt, a, false};
  const SimulateOptions ob{config_dir() / "synth_o1.json", std::nullopt, b, false};
  if (cmd_simulate(oa, log) != kExitOk || cmd_simulate(ob, log) != kExitOk) return verdict(false, "simulate failed");
  std::size_t files = 0, same = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    same += slurp(e.path()) == slurp(b / e.path().filename());
  }
  const std::vector<fs::path> csvs = {a / "histogram_synlett.csv", a / "ranks_synlett.csv"};
  auto ra = scratch_dir("acc_svg_a"), rb = scratch_dir("acc_svg_b");
  if (cmd_render(csvs, ra, log) != kExitOk || cmd_render(csvs, rb, log) != kExitOk) return verdict(false, "render failed");
  const auto svg_a = dir_digest(ra, ".svg"), svg_b = dir_digest(rb, ".svg");
  const auto corpus = corpus_digest(a);
  const bool golden = corpus == kGoldenCorpusDigest && svg_a == kGoldenSvgDigest;
  return verdict(files > 0 && same == files && svg_a == svg_b && golden,
                 fmt("run-to-run identical %zu/%zu files; SVGs identical %s; corpus digest %016llx, SVG digest %016llx "
                     "(golden %s)",
                     same, files, svg_a == svg_b ? "yes" : "no", static_cast<unsigned long long>(corpus),
                     static_cast<unsigned long long>(svg_a), golden ? "match" : "MISMATCH"));
}

// --- 12 ----------------------------------------------------------------------------

Outcome criterion_12(bool live) {
  if (!live) return {Outcome::skip, "live check disabled (pass --live or set CITEAUDIT_LIVE=1)"};
  try {
    FetchPolicy p;
    p.max_retries = 2;
    if (const char* m = std::getenv(kContactEmailEnv)) p.contact_email = m;
    CitationClient client(p, Endpoints{}, nullptr, make_http_transport());
    JournalQuery q{"2041-1723", chr::sys_days(chr::year(2025) / 1 / 1), chr::sys_days(chr::year(2025) / 12 / 31), 1000};
    auto listing = client.fetch_journal_listing(q);
    std::vector<ArticleRecord> v16;
    for (const auto& r : listing.records)
      if (r.volume == "16") v16.push_back(r);
    auto anchor = find_anchor(v16, "16");
    auto sel = build_cohort(anchor, v16);
    const bool date_ok = anchor.publication_date && anchor.publication_date->iso() == "2025-01-02";
    const double n = static_cast<double>(sel.comparisons.size());
    const bool size_ok = std::fabs(n - kLiveCohortTarget) <= kLiveCohortTol * kLiveCohortTarget;
    return verdict(date_ok && size_ok && sel.days_extended == 0,
                   fmt("anchor %s dated %s; same-day cohort %zu (target %.0f +/- %.0f%%)", anchor.doi.c_str(),
                       anchor.publication_date ? anchor.publication_date->iso().c_str() : "?", sel.comparisons.size(),
                       kLiveCohortTarget, 100 * kLiveCohortTol));
  } catch (const std::exception& e) {
    return verdict(false, std::string("live audit failed: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  bool live = false;
  if (const char* v = std::getenv("CITEAUDIT_LIVE")) live = std::strcmp(v, "1") == 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--live") == 0) live = true;

  auto guard = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return verdict(false, std::string("exception: ") + e.what());
    }
  };

  std::vector<std::pair<int, Outcome>> results;
  results.emplace_back(1, guard(criterion_1));
  results.emplace_back(2, guard(criterion_2));
  results.emplace_back(3, guard(criterion_3));
  results.emplace_back(4, guard(criterion_4));
  Sweep s;
  try {
    s = sweep();
    results.emplace_back(5, guard([&] { return criterion_5(s); }));
    results.emplace_back(6, guard([&] { return criterion_6(s); }));
  } catch (const std::exception& e) {
    results.emplace_back(5, verdict(false, std::string("exception: ") + e.what()));
    results.emplace_back(6, verdict(false, "seed sweep did not run"));
  }
  results.emplace_back(7, guard(criterion_7));
  results.emplace_back(8, guard(criterion_8));
  results.emplace_back(9, s.corrupted.empty() ? verdict(false, "seed sweep did not run") : guard([&] { return criterion_9(s); }));
  results.emplace_back(10, guard(criterion_10));
  results.emplace_back(11, guard(criterion_11));
  results.emplace_back(12, guard([&] { return criterion_12(live); }));
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  int failed = 0;
  for (const auto& [n, o] : results) {
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
    std::printf("criterion %2d: %s  %s%s\n", n, tag, o.detail.c_str(), n == 12 ? "  [non-gating]" : "");
    if (n != 12 && o.status == Outcome::fail) ++failed;
  }
  std::printf("%d of 11 gating criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
