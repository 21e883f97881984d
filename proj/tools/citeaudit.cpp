#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "citeaudit/cli_report.hpp"
#include "citeaudit/error.hpp"

namespace fs = std::filesystem;
using namespace citeaudit;

namespace {

std::vector<CitationSource> parse_sources(const std::vector<std::string>& names) {
  std::vector<CitationSource> out;
  for (const auto& n : names) {
    auto s = citation_source_from_string(n);
    if (!s || *s == CitationSource::synthetic) throw error(errc::config_error, "unknown source '" + n + "'");
    out.push_back(*s);
  }
  return out;
}

std::string env_email() {
  const char* e = std::getenv(kContactEmailEnv);
  return e ? e : "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit article-number citation misattribution"};
  app.require_subcommand(1);

  // audit
  auto* audit = app.add_subcommand("audit", "Run cohort and rank audits for configured journal volumes");
  std::string config_path, out_dir, cache_dir, registry_path;
  bool offline = false, json_out = false;
  std::vector<std::string> source_names;
  int workers = 0;
  bool exclude_anchor = false;
  audit->add_option("--config", config_path, "Audit configuration (JSON)")->required()->check(CLI::ExistingFile);
  audit->add_option("--out", out_dir, "Output directory (overrides config)");
  audit->add_option("--cache", cache_dir, "Cache directory (overrides config)");
  audit->add_option("--registry", registry_path, "Journal registry used to fill missing ISSNs");
  audit->add_option("--source", source_names, "Citation sources (overrides config)");
  audit->add_option("--workers", workers, "Concurrent journal-years");
  audit->add_flag("--offline", offline, "Use only cached data");
  audit->add_flag("--exclude-anchor", exclude_anchor, "Score the anchor against the comparisons' mean and sigma only");

  // check-record
  auto* check = app.add_subcommand("check-record", "Compare one article's RIS / JSON / JATS / Crossref records");
  std::vector<std::string> record_paths;
  check->add_option("files", record_paths, "Record files")->required();
  check->add_flag("--json", json_out, "Machine-readable output");

  // scan-references
  auto* scan = app.add_subcommand("scan-references", "Scan reference strings for page-count locators");
  std::string scan_input, candidates_path;
  bool resolve = false;
  scan->add_option("input", scan_input, "One reference (or JSON object) per line")->required()->check(CLI::ExistingFile);
  scan->add_option("--registry", registry_path, "Journal registry (JSON)");
  scan->add_option("--candidates", candidates_path, "Candidate article records (JSON / JSONL)");
  scan->add_option("--out", out_dir, "Write findings.jsonl here");
  scan->add_option("--cache", cache_dir, "Cache directory for Crossref resolution");
  scan->add_flag("--resolve", resolve, "Resolve volumes through Crossref listings");
  scan->add_flag("--offline", offline, "Resolve from cache only");
  scan->add_flag("--json", json_out, "Print findings as JSON lines");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic corpus and evaluate the detectors");
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  bool no_eval = false;
  sim->add_option("--config,spec", spec_path, "Synthetic corpus spec (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Override the spec seed");
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_flag("--no-eval", no_eval, "Skip detector evaluation");

  // render
  auto* render = app.add_subcommand("render", "Render histogram / rank CSVs to SVG");
  std::vector<std::string> csv_paths;
  render->add_option("csv", csv_paths, "CSV files")->required();
  render->add_option("--out", out_dir, "Output directory (default: next to each CSV)");

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Warm the cache with citation counts");
  std::vector<std::string> dois;
  fetch->add_option("doi", dois, "DOIs");
  fetch->add_option("--config", config_path, "Audit configuration; warms every journal-year listing");
  fetch->add_option("--source", source_names, "Citation sources");
  fetch->add_option("--cache", cache_dir, "Cache directory");
  fetch->add_flag("--offline", offline, "Read the cache only");
  fetch->add_flag("--json", json_out, "JSON lines output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*audit) {
      fs::path path(config_path);
      std::vector<JournalEntry> registry;
      if (!registry_path.empty()) registry = load_registry(registry_path);
      AuditConfig cfg = AuditConfig::from_json(read_json_file(path), path.parent_path(), registry);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
      if (!source_names.empty()) cfg.sources = parse_sources(source_names);
      if (workers > 0) cfg.workers = workers;
      if (offline) cfg.offline = true;
      if (exclude_anchor) cfg.include_anchor = false;
      cfg.validate();
      return cmd_audit(cfg, nullptr, std::cerr);
    }
    if (*check) {
      std::vector<fs::path> paths(record_paths.begin(), record_paths.end());
      return cmd_check_record(paths, json_out, std::cout, std::cerr);
    }
    if (*scan) {
      ScanOptions o;
      o.input = scan_input;
      if (!registry_path.empty()) o.registry = fs::path(registry_path);
      if (!candidates_path.empty()) o.candidates = fs::path(candidates_path);
      if (!out_dir.empty()) o.output_dir = fs::path(out_dir);
      o.json_output = json_out;
      if (resolve || offline) {
        FetchPolicy policy;
        policy.offline = offline;
        policy.contact_email = env_email();
        auto cache = std::make_shared<Cache>(cache_dir.empty() ? ".citeaudit-cache" : cache_dir, policy.cache_ttl);
        o.client = std::make_shared<CitationClient>(policy, Endpoints{}, cache);
      }
      return cmd_scan_references(o, std::cout, std::cerr);
    }
    if (*sim) {
      SimulateOptions o;
      o.spec = spec_path;
      o.seed = seed;
      o.output_dir = out_dir;
      o.evaluate = !no_eval;
      return cmd_simulate(o, std::cerr);
    }
    if (*render) {
      std::vector<fs::path> paths(csv_paths.begin(), csv_paths.end());
      int rc = kExitOk;
      if (!out_dir.empty()) return cmd_render(paths, out_dir, std::cerr);
      for (const auto& p : paths) {
        int r = cmd_render({p}, p.parent_path().empty() ? fs::path(".") : p.parent_path(), std::cerr);
        if (r != kExitOk) rc = r;
      }
      return rc;
    }
    if (*fetch) {
      FetchPolicy policy;
      Endpoints endpoints;
      fs::path cache = cache_dir.empty() ? ".citeaudit-cache" : cache_dir;
      std::optional<AuditConfig> cfg;
      if (!config_path.empty()) {
        fs::path path(config_path);
        cfg = AuditConfig::from_json(read_json_file(path), path.parent_path());
        policy = cfg->policy;
        endpoints = cfg->endpoints;
        if (cache_dir.empty()) cache = cfg->cache_dir;
      }
      if (policy.contact_email.empty()) policy.contact_email = env_email();
      policy.offline = offline || (cfg && cfg->offline);
      CitationClient client(policy, endpoints, std::make_shared<Cache>(cache, policy.cache_ttl));
      FetchOptions o;
      o.dois = dois;
      if (!source_names.empty()) o.sources = parse_sources(source_names);
      else if (cfg) o.sources = cfg->sources;
      o.json_output = json_out;
      int warmed = 0;
      if (cfg) {
        for (const auto& j : cfg->journals) {
          for (const auto& [label, year] : j.volume_years) {
            namespace chr = std::chrono;
            JournalQuery q{j.issn, chr::sys_days{chr::year{year} / chr::January / 1},
                           chr::sys_days{chr::year{year} / chr::December / 31}};
            try {
              auto listing = client.fetch_journal_listing(q);
              std::cerr << j.name << " " << year << ": " << listing.records.size() << " records\n";
              ++warmed;
            } catch (const error& e) {
              std::cerr << j.name << " " << year << ": " << e.what() << "\n";
            }
          }
        }
      }
      int rc = cmd_fetch(client, o, std::cout, std::cerr);
      return (cfg && warmed > 0 && dois.empty()) ? kExitOk : rc;
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == errc::config_error || e.code() == errc::spec_error ? kExitConfig : kExitNothing;
  }
  return kExitConfig;
}
