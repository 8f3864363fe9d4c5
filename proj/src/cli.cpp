#include "tfsmell/cli.hpp"

#include "tfsmell/clustering.hpp"
#include "tfsmell/config.hpp"
#include "tfsmell/harvester.hpp"
#include "tfsmell/scanner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace tfsmell::cli {

using nlohmann::json;

namespace {

struct Globals {
  std::optional<std::string> config;
  std::optional<std::string> catalog;
  std::string format = "text";
  std::optional<std::string> output;
  int verbosity = 0;
};

struct ScanArgs {
  std::string path;
  std::string engine = "ast";
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
};

struct ClusterArgs {
  std::string linkage = "all";
  std::optional<double> threshold;
};

struct HarvestArgs {
  std::string provider;
  std::string dest;
  std::optional<std::string> criteria;
  bool dry_run = false;
  std::optional<std::string> token;
  std::string api_url = "https://api.github.com";
  std::vector<std::string> queries;
  unsigned jobs = 4;
};

struct SampleArgs {
  std::string manifest;
  std::uint64_t seed = 0;
};

std::string version_string() {
  return std::string("tfsmell ") + TFSMELL_VERSION + " (catalog " + builtin_catalog().version + ")";
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string with_newline(std::string s) {
  if (s.empty() || s.back() != '\n') s += '\n';
  return s;
}

std::string catalog_text(const Catalog& catalog) {
  std::ostringstream out;
  out << "catalog " << catalog.version << ", " << catalog.smells.size() << " smells\n";
  for (const auto& s : catalog.smells) {
    out << '\n'
        << to_string(s.id) << "  " << s.name << "\n  category " << s.category << ": " << category_name(s.category)
        << "\n  " << s.summary << "\n  remediation: " << s.remediation << '\n';
  }
  return out.str();
}

json catalog_json(const Catalog& catalog) {
  json smells = json::array();
  for (const auto& s : catalog.smells) {
    smells.push_back({{"id", to_string(s.id)},
                      {"name", s.name},
                      {"category", s.category},
                      {"category_name", std::string(category_name(s.category))},
                      {"attributes",
                       {{"runtime_dependency", s.attributes.runtime_dependency},
                        {"resource_context", s.attributes.resource_context},
                        {"code_dependency", s.attributes.code_dependency},
                        {"inherent_badness", s.attributes.inherent_badness}}},
                      {"summary", s.summary},
                      {"remediation", s.remediation}});
  }
  return {{"version", catalog.version}, {"smells", smells}};
}

std::string node_name(const Dendrogram& d, std::size_t node) {
  if (node < d.leaves.size()) return to_string(d.leaves[node]);
  return "#" + std::to_string(node);
}

std::string cluster_output(const Catalog& catalog, const ClusterArgs& args, bool as_json) {
  std::vector<Linkage> linkages;
  if (args.linkage == "all") {
    linkages = {Linkage::Single, Linkage::Complete, Linkage::Average};
  } else {
    linkages = {parse_linkage(args.linkage)};
  }
  auto sim = similarity_matrix(catalog.smells);
  auto dist = distance_matrix(sim);

  json j;
  std::ostringstream text;
  json rows = json::array();
  text << "similarity\n     ";
  for (auto id : sim.ids) text << std::setw(4) << to_string(id);
  text << '\n';
  for (std::size_t r = 0; r < sim.size(); ++r) {
    json row = json::array();
    text << std::left << std::setw(5) << to_string(sim.ids[r]) << std::right;
    for (std::size_t c = 0; c < sim.size(); ++c) {
      row.push_back(sim.at(r, c));
      text << std::setw(4) << sim.at(r, c);
    }
    rows.push_back(row);
    text << '\n';
  }
  json ids = json::array();
  for (auto id : sim.ids) ids.push_back(to_string(id));
  j["similarity"] = {{"ids", ids}, {"rows", rows}};

  for (auto linkage : linkages) {
    auto dendrogram = agglomerate(dist, linkage);
    auto clusters = args.threshold ? cut(dendrogram, *args.threshold) : categorize(catalog.smells, linkage);
    json merges = json::array();
    text << "\nlinkage " << to_string(linkage) << '\n';
    for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
      const auto& m = dendrogram.merges[k];
      merges.push_back({{"left", m.left}, {"right", m.right}, {"distance", m.distance}, {"size", m.size}});
      text << "  " << node_name(dendrogram, dendrogram.leaves.size() + k) << " = "
           << node_name(dendrogram, m.left) << " + " << node_name(dendrogram, m.right) << " at " << std::fixed
           << std::setprecision(3) << m.distance << " (" << m.size << " leaves)\n";
    }
    json labels = json::object();
    std::map<int, std::vector<std::string>> members;
    for (std::size_t i = 0; i < clusters.leaves.size(); ++i) {
      labels[to_string(clusters.leaves[i])] = clusters.labels[i];
      members[clusters.labels[i]].push_back(to_string(clusters.leaves[i]));
    }
    for (const auto& [label, names] : members) {
      text << "  cluster " << label << ':';
      for (const auto& n : names) text << ' ' << n;
      text << '\n';
    }
    j["linkages"][std::string(to_string(linkage))] = {{"merges", merges}, {"clusters", labels}};
  }
  if (args.threshold) j["threshold"] = *args.threshold;
  return as_json ? j.dump() : text.str();
}

std::map<std::string, std::vector<std::string>> load_sample_manifest(const std::string& path) {
  std::string text = read_text(path);
  json whole = json::parse(text, nullptr, false);
  if (!whole.is_discarded() && whole.is_object() && !whole.contains("type")) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [repo, files] : whole.items()) out[repo] = files.get<std::vector<std::string>>();
    return out;
  }
  return manifest_file_lists(read_manifest(path));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detects sustainability smells in Terraform configurations", "tfsmell"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "detector configuration (JSON)");
  app.add_option("--catalog", g.catalog, "smell catalog (JSON)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json", "sarif"}));
  app.add_option("-o,--output", g.output, "write the report to FILE instead of stdout");
  app.add_flag("-v,--verbose", g.verbosity, "more diagnostics on stderr");

  ScanArgs scan_args;
  auto add_scan_flags = [&](CLI::App* sub) {
    sub->add_option("path", scan_args.path, "file or directory")->required();
    sub->add_option("--engine", scan_args.engine, "detection engine")->check(CLI::IsMember({"ast", "pattern"}));
    sub->add_option("--jobs", scan_args.jobs, "worker threads")->check(CLI::Range(1u, 256u));
  };
  auto* lint = app.add_subcommand("lint", "report smells in one project");
  add_scan_flags(lint);
  auto* scan_cmd = app.add_subcommand("scan", "scan a corpus and report prevalence");
  add_scan_flags(scan_cmd);
  scan_cmd->add_option("--seed", scan_args.seed, "shuffle the work order (output is unchanged)");

  ClusterArgs cluster_args;
  auto* cluster = app.add_subcommand("cluster", "cluster the catalog by attribute vectors");
  cluster->add_option("--linkage", cluster_args.linkage, "linkage criterion")
      ->check(CLI::IsMember({"single", "complete", "average", "all"}));
  cluster->add_option("--threshold", cluster_args.threshold, "cut the dendrogram below this distance");

  HarvestArgs harvest_args;
  auto* harvest_cmd = app.add_subcommand("harvest", "collect Terraform repositories from GitHub");
  harvest_cmd->add_option("--provider", harvest_args.provider, "cloud provider")
      ->required()
      ->check(CLI::IsMember({"aws", "azure", "gcp"}));
  harvest_cmd->add_option("--dest", harvest_args.dest, "download directory")->required();
  harvest_cmd->add_option("--criteria", harvest_args.criteria, "filter criteria (JSON)");
  harvest_cmd->add_flag("--dry-run", harvest_args.dry_run, "search and filter only");
  harvest_cmd->add_option("--token", harvest_args.token, std::string("access token (default: $") + kTokenEnvVar + ")");
  harvest_cmd->add_option("--api-url", harvest_args.api_url, "API base URL");
  harvest_cmd->add_option("--query", harvest_args.queries, "search query (repeatable)");
  harvest_cmd->add_option("--jobs", harvest_args.jobs, "parallel downloads")->check(CLI::Range(1u, 64u));

  auto* catalog_cmd = app.add_subcommand("catalog", "list the smells");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "draw 4-5 files per repository");
  sample->add_option("manifest", sample_args.manifest, "harvest manifest or JSON map repo -> files")->required();
  sample->add_option("--seed", sample_args.seed, "generator seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    if (code == 0) return kExitClean;
    err << app.help();
    return kExitError;
  }

  auto emit = [&](const std::string& text) {
    if (g.output) {
      std::ofstream file(*g.output, std::ios::binary | std::ios::trunc);
      file << with_newline(text);
      if (!file) throw std::runtime_error("cannot write '" + *g.output + "'");
    } else {
      out << with_newline(text);
    }
  };

  try {
    bool scanning = lint->parsed() || scan_cmd->parsed();
    if (g.format == "sarif" && !scanning) {
      throw std::invalid_argument("--format sarif applies to lint and scan only");
    }
    auto loaded = load_config(g.config, g.catalog);
    const auto format = parse_format(g.format);
    const bool as_json = format == ReportFormat::Json;

    if (scanning) {
      ScanOptions options;
      options.engine = parse_engine(scan_args.engine);
      options.jobs = scan_args.jobs;
      options.shuffle_seed = scan_args.seed;
      auto report = scan(scan_args.path, loaded.detectors, options);
      if (g.verbosity > 0) {
        err << "tfsmell: " << report.scanned_files << " files, " << report.parse_failures << " with parse errors, "
            << report.findings.size() << " findings\n";
      }
      std::optional<CorpusStats> stats;
      if (scan_cmd->parsed() && report.scanned_files > 0) stats = prevalence(report, loaded.catalog);
      emit(render(report, stats, format, loaded.catalog));
      return report.findings.empty() ? kExitClean : kExitFindings;
    }
    if (cluster->parsed()) {
      emit(cluster_output(loaded.catalog, cluster_args, as_json));
      return kExitClean;
    }
    if (catalog_cmd->parsed()) {
      emit(as_json ? catalog_json(loaded.catalog).dump() : catalog_text(loaded.catalog));
      return kExitClean;
    }
    if (sample->parsed()) {
      auto set = sample_stratified(load_sample_manifest(sample_args.manifest), sample_args.seed);
      if (as_json) {
        emit(json{{"seed", set.seed}, {"selections", set.selections}, {"total", set.total()}}.dump());
      } else {
        std::ostringstream text;
        for (const auto& [repo, files] : set.selections) {
          for (const auto& f : files) text << repo << '\t' << f << '\n';
        }
        text << set.total() << " files from " << set.selections.size() << " repositories (seed " << set.seed
             << ")\n";
        emit(text.str());
      }
      return kExitClean;
    }
    if (harvest_cmd->parsed()) {
      Credentials creds = harvest_args.token ? Credentials{*harvest_args.token} : Credentials::from_env();
      if (creds.token.empty()) {
        throw std::invalid_argument(std::string("no access token: set ") + kTokenEnvVar + " or pass --token");
      }
      HarvestOptions options;
      options.provider = parse_provider(harvest_args.provider);
      options.queries = harvest_args.queries;
      options.dest = harvest_args.dest;
      options.dry_run = harvest_args.dry_run;
      options.jobs = harvest_args.jobs;
      if (harvest_args.criteria) options.criteria = parse_criteria(read_text(*harvest_args.criteria));
      ClientOptions client_options;
      client_options.base_url = harvest_args.api_url;
      GitHubClient client(creds, client_options);
      auto summary = harvest(client, options);
      json j{{"found", summary.found},         {"kept", summary.kept},
             {"rejected", summary.rejected},   {"skipped", summary.skipped},
             {"files", summary.files},         {"downloads", summary.downloads},
             {"digest_matches", summary.digest_matches}, {"rejections", summary.rejections},
             {"dry_run", options.dry_run}};
      if (as_json) {
        emit(j.dump());
      } else {
        std::ostringstream text;
        text << "found " << summary.found << ", kept " << summary.kept << ", rejected " << summary.rejected
             << ", skipped " << summary.skipped << '\n';
        for (const auto& [reason, n] : summary.rejections) text << "  rejected (" << reason << "): " << n << '\n';
        if (!options.dry_run) {
          text << summary.files << " files, " << summary.downloads << " downloaded, " << summary.digest_matches
               << " unchanged\n";
        }
        emit(text.str());
      }
      return kExitClean;
    }
  } catch (const std::exception& e) {
    err << "tfsmell: error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace tfsmell::cli
