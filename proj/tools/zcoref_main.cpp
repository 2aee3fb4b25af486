#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "zcoref/conll.hpp"
#include "zcoref/harness.hpp"
#include "zcoref/json_io.hpp"
#include "zcoref/merge.hpp"
#include "zcoref/onf.hpp"
#include "zcoref/scoring.hpp"
#include "zcoref/subprocess.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace zcoref;

namespace {

// An explicit file is taken as-is; directories are filtered by filename
// suffix (matching e.g. both .conll and .v4_gold_conll).
std::vector<fs::path> list_files(const fs::path& root, const std::string& suffix) {
  std::vector<fs::path> out;
  if (fs::is_regular_file(root)) {
    out.push_back(root);
  } else if (fs::is_directory(root)) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().filename().string().ends_with(suffix)) {
        out.push_back(entry.path());
      }
    }
  }
  std::sort(out.begin(), out.end());  // deterministic traversal
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string basename_of(const std::string& doc_id) {
  size_t slash = doc_id.find_last_of('/');
  return slash == std::string::npos ? doc_id : doc_id.substr(slash + 1);
}

std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::istringstream ss(cmd);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

DistanceBuckets parse_buckets(const std::string& spec) {
  DistanceBuckets b;
  if (spec.empty()) return b;
  b.thresholds.clear();
  std::istringstream ss(spec);
  std::string piece;
  while (std::getline(ss, piece, ',')) b.thresholds.push_back(std::stoi(piece));
  if (b.thresholds.empty() || !std::is_sorted(b.thresholds.begin(), b.thresholds.end())) {
    throw Error("--buckets must be a non-empty ascending list");
  }
  return b;
}

// scoring over matched doc pairs, aggregating counts before ratio-taking
ScoreReport score_documents(const std::vector<Document>& key_docs,
                            const std::vector<Document>& response_docs, AzpHitMode hit_mode,
                            bool include_pro) {
  std::map<std::string, const Document*> by_id;
  for (const Document& d : key_docs) by_id[d.doc_id] = &d;
  PairCounts muc, b3, ceaf, azp;
  for (const Document& resp : response_docs) {
    auto it = by_id.find(resp.doc_id);
    if (it == by_id.end()) throw Error("response document '" + resp.doc_id + "' not in key");
    ClusterSet key_set = extract_mentions(*it->second);
    ClusterSet resp_set = extract_mentions(resp);

    std::vector<AzpKeyEntry> key_azps = azp_entries(key_set);
    std::vector<AzpKeyEntry> resp_azps = azp_entries(resp_set);
    std::vector<AzpResolutionRecord> records;
    for (const AzpKeyEntry& e : resp_azps) records.push_back({e.position, e.gold_cluster});
    azp += azp_counts(key_azps, records, key_set, resp_set, hit_mode);

    ClusterSet key_generic = include_pro ? key_set : without_azps(key_set);
    ClusterSet resp_generic = include_pro ? resp_set : without_azps(resp_set);
    muc += muc_counts(key_generic, resp_generic);
    b3 += b_cubed_counts(key_generic, resp_generic);
    ceaf += ceaf_phi4_counts(key_generic, resp_generic);
  }
  ScoreReport report;
  report.muc = muc.triple();
  report.b_cubed = b3.triple();
  report.ceaf_phi4 = ceaf.triple();
  report.conll_avg_f1 = conll_average(report.muc, report.b_cubed, report.ceaf_phi4);
  report.azp = azp.triple();
  return report;
}

struct MergedFile {
  fs::path relative;
  std::string content;
  json rejects = json::array();
  std::vector<std::string> unmatched;
};

int cmd_merge(const std::string& conll_path, const std::string& onf_path,
              const std::string& out_dir, const std::string& reject_log, int jobs) {
  const std::vector<fs::path> conll_files = list_files(conll_path, "conll");
  const std::vector<fs::path> onf_files = list_files(onf_path, "onf");

  std::map<std::string, OnfDocument> onf_by_key;
  for (const fs::path& f : onf_files) {
    OnfDocument d = parse_onf(read_file(f), f.stem().string());
    onf_by_key[basename_of(d.doc_id)] = d;
    if (d.doc_id != f.stem().string()) onf_by_key[d.doc_id] = std::move(d);
  }

  std::vector<MergedFile> results(conll_files.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < conll_files.size(); i = next.fetch_add(1)) {
      try {
        std::vector<Document> docs = parse_conll(read_file(conll_files[i]));
        std::vector<Document> merged;
        for (const Document& doc : docs) {
          auto it = onf_by_key.find(doc.doc_id);
          if (it == onf_by_key.end()) it = onf_by_key.find(basename_of(doc.doc_id));
          if (it == onf_by_key.end()) {
            results[i].unmatched.push_back(doc.doc_id);
            merged.push_back(doc);
            continue;
          }
          MergeResult r = plan_merge(it->second, doc);
          merged.push_back(apply_merge(r.plan, doc));
          for (const json& rec : rejects_to_json(doc.doc_id, r.rejects)) {
            results[i].rejects.push_back(rec);
          }
        }
        results[i].relative = conll_files[i].filename();
        results[i].content = write_conll(merged);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          first_error = conll_files[i].string() + ": " + e.what();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (failed) {
    std::cerr << "error: " << first_error << "\n";
    return 1;
  }

  std::vector<std::string> unmatched;
  json all_rejects = json::array();
  for (const MergedFile& r : results) {
    unmatched.insert(unmatched.end(), r.unmatched.begin(), r.unmatched.end());
    for (const json& rec : r.rejects) all_rejects.push_back(rec);
  }
  if (!unmatched.empty()) {
    std::cerr << "error: documents without an ONF partner:\n";
    for (const std::string& id : unmatched) std::cerr << "  " << id << "\n";
    return 1;
  }
  for (const MergedFile& r : results) write_file(fs::path(out_dir) / r.relative, r.content);
  const fs::path reject_path =
      reject_log.empty() ? fs::path(out_dir) / "rejects.json" : fs::path(reject_log);
  write_file(reject_path, all_rejects.dump(2) + "\n");
  std::cerr << "merged " << conll_files.size() << " file(s), " << all_rejects.size()
            << " rejected AZP chain(s)\n";
  return 0;
}

int cmd_stats(const std::string& conll_path) {
  std::vector<Document> docs;
  const std::vector<fs::path> files = list_files(conll_path, "conll");
  for (const fs::path& f : files) {
    std::vector<Document> parsed = parse_conll(read_file(f));
    docs.insert(docs.end(), parsed.begin(), parsed.end());
  }
  if (docs.empty()) std::cerr << "warning: no documents found under " << conll_path << "\n";
  CorpusStats s = corpus_stats(docs);
  json out{{"documents", s.documents},
           {"sentences", s.sentences},
           {"words", s.words},
           {"azps", s.azps}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

json config_echo(AzpHitMode hit_mode, bool include_pro, const std::string& cluster_rep,
                 const std::string& buckets, long seed) {
  return json{{"azp_hit", hit_mode == AzpHitMode::position_only ? "position" : "entity"},
              {"include_pro_in_coref", include_pro},
              {"cluster_rep", cluster_rep},
              {"buckets", buckets},
              {"seed", seed}};
}

int cmd_score(const std::string& key_path, const std::string& response_path, AzpHitMode hit_mode,
              bool include_pro, long seed) {
  std::vector<Document> key = parse_conll(read_file(key_path));
  std::vector<Document> response = parse_conll(read_file(response_path));
  ScoreReport report = score_documents(key, response, hit_mode, include_pro);
  json out = json::parse(report_to_json(report));
  out["config"] = config_echo(hit_mode, include_pro, "", "", seed);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_resolve(const std::string& input_path, const std::string& mode,
                const std::string& out_path, const std::string& key_path,
                const std::string& resolver, const std::string& coref_cmd,
                const std::string& ident_cmd, const std::string& cluster_rep,
                const std::string& buckets_spec, AzpHitMode hit_mode, bool include_pro,
                long seed) {
  std::vector<Document> inputs = parse_conll(read_file(input_path));

  std::vector<Document> key_docs;
  std::map<std::string, ClusterSet> gold;
  if (!key_path.empty()) {
    key_docs = parse_conll(read_file(key_path));
    for (const Document& d : key_docs) gold[d.doc_id] = extract_mentions(d);
  }
  if (resolver == "oracle" && key_path.empty()) {
    std::cerr << "error: --resolver oracle requires --key\n";
    return 1;
  }

  HarnessConfig config;
  config.cluster_rep = cluster_rep == "first" ? ClusterRep::first_mention : ClusterRep::last_mention;
  config.buckets = parse_buckets(buckets_spec);
  config.seed = static_cast<uint64_t>(seed);
  config.embed = hash_embedder(16, config.seed);

  std::vector<Document> outputs;
  json diagnostics = json::array();
  for (const Document& doc : inputs) {
    std::unique_ptr<CorefResolver> coref;
    std::unique_ptr<AzpIdentifier> ident;
    std::unique_ptr<AzpResolver> azp_res;
    const ClusterSet* doc_gold = gold.count(doc.doc_id) ? &gold[doc.doc_id] : nullptr;

    if (!coref_cmd.empty()) {
      coref = std::make_unique<SubprocessCoref>(split_command(coref_cmd));
    } else if (resolver == "oracle") {
      if (!doc_gold) {
        std::cerr << "error: no gold document for '" << doc.doc_id << "'\n";
        return 1;
      }
      coref = std::make_unique<FixedCoref>(mode == "pipeline" ? without_azps(*doc_gold) : *doc_gold);
    } else {
      coref = std::make_unique<GoldColumnCoref>();
    }
    if (!ident_cmd.empty()) {
      ident = std::make_unique<SubprocessAzpIdentifier>(split_command(ident_cmd));
    } else if (resolver == "oracle") {
      std::vector<Azp> gold_gaps;
      for (const AzpKeyEntry& e : azp_entries(*doc_gold)) gold_gaps.push_back(e.position);
      ident = std::make_unique<FixedAzpIdentifier>(std::move(gold_gaps));
    } else {
      ident = std::make_unique<VerbGapIdentifier>();
    }
    if (resolver == "oracle") {
      azp_res = std::make_unique<OracleAzpResolver>(*doc_gold);
    } else {
      azp_res = std::make_unique<NearestClusterResolver>();
    }

    ClusterSet clusters;
    Document tagged;
    if (mode == "pipeline") {
      PipelineDiagnostics diag;
      clusters = run_pipeline(doc, *coref, *ident, *azp_res, config, &diag);
      std::vector<Azp> resolved_gaps;
      for (const Cluster& c : clusters.clusters) {
        for (const Member& m : c.members) {
          if (is_azp(m)) resolved_gaps.push_back(std::get<Azp>(m));
        }
      }
      tagged = insert_untagged_pros(doc, resolved_gaps);
      diagnostics.push_back(json{{"doc_id", doc.doc_id},
                                 {"abstained", gaps_to_json(diag.abstained)},
                                 {"no_candidates", gaps_to_json(diag.no_candidates)}});
    } else if (mode == "joint") {
      JointTestResult r = run_joint_test(doc, *ident, *coref);
      clusters = r.clusters;
      // keep only tagged gaps that ended up clustered? no: output every tagged
      // gap; unclustered pros simply carry no coref tag
      tagged = r.tagged;
    } else {
      std::cerr << "error: --mode must be pipeline or joint\n";
      return 1;
    }
    outputs.push_back(encode_mentions(clusters, tagged));
  }

  if (!out_path.empty()) write_file(out_path, write_conll(outputs));

  json report{{"config", config_echo(hit_mode, include_pro, cluster_rep, buckets_spec, seed)},
              {"mode", mode},
              {"diagnostics", diagnostics}};
  if (!key_docs.empty()) {
    ScoreReport scores = score_documents(key_docs, outputs, hit_mode, include_pro);
    report["scores"] = json::parse(report_to_json(scores));
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

struct Finding {
  std::string doc_id;
  std::string kind;
  std::string detail;
};

int cmd_validate(const std::string& path, bool as_json) {
  std::vector<Finding> findings;
  int exit_code = 0;
  for (const fs::path& f : list_files(path, "conll")) {
    std::vector<Document> docs;
    try {
      docs = parse_conll(read_file(f));
    } catch (const UnbalancedCorefBrackets& e) {
      findings.push_back({f.string(), "unbalanced_coref_bracket", e.what()});
      exit_code = std::max(exit_code, 2);
      continue;
    } catch (const std::exception& e) {
      findings.push_back({f.string(), "parse_error", e.what()});
      exit_code = std::max(exit_code, 2);
      continue;
    }
    for (const Document& doc : docs) {
      bool extended = false;
      for (const auto& part : doc.parts) {
        for (const Sentence& sent : part) {
          for (const TokenRow& row : sent.rows) {
            if (row.is_pro()) extended = true;
            size_t stars = std::count(row.parse_bit.begin(), row.parse_bit.end(), '*');
            if (stars != 1) {
              findings.push_back({doc.doc_id, "parse_bit_placeholder",
                                  "word " + std::to_string(row.word_number) + " has " +
                                      std::to_string(stars) + " '*' placeholders"});
            }
          }
        }
      }
      ClusterSet clusters = extract_mentions(doc);
      for (const Cluster& c : clusters.clusters) {
        const bool all_azp = std::all_of(c.members.begin(), c.members.end(),
                                         [](const Member& m) { return is_azp(m); });
        if (all_azp) {
          findings.push_back({doc.doc_id, "azp_only_chain", "chain " + std::to_string(c.id)});
        } else if (extended && c.members.size() == 1) {
          findings.push_back({doc.doc_id, "singleton_chain",
                              "chain " + std::to_string(c.id) + " in extended file"});
        }
      }
    }
  }
  if (!findings.empty()) exit_code = std::max(exit_code, 1);
  if (as_json) {
    json out = json::array();
    for (const Finding& f : findings) {
      out.push_back(json{{"doc_id", f.doc_id}, {"kind", f.kind}, {"detail", f.detail}});
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (const Finding& f : findings) {
      std::cout << f.doc_id << ": " << f.kind << ": " << f.detail << "\n";
    }
    if (findings.empty()) std::cout << "clean\n";
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arabic zero-pronoun extended CoNLL-2012 toolkit"};
  app.require_subcommand(1);

  std::string conll_path, onf_path, out_path, reject_log;
  std::string key_path, response_path;
  std::string mode = "pipeline", resolver = "baseline", coref_cmd, ident_cmd;
  std::string cluster_rep = "last", buckets = "0,1,2,4,8", azp_hit = "entity";
  bool include_pro = true;
  bool json_output = false;
  long seed = 0;
  int jobs = 1;

  CLI::App* merge = app.add_subcommand("merge", "inject ONF zero pronouns into CoNLL files");
  merge->add_option("--conll", conll_path, "CoNLL file or directory")->required();
  merge->add_option("--onf", onf_path, "ONF file or directory")->required();
  merge->add_option("--out", out_path, "output directory")->required();
  merge->add_option("--reject-log", reject_log, "reject log path (default <out>/rejects.json)");
  merge->add_option("--jobs", jobs, "parallel file workers");

  CLI::App* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("--conll", conll_path, "CoNLL file or directory")->required();

  CLI::App* score = app.add_subcommand("score", "score response against key");
  score->add_option("--key", key_path)->required();
  score->add_option("--response", response_path)->required();
  score->add_option("--azp-hit", azp_hit, "position|entity");
  score->add_option("--include-pro-in-coref", include_pro, "include *pro* in generic metrics");
  score->add_option("--seed", seed);

  CLI::App* resolve = app.add_subcommand("resolve", "run pipeline or joint resolution");
  resolve->add_option("--conll", conll_path, "input CoNLL file (no *pro* rows)")->required();
  resolve->add_option("--mode", mode, "pipeline|joint");
  resolve->add_option("--out", out_path, "extended CoNLL output path");
  resolve->add_option("--key", key_path, "gold extended CoNLL for scoring/oracles");
  resolve->add_option("--resolver", resolver, "baseline|oracle");
  resolve->add_option("--coref-cmd", coref_cmd, "subprocess coreference resolver command");
  resolve->add_option("--ident-cmd", ident_cmd, "subprocess AZP identifier command");
  resolve->add_option("--cluster-rep", cluster_rep, "first|last");
  resolve->add_option("--buckets", buckets, "distance bucket thresholds");
  resolve->add_option("--azp-hit", azp_hit, "position|entity");
  resolve->add_option("--include-pro-in-coref", include_pro);
  resolve->add_option("--seed", seed);

  CLI::App* validate = app.add_subcommand("validate", "check invariants without modifying files");
  validate->add_option("path", conll_path, "CoNLL file or directory")->required();
  validate->add_flag("--json", json_output, "JSON findings");

  CLI11_PARSE(app, argc, argv);

  const AzpHitMode hit_mode =
      azp_hit == "position" ? AzpHitMode::position_only : AzpHitMode::position_and_entity;

  try {
    if (merge->parsed()) return cmd_merge(conll_path, onf_path, out_path, reject_log, jobs);
    if (stats->parsed()) return cmd_stats(conll_path);
    if (score->parsed()) return cmd_score(key_path, response_path, hit_mode, include_pro, seed);
    if (resolve->parsed()) {
      return cmd_resolve(conll_path, mode, out_path, key_path, resolver, coref_cmd, ident_cmd,
                         cluster_rep, buckets, hit_mode, include_pro, seed);
    }
    if (validate->parsed()) return cmd_validate(conll_path, json_output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
