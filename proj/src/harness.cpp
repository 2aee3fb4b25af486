#include "zcoref/harness.hpp"

#include <algorithm>
#include <cmath>

namespace zcoref {
namespace {

std::vector<std::string> stripped_tokens(const Sentence& sent) {
  std::vector<std::string> out;
  for (const TokenRow& r : sent.rows) {
    if (!r.is_pro()) out.push_back(r.word);
  }
  return out;
}

bool doc_has_pro(const Document& doc) {
  for (const auto& part : doc.parts) {
    for (const Sentence& sent : part) {
      for (const TokenRow& r : sent.rows) {
        if (r.is_pro()) return true;
      }
    }
  }
  return false;
}

void check_gap_valid(const Document& doc, const Azp& a) {
  if (a.part < 0 || a.part >= static_cast<int>(doc.parts.size()) || a.sentence < 0 ||
      a.sentence >= static_cast<int>(doc.parts[a.part].size())) {
    throw ResolverContractViolation("identified gap outside the document");
  }
  const int len = static_cast<int>(stripped_tokens(doc.parts[a.part][a.sentence]).size());
  if (a.gap_index < 0 || a.gap_index > len) {
    throw ResolverContractViolation("identified gap index out of range");
  }
}

double clamp_prob(double p) {
  return std::min(std::max(p, kProbEpsilon), 1.0 - kProbEpsilon);
}

}  // namespace

GapContext gap_context(const Document& doc, const Azp& azp) {
  check_gap_valid(doc, azp);
  const std::vector<std::string> tokens = stripped_tokens(doc.parts[azp.part][azp.sentence]);
  GapContext ctx;
  if (azp.gap_index > 0) ctx.prev = tokens[azp.gap_index - 1];
  if (azp.gap_index < static_cast<int>(tokens.size())) ctx.next = tokens[azp.gap_index];
  return ctx;
}

std::vector<AzpCandidate> build_candidates(const Document& doc, const ClusterSet& clusters,
                                           const Azp& azp, const HarnessConfig& config) {
  const GapContext ctx = gap_context(doc, azp);
  std::vector<AzpCandidate> out;
  for (const Cluster& c : clusters.clusters) {
    bool has_overt = std::any_of(c.members.begin(), c.members.end(),
                                 [](const Member& m) { return is_mention(m); });
    if (!has_overt) continue;
    AzpCandidate cand;
    cand.cluster_id = c.id;
    cand.representative = represent_cluster(c, config.cluster_rep, azp);
    cand.features = assemble_azp_features(azp, cand.representative, ctx, config.embed,
                                          config.buckets);
    // representative embedding: mean over the span's tokens
    const std::vector<std::string> tokens =
        stripped_tokens(doc.parts[cand.representative.part][cand.representative.sentence]);
    Embedding rep_embed;
    int n = 0;
    for (int i = cand.representative.start;
         i <= cand.representative.end && i < static_cast<int>(tokens.size()); ++i) {
      Embedding e = config.embed(tokens[i]);
      if (rep_embed.empty()) rep_embed.assign(e.size(), 0.0);
      for (size_t k = 0; k < e.size(); ++k) rep_embed[k] += e[k];
      ++n;
    }
    if (n > 0) {
      for (double& v : rep_embed) v /= n;
    }
    cand.pair_input = concat_pair(rep_embed, cand.features, config.buckets);
    out.push_back(std::move(cand));
  }
  return out;
}

ClusterSet run_pipeline(const Document& doc, CorefResolver& coref, AzpIdentifier& ident,
                        AzpResolver& azp_res, const HarnessConfig& config,
                        PipelineDiagnostics* diagnostics) {
  if (doc_has_pro(doc)) {
    throw Error("run_pipeline input must not contain *pro* rows");
  }
  ClusterSet clusters = coref.resolve(doc);
  clusters.sort_members();
  clusters.check_partition();

  std::vector<Azp> azps = ident.identify(doc);
  std::set<Azp> seen;
  for (const Azp& a : azps) {
    check_gap_valid(doc, a);
    if (!seen.insert(a).second) {
      throw ResolverContractViolation("identifier returned a duplicate gap");
    }
  }

  for (const Azp& a : azps) {
    std::vector<AzpCandidate> candidates = build_candidates(doc, clusters, a, config);
    if (candidates.empty()) {
      if (diagnostics) diagnostics->no_candidates.push_back(a);
      continue;
    }
    std::optional<int> picked = azp_res.resolve(a, candidates);
    if (!picked) {
      if (diagnostics) diagnostics->abstained.push_back(a);
      continue;
    }
    bool valid = std::any_of(candidates.begin(), candidates.end(),
                             [&](const AzpCandidate& c) { return c.cluster_id == *picked; });
    if (!valid) {
      throw ResolverContractViolation("AZP resolver returned a non-candidate cluster id");
    }
    for (Cluster& c : clusters.clusters) {
      if (c.id == *picked) c.members.push_back(Member{a});
    }
  }
  clusters.sort_members();
  clusters.check_partition();
  return clusters;
}

Document run_joint_train_view(const Document& doc, int* azp_mentions_seen) {
  if (azp_mentions_seen) {
    *azp_mentions_seen = 0;
    for (const auto& part : doc.parts) {
      for (const Sentence& sent : part) {
        for (const TokenRow& r : sent.rows) {
          if (r.is_pro()) ++*azp_mentions_seen;
        }
      }
    }
  }
  return doc;
}

JointTestResult run_joint_test(const Document& doc, AzpIdentifier& ident, CorefResolver& coref) {
  if (doc_has_pro(doc)) {
    throw Error("run_joint_test input must not contain *pro* rows");
  }
  std::vector<Azp> gaps = ident.identify(doc);
  std::set<Azp> seen;
  for (const Azp& g : gaps) {
    check_gap_valid(doc, g);
    if (!seen.insert(g).second) {
      throw ResolverContractViolation("identifier returned a duplicate gap");
    }
  }

  JointTestResult result;
  result.tagged = insert_untagged_pros(doc, gaps, &result.index_map);
  result.clusters = coref.resolve(result.tagged);
  result.clusters.sort_members();
  result.clusters.check_partition();
  return result;
}

ClusterSet GoldColumnCoref::resolve(const Document& doc) { return extract_mentions(doc); }

OracleAzpResolver::OracleAzpResolver(const ClusterSet& gold) {
  for (const Cluster& c : gold.clusters) {
    std::set<PosKey> overt;
    for (const Member& m : c.members) {
      if (is_mention(m)) overt.insert(pos_key(m));
    }
    for (const Member& m : c.members) {
      if (is_azp(m)) gold_overt_[std::get<Azp>(m)] = overt;
    }
  }
}

std::optional<int> OracleAzpResolver::resolve(const Azp& azp,
                                              const std::vector<AzpCandidate>& candidates) {
  auto it = gold_overt_.find(azp);
  if (it == gold_overt_.end()) return std::nullopt;
  for (const AzpCandidate& c : candidates) {
    if (it->second.count(pos_key(Member{c.representative}))) return c.cluster_id;
  }
  return std::nullopt;
}

std::vector<Azp> baseline_identify_verb_gaps(const Document& doc, const GapClassifier& classifier,
                                             const std::set<std::string>& verb_prefixes) {
  std::vector<Azp> out;
  for (size_t p = 0; p < doc.parts.size(); ++p) {
    for (size_t s = 0; s < doc.parts[p].size(); ++s) {
      int idx = 0;
      for (const TokenRow& r : doc.parts[p][s].rows) {
        if (r.is_pro()) continue;
        bool verb = std::any_of(verb_prefixes.begin(), verb_prefixes.end(),
                                [&](const std::string& pre) { return r.pos.rfind(pre, 0) == 0; });
        if (verb) {
          Azp gap{static_cast<int>(p), static_cast<int>(s), idx + 1};
          if (!classifier || classifier(doc, gap)) out.push_back(gap);
        }
        ++idx;
      }
    }
  }
  return out;
}

std::optional<int> baseline_resolve_nearest(const Azp& azp,
                                            const std::vector<AzpCandidate>& candidates) {
  const PosKey anchor = pos_key(Member{azp});
  std::optional<int> best;
  PosKey best_key{};
  for (const AzpCandidate& c : candidates) {
    const PosKey k = pos_key(Member{c.representative});
    if (!(k < anchor)) continue;
    if (!best || k > best_key || (k == best_key && c.cluster_id < *best)) {
      best = c.cluster_id;
      best_key = k;
    }
  }
  return best;
}

double loss_bce(const std::vector<int>& labels, const std::vector<double>& probs) {
  if (labels.size() != probs.size()) throw LengthMismatch("labels/probs length mismatch");
  if (labels.empty()) throw EmptyInput("empty inputs to loss_bce");
  double sum = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    sum += labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  return -sum / static_cast<double>(labels.size());
}

std::vector<double> grad_bce(const std::vector<int>& labels, const std::vector<double>& probs) {
  if (labels.size() != probs.size()) throw LengthMismatch("labels/probs length mismatch");
  if (labels.empty()) throw EmptyInput("empty inputs to grad_bce");
  const double n = static_cast<double>(labels.size());
  std::vector<double> g(labels.size(), 0.0);
  for (size_t i = 0; i < labels.size(); ++i) {
    const double p = probs[i];
    if (p <= kProbEpsilon || p >= 1.0 - kProbEpsilon) continue;  // clamped region
    g[i] = labels[i] ? -1.0 / (p * n) : 1.0 / ((1.0 - p) * n);
  }
  return g;
}

double loss_azp_resolution(const ProbabilityTable& table, const std::vector<std::set<int>>& gold) {
  if (table.size() != gold.size()) throw MissingGold("gold entries do not cover all instances");
  double loss = 0.0;
  for (size_t t = 0; t < table.size(); ++t) {
    if (table[t].empty()) throw EmptyInput("instance with no candidates");
    bool found = false;
    for (const auto& [id, p] : table[t]) {
      if (gold[t].count(id)) {
        loss -= std::log(clamp_prob(p));
        found = true;
      }
    }
    if (!found) throw MissingGold("no candidate matches gold for instance " + std::to_string(t));
  }
  return loss;
}

std::vector<std::vector<double>> grad_azp_resolution(const ProbabilityTable& table,
                                                     const std::vector<std::set<int>>& gold) {
  if (table.size() != gold.size()) throw MissingGold("gold entries do not cover all instances");
  std::vector<std::vector<double>> g(table.size());
  for (size_t t = 0; t < table.size(); ++t) {
    g[t].assign(table[t].size(), 0.0);
    for (size_t j = 0; j < table[t].size(); ++j) {
      const auto& [id, p] = table[t][j];
      if (gold[t].count(id) && p > kProbEpsilon && p < 1.0 - kProbEpsilon) {
        g[t][j] = -1.0 / p;
      }
    }
  }
  return g;
}

double loss_coref_marginal(const ProbabilityTable& table, const std::vector<std::set<int>>& gold) {
  if (table.size() != gold.size()) throw LengthMismatch("gold entries do not cover all instances");
  double loss = 0.0;
  for (size_t i = 0; i < table.size(); ++i) {
    if (table[i].empty()) throw EmptyInput("instance with no antecedent candidates");
    double mass = 0.0;
    for (const auto& [id, p] : table[i]) {
      if (gold[i].count(id)) mass += p;
    }
    // unreachable gold antecedents score via the clamped log, not an exception
    loss -= std::log(std::max(mass, kProbEpsilon));
  }
  return loss;
}

std::vector<std::vector<double>> grad_coref_marginal(const ProbabilityTable& table,
                                                     const std::vector<std::set<int>>& gold) {
  if (table.size() != gold.size()) throw LengthMismatch("gold entries do not cover all instances");
  std::vector<std::vector<double>> g(table.size());
  for (size_t i = 0; i < table.size(); ++i) {
    g[i].assign(table[i].size(), 0.0);
    double mass = 0.0;
    for (const auto& [id, p] : table[i]) {
      if (gold[i].count(id)) mass += p;
    }
    if (mass <= kProbEpsilon) continue;
    for (size_t j = 0; j < table[i].size(); ++j) {
      if (gold[i].count(table[i][j].first)) g[i][j] = -1.0 / mass;
    }
  }
  return g;
}

}  // namespace zcoref
