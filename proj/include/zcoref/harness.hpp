#ifndef ZCOREF_HARNESS_HPP
#define ZCOREF_HARNESS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "zcoref/conll.hpp"
#include "zcoref/core.hpp"
#include "zcoref/merge.hpp"

namespace zcoref {

struct ResolverContractViolation : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct MissingGold : Error {
  using Error::Error;
};

class CorefResolver {
 public:
  virtual ~CorefResolver() = default;
  virtual ClusterSet resolve(const Document& doc) = 0;
  virtual bool thread_safe() const { return false; }
};

class AzpIdentifier {
 public:
  virtual ~AzpIdentifier() = default;
  virtual std::vector<Azp> identify(const Document& doc) = 0;
  virtual bool thread_safe() const { return false; }
};

// One candidate offered to an AZP resolver.
struct AzpCandidate {
  int cluster_id = 0;
  Mention representative;
  AzpFeatures features;
  Embedding pair_input;  // concat(cluster rep embedding, features)
};

class AzpResolver {
 public:
  virtual ~AzpResolver() = default;
  // nullopt = abstain
  virtual std::optional<int> resolve(const Azp& azp, const std::vector<AzpCandidate>& candidates) = 0;
};

struct HarnessConfig {
  ClusterRep cluster_rep = ClusterRep::last_mention;
  DistanceBuckets buckets;
  EmbeddingFn embed = hash_embedder(16);
  // Representative embedding: mean of the representative's token embeddings.
  uint64_t seed = 0;
};

struct PipelineDiagnostics {
  std::vector<Azp> abstained;
  std::vector<Azp> no_candidates;
};

// Pipeline flow: coreference clusters first, then each identified AZP is
// attached to the cluster picked by the AZP resolver. Requires an input with
// no *pro* rows.
ClusterSet run_pipeline(const Document& doc, CorefResolver& coref, AzpIdentifier& ident,
                        AzpResolver& azp_res, const HarnessConfig& config,
                        PipelineDiagnostics* diagnostics = nullptr);

// Training view for joint learning: *pro* rows stay visible as ordinary
// mentions. Identity on the document.
Document run_joint_train_view(const Document& doc, int* azp_mentions_seen = nullptr);

struct JointTestResult {
  ClusterSet clusters;
  Document tagged;  // input copy with *pro* rows at identified gaps
  std::map<std::pair<int, int>, std::vector<int>> index_map;
};

// Test-time joint flow: identify gaps, insert untagged *pro* rows, then run
// the coreference resolver over the tagged document.
JointTestResult run_joint_test(const Document& doc, AzpIdentifier& ident, CorefResolver& coref);

// ---- deterministic baselines and oracles ----

// Reads the clusters already encoded in the document's coref columns.
class GoldColumnCoref : public CorefResolver {
 public:
  ClusterSet resolve(const Document& doc) override;
  bool thread_safe() const override { return true; }
};

// Returns a fixed cluster set regardless of input (gold oracle).
class FixedCoref : public CorefResolver {
 public:
  explicit FixedCoref(ClusterSet clusters) : clusters_(std::move(clusters)) {}
  ClusterSet resolve(const Document&) override { return clusters_; }
  bool thread_safe() const override { return true; }

 private:
  ClusterSet clusters_;
};

class FixedAzpIdentifier : public AzpIdentifier {
 public:
  explicit FixedAzpIdentifier(std::vector<Azp> azps) : azps_(std::move(azps)) {}
  std::vector<Azp> identify(const Document&) override { return azps_; }
  bool thread_safe() const override { return true; }

 private:
  std::vector<Azp> azps_;
};

// Resolves each AZP to its gold cluster; abstains on unknown positions.
class OracleAzpResolver : public AzpResolver {
 public:
  explicit OracleAzpResolver(const ClusterSet& gold);
  std::optional<int> resolve(const Azp& azp, const std::vector<AzpCandidate>& candidates) override;

 private:
  std::map<Azp, std::set<PosKey>> gold_overt_;  // azp -> overt members of its gold cluster
};

using GapClassifier = std::function<bool(const Document&, const Azp&)>;

// Candidate gaps are exactly the positions immediately after verb-tagged
// tokens; the classifier filters them (default accepts all).
std::vector<Azp> baseline_identify_verb_gaps(const Document& doc,
                                             const GapClassifier& classifier = nullptr,
                                             const std::set<std::string>& verb_prefixes = {
                                                 "VB", "IV", "PV", "V"});

class VerbGapIdentifier : public AzpIdentifier {
 public:
  explicit VerbGapIdentifier(GapClassifier classifier = nullptr,
                             std::set<std::string> verb_prefixes = {"VB", "IV", "PV", "V"})
      : classifier_(std::move(classifier)), prefixes_(std::move(verb_prefixes)) {}
  std::vector<Azp> identify(const Document& doc) override {
    return baseline_identify_verb_gaps(doc, classifier_, prefixes_);
  }
  bool thread_safe() const override { return true; }

 private:
  GapClassifier classifier_;
  std::set<std::string> prefixes_;
};

// Nearest preceding last-mention representative; ties to the smaller id;
// abstains when no representative precedes the AZP.
std::optional<int> baseline_resolve_nearest(const Azp& azp,
                                            const std::vector<AzpCandidate>& candidates);

class NearestClusterResolver : public AzpResolver {
 public:
  std::optional<int> resolve(const Azp& azp, const std::vector<AzpCandidate>& candidates) override {
    return baseline_resolve_nearest(azp, candidates);
  }
};

// ---- training objectives (pure functions over supplied probabilities) ----

inline constexpr double kProbEpsilon = 1e-7;

// Per training instance: (candidate id, probability).
using ProbabilityTable = std::vector<std::vector<std::pair<int, double>>>;

double loss_bce(const std::vector<int>& labels, const std::vector<double>& probs);
std::vector<double> grad_bce(const std::vector<int>& labels, const std::vector<double>& probs);

// gold[i] = correct candidate ids for instance i (exactly one hit expected).
double loss_azp_resolution(const ProbabilityTable& table,
                           const std::vector<std::set<int>>& gold);
std::vector<std::vector<double>> grad_azp_resolution(const ProbabilityTable& table,
                                                     const std::vector<std::set<int>>& gold);

// Negated marginal log-likelihood of the gold antecedent set.
double loss_coref_marginal(const ProbabilityTable& table,
                           const std::vector<std::set<int>>& gold);
std::vector<std::vector<double>> grad_coref_marginal(const ProbabilityTable& table,
                                                     const std::vector<std::set<int>>& gold);

// Gap neighbors within the sentence (used to build AZP features from a
// document); *pro* rows are skipped.
GapContext gap_context(const Document& doc, const Azp& azp);

// Builds the candidate list (representatives, features, pair input) an AZP
// resolver sees for one AZP.
std::vector<AzpCandidate> build_candidates(const Document& doc, const ClusterSet& clusters,
                                           const Azp& azp, const HarnessConfig& config);

}  // namespace zcoref

#endif
