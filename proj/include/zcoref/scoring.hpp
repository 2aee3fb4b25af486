#ifndef ZCOREF_SCORING_HPP
#define ZCOREF_SCORING_HPP

#include <string>
#include <vector>

#include "zcoref/core.hpp"

namespace zcoref {

struct ScoreTriple {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// Numerator/denominator accumulator; documents aggregate by summing counts
// before ratio-taking, never by averaging ratios.
struct PairCounts {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  PairCounts& operator+=(const PairCounts& o);
  ScoreTriple triple() const;  // 0/0 -> 0
};

PairCounts muc_counts(const ClusterSet& key, const ClusterSet& response);
PairCounts b_cubed_counts(const ClusterSet& key, const ClusterSet& response);
PairCounts ceaf_phi4_counts(const ClusterSet& key, const ClusterSet& response);

ScoreTriple score_muc(const ClusterSet& key, const ClusterSet& response);
ScoreTriple score_b_cubed(const ClusterSet& key, const ClusterSet& response);
ScoreTriple score_ceaf_phi4(const ClusterSet& key, const ClusterSet& response);

double conll_average(const ScoreTriple& muc, const ScoreTriple& b_cubed, const ScoreTriple& ceaf);

// Max-weight one-to-one assignment over a rows x cols score matrix; returns
// the maximal total score. Exact (Hungarian method), not greedy.
double max_assignment(const std::vector<std::vector<double>>& score);

struct AzpKeyEntry {
  Azp position;
  int gold_cluster = 0;  // id within the key ClusterSet
};

struct AzpResolutionRecord {
  Azp position;
  int resolved_cluster = 0;  // id within the response ClusterSet
};

enum class AzpHitMode { position_only, position_and_entity };

PairCounts azp_counts(const std::vector<AzpKeyEntry>& key,
                      const std::vector<AzpResolutionRecord>& response,
                      const ClusterSet& key_clusters, const ClusterSet& response_clusters,
                      AzpHitMode mode);

ScoreTriple score_azp(const std::vector<AzpKeyEntry>& key,
                      const std::vector<AzpResolutionRecord>& response,
                      const ClusterSet& key_clusters, const ClusterSet& response_clusters,
                      AzpHitMode mode);

struct ScoreReport {
  ScoreTriple muc;
  ScoreTriple b_cubed;
  ScoreTriple ceaf_phi4;
  double conll_avg_f1 = 0.0;
  ScoreTriple azp;
};

// Drops Azp members (used when reproducing AZP-free baselines); clusters left
// empty disappear.
ClusterSet without_azps(const ClusterSet& set);

// AZP key/response views of a cluster set: each Azp member paired with its
// cluster id.
std::vector<AzpKeyEntry> azp_entries(const ClusterSet& set);

// JSON with reals at 4 decimal places.
std::string report_to_json(const ScoreReport& report);

}  // namespace zcoref

#endif
