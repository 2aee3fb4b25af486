#include "zcoref/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

namespace zcoref {
namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

std::map<PosKey, int> member_to_cluster(const ClusterSet& set) {
  std::map<PosKey, int> out;
  for (size_t i = 0; i < set.clusters.size(); ++i) {
    for (const Member& m : set.clusters[i].members) out[pos_key(m)] = static_cast<int>(i);
  }
  return out;
}

// One direction of the MUC link count: sum over 'gold' clusters of
// |cluster| - (partitions induced by 'system' plus twinless mentions).
PairCounts muc_direction(const ClusterSet& gold, const ClusterSet& system) {
  const std::map<PosKey, int> sys_of = member_to_cluster(system);
  PairCounts c;
  for (const Cluster& k : gold.clusters) {
    std::set<int> partitions;
    int twinless = 0;
    for (const Member& m : k.members) {
      auto it = sys_of.find(pos_key(m));
      if (it == sys_of.end()) {
        ++twinless;
      } else {
        partitions.insert(it->second);
      }
    }
    c.recall_num += static_cast<double>(k.members.size()) -
                    static_cast<double>(partitions.size() + twinless);
    c.recall_den += static_cast<double>(k.members.size()) - 1.0;
  }
  return c;
}

}  // namespace

PairCounts& PairCounts::operator+=(const PairCounts& o) {
  recall_num += o.recall_num;
  recall_den += o.recall_den;
  precision_num += o.precision_num;
  precision_den += o.precision_den;
  return *this;
}

ScoreTriple PairCounts::triple() const {
  ScoreTriple t;
  t.recall = ratio(recall_num, recall_den);
  t.precision = ratio(precision_num, precision_den);
  t.f1 = ratio(2.0 * t.precision * t.recall, t.precision + t.recall);
  return t;
}

PairCounts muc_counts(const ClusterSet& key, const ClusterSet& response) {
  PairCounts r = muc_direction(key, response);
  PairCounts p = muc_direction(response, key);
  r.precision_num = p.recall_num;
  r.precision_den = p.recall_den;
  return r;
}

PairCounts b_cubed_counts(const ClusterSet& key, const ClusterSet& response) {
  PairCounts c;
  std::map<std::pair<int, int>, double> overlap;
  const std::map<PosKey, int> key_of = member_to_cluster(key);
  const std::map<PosKey, int> resp_of = member_to_cluster(response);
  for (const auto& [pos, ki] : key_of) {
    auto it = resp_of.find(pos);
    if (it != resp_of.end()) overlap[{ki, it->second}] += 1.0;
  }
  for (const auto& [pair, n] : overlap) {
    const double ksize = static_cast<double>(key.clusters[pair.first].members.size());
    const double rsize = static_cast<double>(response.clusters[pair.second].members.size());
    c.recall_num += n * n / ksize;
    c.precision_num += n * n / rsize;
  }
  c.recall_den = static_cast<double>(key_of.size());
  c.precision_den = static_cast<double>(resp_of.size());
  return c;
}

double max_assignment(const std::vector<std::vector<double>>& score) {
  if (score.empty() || score.front().empty()) return 0.0;
  size_t rows = score.size(), cols = score.front().size();
  // Hungarian method on the negated matrix, padded square.
  const size_t n = std::max(rows, cols);
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) a[i + 1][j + 1] = -score[i][j];
  }
  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::vector<double> minv(n + 1, INF);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      size_t i0 = p[j0], j1 = 0;
      double delta = INF;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = a[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (size_t j = 1; j <= n; ++j) {
    size_t i = p[j];
    if (i >= 1 && i <= rows && j >= 1 && j <= cols) total += score[i - 1][j - 1];
  }
  return total;
}

PairCounts ceaf_phi4_counts(const ClusterSet& key, const ClusterSet& response) {
  PairCounts c;
  c.recall_den = static_cast<double>(key.clusters.size());
  c.precision_den = static_cast<double>(response.clusters.size());
  if (key.clusters.empty() || response.clusters.empty()) return c;

  std::vector<std::vector<double>> phi(key.clusters.size(),
                                       std::vector<double>(response.clusters.size(), 0.0));
  for (size_t i = 0; i < key.clusters.size(); ++i) {
    std::set<PosKey> ki;
    for (const Member& m : key.clusters[i].members) ki.insert(pos_key(m));
    for (size_t j = 0; j < response.clusters.size(); ++j) {
      int common = 0;
      for (const Member& m : response.clusters[j].members) {
        if (ki.count(pos_key(m))) ++common;
      }
      phi[i][j] = 2.0 * common /
                  static_cast<double>(ki.size() + response.clusters[j].members.size());
    }
  }
  const double total = max_assignment(phi);
  c.recall_num = total;
  c.precision_num = total;
  return c;
}

ScoreTriple score_muc(const ClusterSet& key, const ClusterSet& response) {
  return muc_counts(key, response).triple();
}
ScoreTriple score_b_cubed(const ClusterSet& key, const ClusterSet& response) {
  return b_cubed_counts(key, response).triple();
}
ScoreTriple score_ceaf_phi4(const ClusterSet& key, const ClusterSet& response) {
  return ceaf_phi4_counts(key, response).triple();
}

double conll_average(const ScoreTriple& muc, const ScoreTriple& b_cubed, const ScoreTriple& ceaf) {
  return (muc.f1 + b_cubed.f1 + ceaf.f1) / 3.0;
}

namespace {

bool clusters_corefer(const Cluster* a, const Cluster* b) {
  if (!a || !b) return false;
  std::set<PosKey> overt;
  for (const Member& m : a->members) {
    if (is_mention(m)) overt.insert(pos_key(m));
  }
  for (const Member& m : b->members) {
    if (is_mention(m) && overt.count(pos_key(m))) return true;
  }
  return false;
}

}  // namespace

PairCounts azp_counts(const std::vector<AzpKeyEntry>& key,
                      const std::vector<AzpResolutionRecord>& response,
                      const ClusterSet& key_clusters, const ClusterSet& response_clusters,
                      AzpHitMode mode) {
  std::map<Azp, int> key_by_pos;
  for (const AzpKeyEntry& e : key) key_by_pos.emplace(e.position, e.gold_cluster);
  std::set<Azp> counted;
  double hits = 0.0;
  for (const AzpResolutionRecord& r : response) {
    if (!counted.insert(r.position).second) continue;  // duplicate positions count once
    auto it = key_by_pos.find(r.position);
    if (it == key_by_pos.end()) continue;
    if (mode == AzpHitMode::position_and_entity &&
        !clusters_corefer(key_clusters.find(it->second), response_clusters.find(r.resolved_cluster))) {
      continue;
    }
    hits += 1.0;
  }
  PairCounts c;
  c.recall_num = c.precision_num = hits;
  c.recall_den = static_cast<double>(key_by_pos.size());
  c.precision_den = static_cast<double>(counted.size());
  return c;
}

ScoreTriple score_azp(const std::vector<AzpKeyEntry>& key,
                      const std::vector<AzpResolutionRecord>& response,
                      const ClusterSet& key_clusters, const ClusterSet& response_clusters,
                      AzpHitMode mode) {
  return azp_counts(key, response, key_clusters, response_clusters, mode).triple();
}

ClusterSet without_azps(const ClusterSet& set) {
  ClusterSet out;
  for (const Cluster& c : set.clusters) {
    Cluster kept{c.id, {}};
    for (const Member& m : c.members) {
      if (is_mention(m)) kept.members.push_back(m);
    }
    if (!kept.members.empty()) out.clusters.push_back(std::move(kept));
  }
  return out;
}

std::vector<AzpKeyEntry> azp_entries(const ClusterSet& set) {
  std::vector<AzpKeyEntry> out;
  for (const Cluster& c : set.clusters) {
    for (const Member& m : c.members) {
      if (is_azp(m)) out.push_back({std::get<Azp>(m), c.id});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const AzpKeyEntry& a, const AzpKeyEntry& b) { return a.position < b.position; });
  return out;
}

std::string report_to_json(const ScoreReport& report) {
  char buf[512];
  auto triple = [](const ScoreTriple& t) {
    char b[128];
    std::snprintf(b, sizeof(b), "{\"r\": %.4f, \"p\": %.4f, \"f1\": %.4f}", t.recall, t.precision,
                  t.f1);
    return std::string(b);
  };
  std::string out = "{\n";
  out += "  \"muc\": " + triple(report.muc) + ",\n";
  out += "  \"b_cubed\": " + triple(report.b_cubed) + ",\n";
  out += "  \"ceaf_phi4\": " + triple(report.ceaf_phi4) + ",\n";
  std::snprintf(buf, sizeof(buf), "  \"conll_avg_f1\": %.4f,\n", report.conll_avg_f1);
  out += buf;
  out += "  \"azp\": " + triple(report.azp) + "\n}";
  return out;
}

}  // namespace zcoref
