#include "zcoref/core.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace zcoref {

PosKey pos_key(const Member& m) {
  if (const Mention* men = std::get_if<Mention>(&m)) {
    return {men->part, men->sentence, men->start, 1, men->end};
  }
  const Azp& a = std::get<Azp>(m);
  return {a.part, a.sentence, a.gap_index, 0, a.gap_index};
}

const Cluster* ClusterSet::find(int id) const {
  for (const Cluster& c : clusters) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void ClusterSet::check_partition() const {
  std::set<int> ids;
  std::set<PosKey> seen;
  for (const Cluster& c : clusters) {
    if (!ids.insert(c.id).second) throw Error("duplicate cluster id " + std::to_string(c.id));
    if (c.members.empty()) throw Error("empty cluster " + std::to_string(c.id));
    for (const Member& m : c.members) {
      if (!seen.insert(pos_key(m)).second) {
        throw Error("member occurs in two clusters (cluster " + std::to_string(c.id) + ")");
      }
    }
  }
}

void ClusterSet::sort_members() {
  for (Cluster& c : clusters) {
    std::sort(c.members.begin(), c.members.end(),
              [](const Member& a, const Member& b) { return pos_key(a) < pos_key(b); });
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.id < b.id; });
}

bool operator==(const Cluster& a, const Cluster& b) {
  return a.id == b.id && a.members == b.members;
}

bool operator==(const ClusterSet& a, const ClusterSet& b) { return a.clusters == b.clusters; }

bool same_partition(const ClusterSet& a, const ClusterSet& b) {
  auto canon = [](const ClusterSet& s) {
    std::vector<std::vector<PosKey>> out;
    for (const Cluster& c : s.clusters) {
      std::vector<PosKey> keys;
      for (const Member& m : c.members) keys.push_back(pos_key(m));
      std::sort(keys.begin(), keys.end());
      out.push_back(std::move(keys));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return canon(a) == canon(b);
}

EmbeddingFn hash_embedder(int dim, uint64_t seed) {
  return [dim, seed](const std::string& token) {
    // splitmix64 over (fnv1a(token), seed, lane)
    uint64_t h = 1469598103934665603ull ^ seed;
    for (unsigned char ch : token) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    Embedding e(dim);
    for (int i = 0; i < dim; ++i) {
      uint64_t z = h + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(i + 1);
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      z ^= z >> 31;
      e[i] = static_cast<double>(z % 2000001) / 1000000.0 - 1.0;  // [-1, 1]
    }
    return e;
  };
}

Mention represent_cluster(const Cluster& c, ClusterRep strategy, const Azp& anchor) {
  std::vector<Mention> overt;
  for (const Member& m : c.members) {
    if (const Mention* men = std::get_if<Mention>(&m)) overt.push_back(*men);
  }
  if (overt.empty()) {
    throw NoOvertMention("cluster " + std::to_string(c.id) + " holds only AZPs");
  }
  std::sort(overt.begin(), overt.end());
  if (strategy == ClusterRep::first_mention) return overt.front();

  const PosKey anchor_key = pos_key(Member{anchor});
  Mention result = overt.back();
  for (auto it = overt.rbegin(); it != overt.rend(); ++it) {
    if (pos_key(Member{*it}) < anchor_key) {
      result = *it;
      break;
    }
  }
  return result;
}

bool same_sentence(const Azp& a, const Mention& rep) {
  return a.part == rep.part && a.sentence == rep.sentence;
}

int DistanceBuckets::bucket(int raw_distance) const {
  int b = 0;
  for (int i = 0; i < count(); ++i) {
    if (thresholds[i] <= raw_distance) b = i;
  }
  return b;
}

int cluster_distance(const Azp& a, const Mention& rep, const DistanceBuckets& buckets) {
  if (a.part != rep.part) return buckets.overflow();
  int raw = a.sentence - rep.sentence;
  if (raw < 0) raw = -raw;
  return buckets.bucket(raw);
}

AzpFeatures assemble_azp_features(const Azp& a, const Mention& rep, const GapContext& ctx,
                                  const EmbeddingFn& embed, const DistanceBuckets& buckets) {
  AzpFeatures f;
  f.prev_word = embed(ctx.prev.empty() ? kBosToken : ctx.prev);
  f.next_word = embed(ctx.next.empty() ? kEosToken : ctx.next);
  f.same_sentence = same_sentence(a, rep);
  f.cluster_distance = cluster_distance(a, rep, buckets);
  return f;
}

Embedding concat_pair(const Embedding& cluster_rep, const AzpFeatures& a,
                      const DistanceBuckets& buckets) {
  if (a.prev_word.size() != a.next_word.size()) {
    throw DimensionMismatch("prev/next embedding dimensions differ");
  }
  if (a.cluster_distance < 0 || a.cluster_distance >= buckets.count()) {
    throw DimensionMismatch("distance bucket out of range");
  }
  Embedding out;
  out.reserve(cluster_rep.size() + a.prev_word.size() + a.next_word.size() + 1 + buckets.count());
  out.insert(out.end(), cluster_rep.begin(), cluster_rep.end());
  out.insert(out.end(), a.prev_word.begin(), a.prev_word.end());
  out.insert(out.end(), a.next_word.begin(), a.next_word.end());
  out.push_back(a.same_sentence ? 1.0 : 0.0);
  for (int i = 0; i < buckets.count(); ++i) out.push_back(i == a.cluster_distance ? 1.0 : 0.0);
  return out;
}

}  // namespace zcoref
