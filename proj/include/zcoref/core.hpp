#ifndef ZCOREF_CORE_HPP
#define ZCOREF_CORE_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zcoref/error.hpp"

namespace zcoref {

// An overt mention: an inclusive token span. Token positions are 0-based
// indices within the sentence, counting only real tokens (never *pro* rows).
struct Mention {
  int part = 0;
  int sentence = 0;
  int start = 0;
  int end = 0;
  auto operator<=>(const Mention&) const = default;
};

// A zero-pronoun position: the gap before the token at gap_index.
// A sentence-final gap has gap_index == sentence length.
struct Azp {
  int part = 0;
  int sentence = 0;
  int gap_index = 0;
  auto operator<=>(const Azp&) const = default;
};

using Member = std::variant<Mention, Azp>;

inline bool is_azp(const Member& m) { return std::holds_alternative<Azp>(m); }
inline bool is_mention(const Member& m) { return std::holds_alternative<Mention>(m); }

// Document-order key. An AZP at gap g sorts before a mention starting at g
// (the gap precedes the token).
struct PosKey {
  int part, sentence, pos, kind, end;  // kind: 0 = azp, 1 = mention
  auto operator<=>(const PosKey&) const = default;
};

PosKey pos_key(const Member& m);

struct Cluster {
  int id = 0;
  std::vector<Member> members;  // kept sorted in document order
};

struct ClusterSet {
  std::vector<Cluster> clusters;

  const Cluster* find(int id) const;
  // Throws Error if a member occurs in two clusters or ids repeat.
  void check_partition() const;
  void sort_members();
};

bool operator==(const Cluster& a, const Cluster& b);
bool operator==(const ClusterSet& a, const ClusterSet& b);

// Structural equality up to cluster-id relabeling and cluster order.
bool same_partition(const ClusterSet& a, const ClusterSet& b);

using Embedding = std::vector<double>;
using EmbeddingFn = std::function<Embedding(const std::string&)>;

// Sentence-boundary pseudo-tokens fed to the embedder for gaps at the
// sentence edges.
inline constexpr const char* kBosToken = "<bos>";
inline constexpr const char* kEosToken = "<eos>";

// Deterministic toy embedder: values derived from a hash of (token, seed).
EmbeddingFn hash_embedder(int dim, uint64_t seed = 0);

enum class ClusterRep { first_mention, last_mention };

struct NoOvertMention : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};

// Picks the mention standing for a cluster when pairing with an AZP.
// last_mention is anchored to the AZP: the latest overt mention preceding it,
// falling back to the latest overt mention overall.
Mention represent_cluster(const Cluster& c, ClusterRep strategy, const Azp& anchor);

bool same_sentence(const Azp& a, const Mention& rep);

// Ascending thresholds; bucket(d) is the largest i with thresholds[i] <= d.
// Cross-part distances land in the last (overflow) bucket.
struct DistanceBuckets {
  std::vector<int> thresholds{0, 1, 2, 4, 8};
  int count() const { return static_cast<int>(thresholds.size()); }
  int overflow() const { return count() - 1; }
  int bucket(int raw_distance) const;
};

int cluster_distance(const Azp& a, const Mention& rep, const DistanceBuckets& buckets);

struct AzpFeatures {
  Embedding prev_word;
  Embedding next_word;
  bool same_sentence = false;
  int cluster_distance = 0;  // bucket index
};

// Neighbor words of the gap within its sentence; boundary gaps use the
// designated pseudo-tokens.
struct GapContext {
  std::string prev;
  std::string next;
};

AzpFeatures assemble_azp_features(const Azp& a, const Mention& rep, const GapContext& ctx,
                                  const EmbeddingFn& embed, const DistanceBuckets& buckets);

// Fixed layout: [cluster rep | prev | next | ss | one-hot bucket].
Embedding concat_pair(const Embedding& cluster_rep, const AzpFeatures& a,
                      const DistanceBuckets& buckets);

}  // namespace zcoref

#endif
