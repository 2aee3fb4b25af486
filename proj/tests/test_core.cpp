#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <utility>

#include "zcoref/core.hpp"

using namespace zcoref;

namespace {

Cluster three_mention_cluster() {
  // mentions in sentences 0, 3, 7
  return Cluster{1, {Mention{0, 0, 0, 1}, Mention{0, 3, 2, 2}, Mention{0, 7, 0, 0}}};
}

}  // namespace

TEST_CASE("represent_cluster strategies") {
  const Cluster c = three_mention_cluster();
  const Azp anchor{0, 5, 0};

  CHECK(represent_cluster(c, ClusterRep::last_mention, anchor) == Mention{0, 3, 2, 2});
  CHECK(represent_cluster(c, ClusterRep::first_mention, anchor) == Mention{0, 0, 0, 1});

  const Cluster singleton{2, {Mention{0, 1, 0, 0}}};
  CHECK(represent_cluster(singleton, ClusterRep::first_mention, anchor) == Mention{0, 1, 0, 0});
  CHECK(represent_cluster(singleton, ClusterRep::last_mention, anchor) == Mention{0, 1, 0, 0});

  // no member precedes the anchor: fall back to the latest overall
  const Azp early{0, 0, 0};
  CHECK(represent_cluster(c, ClusterRep::last_mention, early) == Mention{0, 7, 0, 0});

  const Cluster only_azps{3, {Azp{0, 0, 0}}};
  CHECK_THROWS_AS(represent_cluster(only_azps, ClusterRep::last_mention, anchor), NoOvertMention);
}

TEST_CASE("represent_cluster returns a member for every strategy/anchor") {
  const Cluster c = three_mention_cluster();
  for (ClusterRep rep : {ClusterRep::first_mention, ClusterRep::last_mention}) {
    for (int s = 0; s < 9; ++s) {
      Mention chosen = represent_cluster(c, rep, Azp{0, s, 0});
      bool found = false;
      for (const Member& m : c.members) {
        if (is_mention(m) && std::get<Mention>(m) == chosen) found = true;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("same_sentence") {
  CHECK(same_sentence(Azp{0, 2, 1}, Mention{0, 2, 0, 0}));
  CHECK_FALSE(same_sentence(Azp{0, 2, 1}, Mention{0, 1, 0, 0}));
  CHECK_FALSE(same_sentence(Azp{0, 2, 1}, Mention{1, 2, 0, 0}));  // parts are distinct texts
}

TEST_CASE("cluster_distance bucketing") {
  const DistanceBuckets buckets;
  CHECK(cluster_distance(Azp{0, 4, 0}, Mention{0, 4, 0, 0}, buckets) == 0);
  CHECK(cluster_distance(Azp{0, 4, 0}, Mention{0, 3, 0, 0}, buckets) == 1);
  CHECK(cluster_distance(Azp{0, 5, 0}, Mention{0, 2, 0, 0}, buckets) == 2);  // distance 3 -> [2,4)
  CHECK(cluster_distance(Azp{0, 9, 0}, Mention{0, 2, 0, 0}, buckets) == 3);  // distance 7 -> [4,8)
  CHECK(cluster_distance(Azp{0, 20, 0}, Mention{0, 2, 0, 0}, buckets) == 4);
  CHECK(cluster_distance(Azp{1, 0, 0}, Mention{0, 0, 0, 0}, buckets) == buckets.overflow());

  // symmetric in sentence order, monotone in raw distance
  int prev = 0;
  for (int d = 0; d < 20; ++d) {
    const int up = cluster_distance(Azp{0, 5 + d, 0}, Mention{0, 5, 0, 0}, buckets);
    const int down = cluster_distance(Azp{0, 5, 0}, Mention{0, 5 + d, 0, 0}, buckets);
    CHECK(up == down);
    CHECK(up >= prev);
    prev = up;
  }
}

TEST_CASE("assemble_azp_features") {
  const EmbeddingFn embed = hash_embedder(4);
  const DistanceBuckets buckets;
  const Azp a{0, 2, 1};
  const Mention rep{0, 2, 0, 0};

  AzpFeatures f = assemble_azp_features(a, rep, {"w1", "w2"}, embed, buckets);
  CHECK(f.prev_word == embed("w1"));
  CHECK(f.next_word == embed("w2"));
  CHECK(f.same_sentence);
  CHECK(f.cluster_distance == 0);

  // sentence-final gap uses the boundary embedding
  AzpFeatures fin = assemble_azp_features(a, rep, {"w1", ""}, embed, buckets);
  CHECK(fin.next_word == embed(kEosToken));
  AzpFeatures ini = assemble_azp_features(a, rep, {"", "w2"}, embed, buckets);
  CHECK(ini.prev_word == embed(kBosToken));

  // consistency with the two component features
  const Mention far_rep{0, 0, 0, 0};
  AzpFeatures g = assemble_azp_features(a, far_rep, {"w1", "w2"}, embed, buckets);
  CHECK(g.same_sentence == same_sentence(a, far_rep));
  CHECK(g.cluster_distance == cluster_distance(a, far_rep, buckets));
}

TEST_CASE("concat_pair layout") {
  const EmbeddingFn embed = hash_embedder(4);
  const DistanceBuckets buckets;  // 5 buckets
  AzpFeatures f;
  f.prev_word = embed("a");
  f.next_word = embed("b");
  f.same_sentence = true;
  f.cluster_distance = 2;
  const Embedding rep{0.1, 0.2, 0.3, 0.4};

  Embedding out = concat_pair(rep, f, buckets);
  CHECK(out.size() == 4 + 4 + 4 + 1 + 5);
  CHECK(out[0] == 0.1);
  CHECK(out[12] == 1.0);                 // ss scalar
  CHECK(out[13 + 2] == 1.0);             // one-hot bucket
  CHECK(out == concat_pair(rep, f, buckets));  // determinism

  // layout order is load-bearing: swapping prev/next changes the vector
  AzpFeatures swapped = f;
  std::swap(swapped.prev_word, swapped.next_word);
  CHECK(concat_pair(rep, swapped, buckets) != out);

  AzpFeatures bad = f;
  bad.next_word = embed("c");
  bad.next_word.pop_back();
  CHECK_THROWS_AS(concat_pair(rep, bad, buckets), DimensionMismatch);
}

TEST_CASE("hash embedder is deterministic and seed-sensitive") {
  const EmbeddingFn e1 = hash_embedder(8, 1);
  const EmbeddingFn e2 = hash_embedder(8, 2);
  CHECK(e1("token") == e1("token"));
  CHECK(e1("token") != e2("token"));
  CHECK(e1("token").size() == 8);
  for (double v : e1("token")) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("partition check") {
  ClusterSet ok;
  ok.clusters.push_back({0, {Mention{0, 0, 0, 0}}});
  ok.clusters.push_back({1, {Mention{0, 0, 1, 1}, Azp{0, 0, 1}}});
  CHECK_NOTHROW(ok.check_partition());

  size_t total = 0;
  std::set<PosKey> distinct;
  for (const Cluster& c : ok.clusters) {
    total += c.members.size();
    for (const Member& m : c.members) distinct.insert(pos_key(m));
  }
  CHECK(total == distinct.size());

  ClusterSet dup = ok;
  dup.clusters[0].members.push_back(Mention{0, 0, 1, 1});
  CHECK_THROWS_AS(dup.check_partition(), Error);

  ClusterSet dup_id = ok;
  dup_id.clusters[1].id = 0;
  CHECK_THROWS_AS(dup_id.check_partition(), Error);
}
