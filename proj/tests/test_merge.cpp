#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "zcoref/merge.hpp"

using namespace zcoref;
using zcoref_test::make_doc;
using zcoref_test::read_fixture;

namespace {

Document fixture_doc(const std::string& name) { return parse_conll(read_fixture(name))[0]; }
OnfDocument fixture_onf(const std::string& name) { return parse_onf(read_fixture(name)); }

}  // namespace

TEST_CASE("align: direct positional alignment") {
  const Document conll = fixture_doc("ann_0002.conll");
  const OnfDocument onf = fixture_onf("ann_0002.onf");
  AlignmentTable table = align(onf, conll);
  REQUIRE(table.per_chain.size() == 1);
  REQUIRE(table.per_chain[0].size() == 2);
  CHECK(table.per_chain[0][0].span == Mention{0, 0, 1, 1});
  CHECK(table.per_chain[0][1].span == Mention{0, 1, 1, 1});
}

TEST_CASE("align: marker offsets are subtracted") {
  const Document conll = fixture_doc("ann_0001.conll");
  const OnfDocument onf = fixture_onf("ann_0001.onf");
  AlignmentTable table = align(onf, conll);
  REQUIRE(table.per_chain.size() == 3);

  // chain 92: overt member at ONF 2.2-2 sits after the sentence-initial
  // marker, so it lands on CoNLL token 1
  const auto& c92 = table.per_chain[1];
  REQUIRE(c92.size() == 3);
  CHECK(c92[0].span == Mention{0, 1, 1, 3});
  CHECK(c92[1].gap == Azp{0, 1, 4});
  CHECK(c92[2].span == Mention{0, 2, 1, 1});

  // chain 71's AZP at 2.0-0 maps to the gap before token 0
  CHECK(table.per_chain[0][1].gap == Azp{0, 2, 0});
}

TEST_CASE("align: out-of-range members are reported, and ids must match") {
  Document conll = make_doc("d", {{{"a"}, {"b"}}});
  OnfDocument onf = parse_onf(std::string("Chain 1 (IDENT)\n    5.0-0  x\n    0.1-1  *\n"), "d");
  AlignmentTable table = align(onf, conll);
  CHECK_FALSE(table.per_chain[0][0].aligned());
  CHECK(table.per_chain[0][0].failure.find("out of range") != std::string::npos);

  OnfDocument other = onf;
  other.doc_id = "e";
  CHECK_THROWS_AS(align(other, conll), DocumentIdMismatch);
}

TEST_CASE("plan_merge on the chain-listing fixture: both cases") {
  const Document conll = fixture_doc("ann_0001.conll");
  const OnfDocument onf = fixture_onf("ann_0001.onf");
  MergeResult r = plan_merge(onf, conll);

  // chain 92 exists in CoNLL: its AZP joins id 92 (case a).
  // chain 71 has a single overt member not in any CoNLL chain: a fresh id
  // covering mention + AZP (case b). APPOS chain 95 is never merged.
  REQUIRE(r.plan.insertions.size() == 2);
  const Insertion& i92 = r.plan.insertions[0];
  CHECK(i92.sentence == 1);
  CHECK(i92.gap_index == 4);
  CHECK(i92.chain_id == 92);
  CHECK(i92.provenance == Provenance::existing_chain);

  const Insertion& i71 = r.plan.insertions[1];
  CHECK(i71.sentence == 2);
  CHECK(i71.gap_index == 0);
  CHECK(i71.chain_id == 93);  // fresh, disjoint from pre-existing ids
  CHECK(i71.provenance == Provenance::new_chain);

  REQUIRE(r.plan.new_mention_tags.size() == 1);
  CHECK(r.plan.new_mention_tags[0].span == Mention{0, 0, 1, 4});
  CHECK(r.plan.new_mention_tags[0].chain_id == 93);

  CHECK(r.rejects.empty());
}

TEST_CASE("plan_merge: no AZPs means an empty plan") {
  MergeResult r = plan_merge(fixture_onf("ann_0002.onf"), fixture_doc("ann_0002.conll"));
  CHECK(r.plan.insertions.empty());
  CHECK(r.plan.new_mention_tags.empty());
  CHECK(r.rejects.empty());
}

TEST_CASE("plan_merge rejections") {
  Document conll = make_doc("d", {{{"a", "NN", "(1)"}, {"b"}, {"c", "NN", "(2)"}}});

  // members map into two different CoNLL chains
  OnfDocument ambiguous =
      parse_onf(std::string("Chain 9 (IDENT)\n    0.0-0  a\n    0.2-2  c\n    0.3-3  *\n"), "d");
  MergeResult r1 = plan_merge(ambiguous, conll);
  CHECK(r1.plan.insertions.empty());
  REQUIRE(r1.rejects.size() == 1);
  CHECK(r1.rejects[0].reason == "ambiguous_chain_match");

  // chain consisting solely of AZPs
  OnfDocument azp_only = parse_onf(std::string("Chain 9 (IDENT)\n    0.1-1  *\n"), "d");
  MergeResult r2 = plan_merge(azp_only, conll);
  CHECK(r2.rejects.size() == 1);
  CHECK(r2.rejects[0].reason == "azp_only_chain");

  // unalignable member
  OnfDocument bad = parse_onf(std::string("Chain 9 (IDENT)\n    7.0-0  x\n    0.1-1  *\n"), "d");
  MergeResult r3 = plan_merge(bad, conll);
  CHECK(r3.rejects.size() == 1);
  CHECK(r3.rejects[0].reason == "unalignable_member");

  // APPOS chains carrying AZPs are skipped
  OnfDocument appos =
      parse_onf(std::string("Chain 9 (APPOS)\n    ATTRIB 0.0-0  a\n    HEAD 0.1-1  *\n"), "d");
  MergeResult r4 = plan_merge(appos, conll);
  CHECK(r4.plan.insertions.empty());
  CHECK(r4.rejects.size() == 1);
  CHECK(r4.rejects[0].reason == "appos_chain");
}

TEST_CASE("apply_merge produces the extended sentence") {
  const Document conll = fixture_doc("ann_0003.conll");
  const OnfDocument onf = fixture_onf("ann_0003.onf");
  MergeResult r = plan_merge(onf, conll);
  Document merged = apply_merge(r.plan, conll);

  const Sentence& sent = merged.parts[0][1];
  REQUIRE(sent.rows.size() == 5);
  CHECK(sent.rows[0].word == "كانا");
  CHECK(sent.rows[1].word == "*pro*");
  CHECK(sent.rows[1].pos == "PRON");
  CHECK(sent.rows[1].parse_bit == "*");
  CHECK(sent.rows[2].word == "في");
  for (size_t i = 0; i < sent.rows.size(); ++i) {
    CHECK(sent.rows[i].word_number == static_cast<int>(i));
  }

  // output re-serializes cleanly and re-parses to itself
  const std::string text = write_conll({merged});
  CHECK(parse_conll(text)[0] == merged);

  // the rescued singleton becomes a 2-member chain
  ClusterSet clusters = extract_mentions(merged);
  REQUIRE(clusters.clusters.size() == 1);
  CHECK(clusters.clusters[0].members ==
        std::vector<Member>{Mention{0, 0, 0, 0}, Azp{0, 1, 1}});
}

TEST_CASE("apply_merge: empty plan is the identity") {
  const Document conll = fixture_doc("ann_0002.conll");
  MergeResult r = plan_merge(fixture_onf("ann_0002.onf"), conll);
  CHECK(apply_merge(r.plan, conll) == conll);
}

TEST_CASE("two insertions in one sentence: hand-enumerated row table") {
  Document conll = make_doc("d", {{{"w0", "NN", "(1)"}, {"w1"}, {"w2", "NN", "(2)"}, {"w3"}, {"w4"}}});
  OnfDocument onf = parse_onf(std::string("Chain 5 (IDENT)\n"
                                          "    0.0-0  w0\n"
                                          "    0.2-2  *\n"
                                          "Chain 6 (IDENT)\n"
                                          "    0.3-3  w2\n"
                                          "    0.5-5  *\n"),
                              "d");
  // ONF stream: [w0, w1, *, w2, w3, *, w4] -> gaps at stripped 2 and 4
  MergeResult r = plan_merge(onf, conll);
  REQUIRE(r.plan.insertions.size() == 2);
  CHECK(r.plan.insertions[0].gap_index == 2);
  CHECK(r.plan.insertions[0].chain_id == 1);
  CHECK(r.plan.insertions[1].gap_index == 4);
  CHECK(r.plan.insertions[1].chain_id == 2);

  Document merged = apply_merge(r.plan, conll);
  const Sentence& sent = merged.parts[0][0];
  const std::vector<std::string> expected = {"w0", "w1", "*pro*", "w2", "w3", "*pro*", "w4"};
  REQUIRE(sent.rows.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(sent.rows[i].word == expected[i]);
    CHECK(sent.rows[i].word_number == static_cast<int>(i));
  }

  const auto& im = r.plan.index_map.at({0, 0});
  REQUIRE(im.size() == 5);
  CHECK(im == std::vector<int>{0, 1, 3, 4, 6});
}

TEST_CASE("conservativity: undo recovers the original bytes") {
  for (const char* name : {"ann_0001", "ann_0003"}) {
    CAPTURE(name);
    const std::string original = read_fixture(std::string(name) + ".conll");
    const Document conll = parse_conll(original)[0];
    const OnfDocument onf = fixture_onf(std::string(name) + ".onf");
    MergeResult r = plan_merge(onf, conll);
    Document merged = apply_merge(r.plan, conll);

    // original tokens survive in order
    std::vector<std::string> before, after;
    for (const auto& part : conll.parts) {
      for (const Sentence& s : part) {
        for (const TokenRow& row : s.rows) before.push_back(row.word);
      }
    }
    for (const auto& part : merged.parts) {
      for (const Sentence& s : part) {
        for (const TokenRow& row : s.rows) {
          if (!row.is_pro()) after.push_back(row.word);
        }
      }
    }
    CHECK(before == after);

    Document restored = undo_merge(r.plan, merged);
    CHECK(write_conll({restored}) == original);
  }
}

TEST_CASE("idempotence: merging a merged document plans nothing") {
  const Document conll = fixture_doc("ann_0001.conll");
  const OnfDocument onf = fixture_onf("ann_0001.onf");
  MergeResult first = plan_merge(onf, conll);
  Document merged = apply_merge(first.plan, conll);

  MergeResult second = plan_merge(onf, merged);
  CHECK(second.plan.insertions.empty());
  CHECK(second.plan.new_mention_tags.empty());
  CHECK(apply_merge(second.plan, merged) == merged);
}

TEST_CASE("merged output invariants: no AZP-only or singleton new chains") {
  const Document conll = fixture_doc("ann_0001.conll");
  MergeResult r = plan_merge(fixture_onf("ann_0001.onf"), conll);
  Document merged = apply_merge(r.plan, conll);
  ClusterSet clusters = extract_mentions(merged);
  clusters.check_partition();
  for (const Cluster& c : clusters.clusters) {
    bool has_overt = false;
    for (const Member& m : c.members) {
      if (is_mention(m)) has_overt = true;
    }
    CHECK(has_overt);
    bool has_azp = false;
    for (const Member& m : c.members) {
      if (is_azp(m)) has_azp = true;
    }
    if (has_azp) CHECK(c.members.size() >= 2);
  }
}

TEST_CASE("corpus_stats") {
  CHECK(corpus_stats({}).documents == 0);
  CHECK(corpus_stats({}).words == 0);

  const Document conll = fixture_doc("ann_0001.conll");
  MergeResult r = plan_merge(fixture_onf("ann_0001.onf"), conll);
  Document merged = apply_merge(r.plan, conll);
  CorpusStats s = corpus_stats({merged});
  CHECK(s.documents == 1);
  CHECK(s.sentences == 3);
  CHECK(s.words == 16);  // *pro* rows excluded
  CHECK(s.azps == 2);
}

TEST_CASE("stale plans are refused") {
  const Document conll = fixture_doc("ann_0001.conll");
  MergeResult r = plan_merge(fixture_onf("ann_0001.onf"), conll);
  Document other = fixture_doc("ann_0002.conll");
  CHECK_THROWS_AS(apply_merge(r.plan, other), StalePlan);
}
