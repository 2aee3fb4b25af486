#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "zcoref/onf.hpp"

using namespace zcoref;
using zcoref_test::read_fixture;

TEST_CASE("parse the chain listing fixture") {
  OnfDocument doc = parse_onf(read_fixture("ann_0001.onf"));
  CHECK(doc.doc_id == "nw/ann/00/ann_0001");
  REQUIRE(doc.chains.size() == 3);

  const OnfChain& c71 = doc.chains[0];
  CHECK(c71.chain_id == 71);
  CHECK(c71.kind == OnfChainKind::IDENT);
  REQUIRE(c71.members.size() == 2);
  CHECK_FALSE(c71.members[0].is_azp);
  CHECK(c71.members[0].coordinate == OnfCoordinate{0, 1, 4});
  CHECK(c71.members[1].is_azp);
  CHECK(c71.members[1].surface == "*");

  const OnfChain& c92 = doc.chains[1];
  CHECK(c92.chain_id == 92);
  REQUIRE(c92.members.size() == 3);
  CHECK(c92.members[1].is_azp);

  const OnfChain& c95 = doc.chains[2];
  CHECK(c95.kind == OnfChainKind::APPOS);
  REQUIRE(c95.members.size() == 2);
  CHECK(c95.members[0].role == OnfMemberRole::ATTRIB);
  CHECK(c95.members[1].role == OnfMemberRole::HEAD);
}

TEST_CASE("input with no chain section yields empty chains") {
  OnfDocument doc = parse_onf(std::string("Plain sentence:\n---------------\nsome text\n"), "x");
  CHECK(doc.doc_id == "x");
  CHECK(doc.chains.empty());
}

TEST_CASE("coordinate string 8.16-16") {
  OnfDocument doc = parse_onf(std::string("Chain 1 (IDENT)\n    8.16-16    كلمة\n"));
  REQUIRE(doc.chains.size() == 1);
  CHECK(doc.chains[0].members[0].coordinate == OnfCoordinate{8, 16, 16});
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_onf(std::string("Chain 1 (IDENT)\n    1.1-1 a\nChain 1 (IDENT)\n    1.2-2 b\n")),
                  DuplicateChainId);
  CHECK_THROWS_AS(parse_onf(std::string("Chain 1 (WEIRD)\n    1.1-1 a\n")), MalformedChainHeader);
  CHECK_THROWS_AS(parse_onf(std::string("Chain 1 (IDENT)\n    1.5-2 a\n")), MalformedCoordinate);
  CHECK_THROWS_AS(parse_onf(std::string("Chain 1 (IDENT)\n    ATTRIB 1.1-2 a\n")),
                  MalformedChainHeader);
  CHECK_THROWS_AS(parse_onf(std::string("Chain 1 (IDENT)\nnext section\n")), MalformedChainHeader);
}

TEST_CASE("azp_members returns exactly the marker members in order") {
  OnfDocument doc = parse_onf(read_fixture("ann_0001.onf"));
  auto azps = azp_members(doc);
  REQUIRE(azps.size() == 2);
  CHECK(azps[0].first == 71);
  CHECK(azps[0].second.coordinate == OnfCoordinate{2, 0, 0});
  CHECK(azps[1].first == 92);
  CHECK(azps[1].second.coordinate == OnfCoordinate{1, 4, 4});
  for (const auto& [id, m] : azps) CHECK(m.is_azp);

  OnfDocument no_azp = parse_onf(read_fixture("ann_0002.onf"));
  CHECK(azp_members(no_azp).empty());
}

TEST_CASE("two AZP members in one chain keep document order") {
  OnfDocument doc = parse_onf(std::string("Chain 4 (IDENT)\n"
                                          "    0.0-1    قال الرجل\n"
                                          "    1.2-2    *\n"
                                          "    3.0-0    *\n"));
  auto azps = azp_members(doc);
  REQUIRE(azps.size() == 2);
  CHECK(azps[0].second.coordinate == OnfCoordinate{1, 2, 2});
  CHECK(azps[1].second.coordinate == OnfCoordinate{3, 0, 0});
}

TEST_CASE("parse is deterministic") {
  const std::string text = read_fixture("ann_0001.onf");
  OnfDocument a = parse_onf(text);
  OnfDocument b = parse_onf(text);
  REQUIRE(a.chains.size() == b.chains.size());
  for (size_t i = 0; i < a.chains.size(); ++i) {
    CHECK(a.chains[i].chain_id == b.chains[i].chain_id);
    REQUIRE(a.chains[i].members.size() == b.chains[i].members.size());
    for (size_t j = 0; j < a.chains[i].members.size(); ++j) {
      CHECK(a.chains[i].members[j].coordinate == b.chains[i].members[j].coordinate);
      CHECK(a.chains[i].members[j].surface == b.chains[i].members[j].surface);
    }
  }
}
