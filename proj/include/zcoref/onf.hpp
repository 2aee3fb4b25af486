#ifndef ZCOREF_ONF_HPP
#define ZCOREF_ONF_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zcoref/error.hpp"

namespace zcoref {

struct MalformedChainHeader : Error {
  using Error::Error;
};
struct MalformedCoordinate : Error {
  using Error::Error;
};
struct DuplicateChainId : Error {
  using Error::Error;
};

// "<sentence>.<start>-<end>"; sentence indices are document-global,
// word indices count ONF tokens including zero markers.
struct OnfCoordinate {
  int sentence_index = 0;
  int start_word = 0;
  int end_word = 0;
  auto operator<=>(const OnfCoordinate&) const = default;
};

enum class OnfChainKind { IDENT, APPOS };
enum class OnfMemberRole { ATTRIB, HEAD };

struct OnfChainMember {
  OnfCoordinate coordinate;
  bool is_azp = false;  // the member is the bare '*' marker
  std::string surface;
  std::optional<OnfMemberRole> role;  // APPOS chains only
};

struct OnfChain {
  int chain_id = 0;
  OnfChainKind kind = OnfChainKind::IDENT;
  std::vector<OnfChainMember> members;
};

struct OnfDocument {
  std::string doc_id;
  std::vector<OnfChain> chains;
};

// Scans for chain blocks ("Chain <id> (IDENT|APPOS)" headers followed by
// indented member lines); everything else is skipped. An optional
// "Document ID: <id>" line overrides fallback_doc_id.
OnfDocument parse_onf(std::istream& in, const std::string& fallback_doc_id = "");
OnfDocument parse_onf(const std::string& text, const std::string& fallback_doc_id = "");

// All '*' members, in document order, paired with their chain id.
std::vector<std::pair<int, OnfChainMember>> azp_members(const OnfDocument& doc);

}  // namespace zcoref

#endif
