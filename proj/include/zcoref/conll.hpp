#ifndef ZCOREF_CONLL_HPP
#define ZCOREF_CONLL_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "zcoref/core.hpp"
#include "zcoref/error.hpp"

namespace zcoref {

// The explicit zero-pronoun marker used in the extended dataset.
inline constexpr const char* kProMarker = "*pro*";

struct MalformedHeader : Error {
  using Error::Error;
};
struct ColumnCountMismatch : Error {
  using Error::Error;
};
struct UnbalancedCorefBrackets : Error {
  using Error::Error;
};
struct MalformedCorefTag : Error {
  using Error::Error;
};
struct NonUtf8Input : Error {
  using Error::Error;
};
struct InvariantViolation : Error {
  using Error::Error;
};

struct CorefTag {
  enum class Boundary { open, close, open_and_close };
  int chain_id = 0;
  Boundary boundary = Boundary::open_and_close;
  auto operator<=>(const CorefTag&) const = default;
};

struct TokenRow {
  std::string doc_id;
  int part_number = 0;
  int word_number = 0;
  std::string word;
  std::string pos;
  std::string parse_bit;
  std::string lemma;
  std::string frameset_id;
  std::string word_sense;
  std::string speaker;
  std::string named_entity;
  std::vector<std::string> arguments;
  std::vector<CorefTag> coref_tags;

  bool is_pro() const { return word == kProMarker; }
  bool operator==(const TokenRow&) const = default;
};

struct Sentence {
  std::vector<TokenRow> rows;
  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::vector<Sentence>> parts;
  bool operator==(const Document&) const = default;
};

std::vector<Document> parse_conll(std::istream& in);
std::vector<Document> parse_conll(const std::string& text);

// Canonical spacing: single-space separated columns, part header zero-padded
// to three digits, one blank line after each sentence.
void write_conll(const std::vector<Document>& docs, std::ostream& out);
std::string write_conll(const std::vector<Document>& docs);

// Materializes the chains encoded in the coref columns. Tagged *pro* rows
// become Azp members; their gap_index counts only non-pro tokens.
ClusterSet extract_mentions(const Document& doc);

// Inverse of extract_mentions: rewrites every coref column from the cluster
// set. Tags in one cell follow a fixed canonical order.
Document encode_mentions(const ClusterSet& clusters, const Document& doc);

// Parses one coref column cell ("-" or |-separated tags).
std::vector<CorefTag> parse_coref_cell(const std::string& cell);
std::string format_coref_cell(const std::vector<CorefTag>& tags);

}  // namespace zcoref

#endif
