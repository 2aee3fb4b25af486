#ifndef ZCOREF_TEST_UTIL_HPP
#define ZCOREF_TEST_UTIL_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "zcoref/conll.hpp"

namespace zcoref_test {

inline std::string fixture_path(const std::string& name) {
  return std::string(ZCOREF_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimal document builder: one part, sentences given as (word, pos, coref)
// triples. Remaining layers get inert values.
struct RowSpec {
  std::string word;
  std::string pos = "NN";
  std::string coref = "-";
};

inline zcoref::Document make_doc(const std::string& doc_id,
                                 const std::vector<std::vector<RowSpec>>& sentences) {
  zcoref::Document doc;
  doc.doc_id = doc_id;
  auto& part = doc.parts.emplace_back();
  for (const auto& sent_spec : sentences) {
    zcoref::Sentence sent;
    int n = 0;
    for (const RowSpec& spec : sent_spec) {
      zcoref::TokenRow row;
      row.doc_id = doc_id;
      row.part_number = 0;
      row.word_number = n++;
      row.word = spec.word;
      row.pos = spec.pos;
      row.parse_bit = "*";
      row.lemma = row.frameset_id = row.word_sense = row.speaker = row.named_entity = "-";
      row.coref_tags = zcoref::parse_coref_cell(spec.coref);
      sent.rows.push_back(std::move(row));
    }
    part.push_back(std::move(sent));
  }
  return doc;
}

}  // namespace zcoref_test

#endif
