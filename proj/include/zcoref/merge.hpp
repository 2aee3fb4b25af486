#ifndef ZCOREF_MERGE_HPP
#define ZCOREF_MERGE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zcoref/conll.hpp"
#include "zcoref/core.hpp"
#include "zcoref/onf.hpp"

namespace zcoref {

struct DocumentIdMismatch : Error {
  using Error::Error;
};
struct StalePlan : Error {
  using Error::Error;
};

// Alignment of one ONF chain member onto the CoNLL token stream. Positions
// are in stripped coordinates (existing *pro* rows do not count), so the same
// alignment holds for plain and already-extended documents.
struct MemberAlignment {
  bool is_azp = false;
  std::optional<Mention> span;  // overt members
  std::optional<Azp> gap;       // AZP members
  std::string failure;          // non-empty iff unaligned
  bool aligned() const { return failure.empty(); }
};

// Per chain, parallel to OnfDocument::chains / OnfChain::members.
struct AlignmentTable {
  std::vector<std::vector<MemberAlignment>> per_chain;
};

AlignmentTable align(const OnfDocument& onf, const Document& conll);

enum class Provenance { existing_chain, new_chain };

struct Insertion {
  int part = 0;
  int sentence = 0;
  int gap_index = 0;  // stripped coordinates
  int chain_id = 0;
  Provenance provenance = Provenance::existing_chain;
};

// Coref tags added to rescued singleton mentions (new-chain case).
struct NewMentionTag {
  Mention span;
  int chain_id = 0;
};

struct RejectRecord {
  int chain_id = 0;
  std::string reason;
  std::string detail;
};

struct MergePlan {
  std::string doc_id;
  std::vector<Insertion> insertions;               // sorted by position
  std::vector<NewMentionTag> new_mention_tags;
  // per (part, sentence) with insertions: original stripped index -> new index
  std::map<std::pair<int, int>, std::vector<int>> index_map;
};

struct MergeResult {
  MergePlan plan;
  std::vector<RejectRecord> rejects;
};

MergeResult plan_merge(const OnfDocument& onf, const Document& conll);

// Inserts one *pro* row per planned insertion (POS "PRON", parse bit "*",
// inert values elsewhere, coref "(id)"), adds rescue tags, renumbers word
// numbers in the sentence's original base. Insertions already present in the
// document are skipped, so re-applying is a no-op.
Document apply_merge(const MergePlan& plan, const Document& conll);

// Exact inverse of apply_merge for the same plan.
Document undo_merge(const MergePlan& plan, const Document& merged);

// Inserts *pro* rows with no cluster assignment (coref column "-") at the
// given gaps; used by the joint test-time flow. Returns the tagged copy and,
// when requested, the per-sentence index map.
Document insert_untagged_pros(const Document& doc, const std::vector<Azp>& gaps,
                              std::map<std::pair<int, int>, std::vector<int>>* index_map = nullptr);

struct CorpusStats {
  long documents = 0;
  long sentences = 0;
  long words = 0;  // excludes *pro* rows
  long azps = 0;
};

CorpusStats corpus_stats(const std::vector<Document>& docs);

}  // namespace zcoref

#endif
