#include "zcoref/merge.hpp"

#include <algorithm>
#include <set>

namespace zcoref {
namespace {

struct FlatSentence {
  int part;
  int local;
  int stripped_len;
};

std::vector<FlatSentence> flatten(const Document& doc) {
  std::vector<FlatSentence> out;
  for (size_t p = 0; p < doc.parts.size(); ++p) {
    for (size_t s = 0; s < doc.parts[p].size(); ++s) {
      int len = 0;
      for (const TokenRow& r : doc.parts[p][s].rows) {
        if (!r.is_pro()) ++len;
      }
      out.push_back({static_cast<int>(p), static_cast<int>(s), len});
    }
  }
  return out;
}

std::vector<int> stripped_indices(const Sentence& sent) {
  std::vector<int> out(sent.rows.size());
  int n = 0;
  for (size_t i = 0; i < sent.rows.size(); ++i) {
    out[i] = n;
    if (!sent.rows[i].is_pro()) ++n;
  }
  return out;
}

}  // namespace

AlignmentTable align(const OnfDocument& onf, const Document& conll) {
  if (!onf.doc_id.empty() && !conll.doc_id.empty() && onf.doc_id != conll.doc_id) {
    throw DocumentIdMismatch("'" + onf.doc_id + "' vs '" + conll.doc_id + "'");
  }
  const std::vector<FlatSentence> sentences = flatten(conll);

  // Zero markers occupy token slots in the ONF stream; tokens after a marker
  // shift left by one once markers are removed.
  std::map<int, std::set<int>> markers;  // global sentence -> marker positions
  for (const OnfChain& chain : onf.chains) {
    for (const OnfChainMember& m : chain.members) {
      if (m.is_azp) markers[m.coordinate.sentence_index].insert(m.coordinate.start_word);
    }
  }
  auto markers_before = [&](int sentence, int pos) {
    auto it = markers.find(sentence);
    if (it == markers.end()) return 0;
    return static_cast<int>(std::distance(it->second.begin(), it->second.lower_bound(pos)));
  };

  AlignmentTable table;
  for (const OnfChain& chain : onf.chains) {
    std::vector<MemberAlignment>& row = table.per_chain.emplace_back();
    for (const OnfChainMember& m : chain.members) {
      MemberAlignment a;
      a.is_azp = m.is_azp;
      const OnfCoordinate& c = m.coordinate;
      if (c.sentence_index < 0 || c.sentence_index >= static_cast<int>(sentences.size())) {
        a.failure = "sentence index " + std::to_string(c.sentence_index) + " out of range";
        row.push_back(std::move(a));
        continue;
      }
      const FlatSentence& fs = sentences[c.sentence_index];
      if (m.is_azp) {
        int gap = c.start_word - markers_before(c.sentence_index, c.start_word);
        if (gap < 0 || gap > fs.stripped_len) {
          a.failure = "gap position out of range";
        } else {
          a.gap = Azp{fs.part, fs.local, gap};
        }
      } else {
        int start = c.start_word - markers_before(c.sentence_index, c.start_word);
        int end = c.end_word - markers_before(c.sentence_index, c.end_word);
        if (start < 0 || start > end || end >= fs.stripped_len) {
          a.failure = "token span out of range";
        } else {
          a.span = Mention{fs.part, fs.local, start, end};
        }
      }
      row.push_back(std::move(a));
    }
  }
  return table;
}

MergeResult plan_merge(const OnfDocument& onf, const Document& conll) {
  MergeResult result;
  result.plan.doc_id = conll.doc_id;
  const AlignmentTable table = align(onf, conll);

  const ClusterSet existing = extract_mentions(conll);
  std::map<Mention, int> span_to_chain;
  std::set<std::pair<Azp, int>> existing_azps;
  int max_id = -1;
  for (const Cluster& c : existing.clusters) {
    max_id = std::max(max_id, c.id);
    for (const Member& m : c.members) {
      if (const Mention* men = std::get_if<Mention>(&m)) {
        span_to_chain[*men] = c.id;
      } else {
        existing_azps.insert({std::get<Azp>(m), c.id});
      }
    }
  }
  int next_fresh = max_id + 1;

  for (size_t ci = 0; ci < onf.chains.size(); ++ci) {
    const OnfChain& chain = onf.chains[ci];
    const std::vector<MemberAlignment>& aligned = table.per_chain[ci];
    const bool has_azp =
        std::any_of(chain.members.begin(), chain.members.end(),
                    [](const OnfChainMember& m) { return m.is_azp; });
    if (!has_azp) continue;
    if (chain.kind == OnfChainKind::APPOS) {
      result.rejects.push_back({chain.chain_id, "appos_chain", "APPOS chains are never merged"});
      continue;
    }

    std::vector<Mention> overt;
    std::vector<Azp> gaps;
    std::string failure;
    for (const MemberAlignment& a : aligned) {
      if (!a.aligned()) {
        failure = a.failure;
        break;
      }
      if (a.is_azp) {
        gaps.push_back(*a.gap);
      } else {
        overt.push_back(*a.span);
      }
    }
    if (!failure.empty()) {
      result.rejects.push_back({chain.chain_id, "unalignable_member", failure});
      continue;
    }
    if (overt.empty()) {
      result.rejects.push_back({chain.chain_id, "azp_only_chain", "chain has no overt member"});
      continue;
    }

    std::set<int> matched;
    for (const Mention& m : overt) {
      auto it = span_to_chain.find(m);
      if (it != span_to_chain.end()) matched.insert(it->second);
    }
    if (matched.size() > 1) {
      std::string ids;
      for (int id : matched) ids += std::to_string(id) + " ";
      result.rejects.push_back({chain.chain_id, "ambiguous_chain_match",
                                "members map into CoNLL chains: " + ids});
      continue;
    }

    int target_id;
    if (matched.size() == 1) {
      target_id = *matched.begin();
    } else if (overt.size() == 1) {
      // singleton rescue: a fresh chain covering the mention and its AZPs
      target_id = next_fresh++;
      result.plan.new_mention_tags.push_back({overt.front(), target_id});
    } else {
      result.rejects.push_back({chain.chain_id, "unmatched_chain",
                                "multiple overt members but none in a CoNLL chain"});
      continue;
    }

    for (const Azp& gap : gaps) {
      if (existing_azps.count({gap, target_id})) continue;  // already merged
      result.plan.insertions.push_back(
          {gap.part, gap.sentence, gap.gap_index, target_id,
           matched.size() == 1 ? Provenance::existing_chain : Provenance::new_chain});
    }
  }

  std::sort(result.plan.insertions.begin(), result.plan.insertions.end(),
            [](const Insertion& a, const Insertion& b) {
              return std::tie(a.part, a.sentence, a.gap_index, a.chain_id) <
                     std::tie(b.part, b.sentence, b.gap_index, b.chain_id);
            });

  const std::vector<FlatSentence> sentences = flatten(conll);
  for (const FlatSentence& fs : sentences) {
    int n_ins = 0;
    for (const Insertion& ins : result.plan.insertions) {
      if (ins.part == fs.part && ins.sentence == fs.local) ++n_ins;
    }
    if (n_ins == 0) continue;
    std::vector<int>& m = result.plan.index_map[{fs.part, fs.local}];
    m.resize(fs.stripped_len);
    for (int orig = 0; orig < fs.stripped_len; ++orig) {
      int shift = 0;
      for (const Insertion& ins : result.plan.insertions) {
        if (ins.part == fs.part && ins.sentence == fs.local && ins.gap_index <= orig) ++shift;
      }
      m[orig] = orig + shift;
    }
  }
  return result;
}

namespace {

Sentence& locate(Document& doc, int part, int sentence, const char* what) {
  if (part < 0 || part >= static_cast<int>(doc.parts.size()) || sentence < 0 ||
      sentence >= static_cast<int>(doc.parts[part].size())) {
    throw StalePlan(std::string(what) + " references sentence outside document");
  }
  return doc.parts[part][sentence];
}

bool has_unit_tag(const TokenRow& row, int chain_id) {
  for (const CorefTag& t : row.coref_tags) {
    if (t.chain_id == chain_id && t.boundary == CorefTag::Boundary::open_and_close) return true;
  }
  return false;
}

void renumber(Sentence& sent, int base) {
  for (size_t i = 0; i < sent.rows.size(); ++i) {
    sent.rows[i].word_number = base + static_cast<int>(i);
  }
}

}  // namespace

Document apply_merge(const MergePlan& plan, const Document& conll) {
  if (!plan.doc_id.empty() && plan.doc_id != conll.doc_id) {
    throw StalePlan("plan was made for '" + plan.doc_id + "', got '" + conll.doc_id + "'");
  }
  Document out = conll;

  for (const Insertion& ins : plan.insertions) {
    Sentence& sent = locate(out, ins.part, ins.sentence, "insertion");
    std::vector<int> sidx = stripped_indices(sent);
    int stripped_len = sidx.empty() ? 0 : sidx.back() + (sent.rows.back().is_pro() ? 0 : 1);
    if (ins.gap_index < 0 || ins.gap_index > stripped_len) {
      throw StalePlan("insertion gap out of range");
    }

    // already present at this gap with this chain id -> no-op
    bool present = false;
    size_t insert_at = sent.rows.size();
    for (size_t i = 0; i < sent.rows.size(); ++i) {
      if (sidx[i] == ins.gap_index && sent.rows[i].is_pro() &&
          has_unit_tag(sent.rows[i], ins.chain_id)) {
        present = true;
        break;
      }
      if (sidx[i] == ins.gap_index && !sent.rows[i].is_pro()) {
        insert_at = i;
        break;
      }
    }
    if (present) continue;

    const TokenRow& model = sent.rows.front();
    TokenRow pro;
    pro.doc_id = model.doc_id;
    pro.part_number = model.part_number;
    pro.word = kProMarker;
    pro.pos = "PRON";
    pro.parse_bit = "*";
    pro.lemma = pro.frameset_id = pro.word_sense = pro.speaker = pro.named_entity = "-";
    pro.arguments.assign(model.arguments.size(), "-");
    pro.coref_tags = {{ins.chain_id, CorefTag::Boundary::open_and_close}};
    const int base = sent.rows.front().word_number;
    sent.rows.insert(sent.rows.begin() + insert_at, std::move(pro));
    renumber(sent, base);
  }

  for (const NewMentionTag& tag : plan.new_mention_tags) {
    Sentence& sent = locate(out, tag.span.part, tag.span.sentence, "rescue tag");
    std::vector<int> sidx = stripped_indices(sent);
    TokenRow* start_row = nullptr;
    TokenRow* end_row = nullptr;
    for (size_t i = 0; i < sent.rows.size(); ++i) {
      if (sent.rows[i].is_pro()) continue;
      if (sidx[i] == tag.span.start && !start_row) start_row = &sent.rows[i];
      if (sidx[i] == tag.span.end) end_row = &sent.rows[i];
    }
    if (!start_row || !end_row) throw StalePlan("rescue span not found");
    bool already = false;
    for (const CorefTag& t : start_row->coref_tags) {
      if (t.chain_id == tag.chain_id) already = true;
    }
    if (already) continue;
    if (start_row == end_row) {
      start_row->coref_tags.push_back({tag.chain_id, CorefTag::Boundary::open_and_close});
    } else {
      start_row->coref_tags.push_back({tag.chain_id, CorefTag::Boundary::open});
      end_row->coref_tags.push_back({tag.chain_id, CorefTag::Boundary::close});
    }
  }
  return out;
}

Document undo_merge(const MergePlan& plan, const Document& merged) {
  if (!plan.doc_id.empty() && plan.doc_id != merged.doc_id) {
    throw StalePlan("plan was made for '" + plan.doc_id + "', got '" + merged.doc_id + "'");
  }
  Document out = merged;

  for (const Insertion& ins : plan.insertions) {
    Sentence& sent = locate(out, ins.part, ins.sentence, "insertion");
    std::vector<int> sidx = stripped_indices(sent);
    int base = sent.rows.front().word_number;
    bool removed = false;
    for (size_t i = 0; i < sent.rows.size(); ++i) {
      if (sent.rows[i].is_pro() && sidx[i] == ins.gap_index &&
          has_unit_tag(sent.rows[i], ins.chain_id)) {
        sent.rows.erase(sent.rows.begin() + i);
        removed = true;
        break;
      }
    }
    if (!removed) throw StalePlan("planned *pro* row not present to undo");
    renumber(sent, base);
  }

  for (const NewMentionTag& tag : plan.new_mention_tags) {
    Sentence& sent = locate(out, tag.span.part, tag.span.sentence, "rescue tag");
    std::vector<int> sidx = stripped_indices(sent);
    for (size_t i = 0; i < sent.rows.size(); ++i) {
      if (sent.rows[i].is_pro()) continue;
      if (sidx[i] == tag.span.start || sidx[i] == tag.span.end) {
        auto& tags = sent.rows[i].coref_tags;
        tags.erase(std::remove_if(tags.begin(), tags.end(),
                                  [&](const CorefTag& t) { return t.chain_id == tag.chain_id; }),
                   tags.end());
      }
    }
  }
  return out;
}

Document insert_untagged_pros(const Document& doc, const std::vector<Azp>& gaps,
                              std::map<std::pair<int, int>, std::vector<int>>* index_map) {
  Document out = doc;
  std::vector<Azp> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  for (const Azp& g : sorted) {
    Sentence& sent = locate(out, g.part, g.sentence, "gap");
    std::vector<int> sidx = stripped_indices(sent);
    int stripped_len = sidx.empty() ? 0 : sidx.back() + (sent.rows.back().is_pro() ? 0 : 1);
    if (g.gap_index < 0 || g.gap_index > stripped_len) throw StalePlan("gap out of range");
    size_t insert_at = sent.rows.size();
    for (size_t i = 0; i < sent.rows.size(); ++i) {
      if (sidx[i] == g.gap_index && !sent.rows[i].is_pro()) {
        insert_at = i;
        break;
      }
    }
    const TokenRow& model = sent.rows.front();
    TokenRow pro;
    pro.doc_id = model.doc_id;
    pro.part_number = model.part_number;
    pro.word = kProMarker;
    pro.pos = "PRON";
    pro.parse_bit = "*";
    pro.lemma = pro.frameset_id = pro.word_sense = pro.speaker = pro.named_entity = "-";
    pro.arguments.assign(model.arguments.size(), "-");
    const int base = sent.rows.front().word_number;
    sent.rows.insert(sent.rows.begin() + insert_at, std::move(pro));
    renumber(sent, base);
  }
  if (index_map) {
    index_map->clear();
    for (size_t p = 0; p < doc.parts.size(); ++p) {
      for (size_t s = 0; s < doc.parts[p].size(); ++s) {
        int len = 0;
        for (const TokenRow& r : doc.parts[p][s].rows) {
          if (!r.is_pro()) ++len;
        }
        int n_ins = 0;
        for (const Azp& g : sorted) {
          if (g.part == static_cast<int>(p) && g.sentence == static_cast<int>(s)) ++n_ins;
        }
        if (n_ins == 0) continue;
        std::vector<int>& m = (*index_map)[{static_cast<int>(p), static_cast<int>(s)}];
        m.resize(len);
        for (int orig = 0; orig < len; ++orig) {
          int shift = 0;
          for (const Azp& g : sorted) {
            if (g.part == static_cast<int>(p) && g.sentence == static_cast<int>(s) &&
                g.gap_index <= orig) {
              ++shift;
            }
          }
          m[orig] = orig + shift;
        }
      }
    }
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<Document>& docs) {
  CorpusStats stats;
  stats.documents = static_cast<long>(docs.size());
  for (const Document& doc : docs) {
    for (const auto& part : doc.parts) {
      stats.sentences += static_cast<long>(part.size());
      for (const Sentence& sent : part) {
        for (const TokenRow& row : sent.rows) {
          if (row.is_pro()) {
            ++stats.azps;
          } else {
            ++stats.words;
          }
        }
      }
    }
  }
  return stats;
}

}  // namespace zcoref
