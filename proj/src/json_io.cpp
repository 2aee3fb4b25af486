#include "zcoref/json_io.hpp"

namespace zcoref {

using nlohmann::json;

json document_to_json(const Document& doc) {
  json parts = json::array();
  for (const auto& part : doc.parts) {
    json sentences = json::array();
    for (const Sentence& sent : part) {
      json rows = json::array();
      for (const TokenRow& r : sent.rows) {
        rows.push_back(json{{"word_number", r.word_number},
                            {"word", r.word},
                            {"pos", r.pos},
                            {"parse_bit", r.parse_bit},
                            {"lemma", r.lemma},
                            {"frameset_id", r.frameset_id},
                            {"word_sense", r.word_sense},
                            {"speaker", r.speaker},
                            {"named_entity", r.named_entity},
                            {"arguments", r.arguments},
                            {"coref", format_coref_cell(r.coref_tags)}});
      }
      sentences.push_back(std::move(rows));
    }
    parts.push_back(std::move(sentences));
  }
  return json{{"doc_id", doc.doc_id}, {"parts", parts}};
}

Document document_from_json(const json& j) {
  Document doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  int part_no = 0;
  for (const json& jpart : j.at("parts")) {
    auto& part = doc.parts.emplace_back();
    for (const json& jsent : jpart) {
      Sentence sent;
      for (const json& jrow : jsent) {
        TokenRow r;
        r.doc_id = doc.doc_id;
        r.part_number = part_no;
        r.word_number = jrow.at("word_number").get<int>();
        r.word = jrow.at("word").get<std::string>();
        r.pos = jrow.at("pos").get<std::string>();
        r.parse_bit = jrow.at("parse_bit").get<std::string>();
        r.lemma = jrow.at("lemma").get<std::string>();
        r.frameset_id = jrow.at("frameset_id").get<std::string>();
        r.word_sense = jrow.at("word_sense").get<std::string>();
        r.speaker = jrow.at("speaker").get<std::string>();
        r.named_entity = jrow.at("named_entity").get<std::string>();
        r.arguments = jrow.at("arguments").get<std::vector<std::string>>();
        r.coref_tags = parse_coref_cell(jrow.at("coref").get<std::string>());
        sent.rows.push_back(std::move(r));
      }
      part.push_back(std::move(sent));
    }
    ++part_no;
  }
  return doc;
}

json clusters_to_json(const ClusterSet& set) {
  json clusters = json::array();
  for (const Cluster& c : set.clusters) {
    json members = json::array();
    for (const Member& m : c.members) {
      if (const Mention* men = std::get_if<Mention>(&m)) {
        members.push_back(json{{"kind", "mention"},
                               {"part", men->part},
                               {"sentence", men->sentence},
                               {"start", men->start},
                               {"end", men->end}});
      } else {
        const Azp& a = std::get<Azp>(m);
        members.push_back(
            json{{"kind", "azp"}, {"part", a.part}, {"sentence", a.sentence}, {"gap", a.gap_index}});
      }
    }
    clusters.push_back(json{{"id", c.id}, {"members", members}});
  }
  return clusters;
}

ClusterSet clusters_from_json(const json& j) {
  ClusterSet out;
  for (const json& jc : j) {
    Cluster c;
    c.id = jc.at("id").get<int>();
    for (const json& jm : jc.at("members")) {
      const std::string kind = jm.at("kind").get<std::string>();
      if (kind == "mention") {
        c.members.push_back(Mention{jm.at("part").get<int>(), jm.at("sentence").get<int>(),
                                    jm.at("start").get<int>(), jm.at("end").get<int>()});
      } else if (kind == "azp") {
        c.members.push_back(Azp{jm.at("part").get<int>(), jm.at("sentence").get<int>(),
                                jm.at("gap").get<int>()});
      } else {
        throw Error("unknown member kind '" + kind + "'");
      }
    }
    out.clusters.push_back(std::move(c));
  }
  out.sort_members();
  return out;
}

json gaps_to_json(const std::vector<Azp>& gaps) {
  json out = json::array();
  for (const Azp& g : gaps) out.push_back(json::array({g.sentence, g.gap_index}));
  return out;
}

std::vector<Azp> gaps_from_json(const json& j, int default_part) {
  std::vector<Azp> out;
  for (const json& jg : j) {
    if (jg.size() == 3) {
      out.push_back(Azp{jg[0].get<int>(), jg[1].get<int>(), jg[2].get<int>()});
    } else {
      out.push_back(Azp{default_part, jg[0].get<int>(), jg[1].get<int>()});
    }
  }
  return out;
}

json rejects_to_json(const std::string& doc_id, const std::vector<RejectRecord>& rejects) {
  json out = json::array();
  for (const RejectRecord& r : rejects) {
    out.push_back(
        json{{"doc_id", doc_id}, {"chain_id", r.chain_id}, {"reason", r.reason}, {"detail", r.detail}});
  }
  return out;
}

}  // namespace zcoref
