#ifndef ZCOREF_JSON_IO_HPP
#define ZCOREF_JSON_IO_HPP

#include <json.hpp>

#include "zcoref/conll.hpp"
#include "zcoref/core.hpp"
#include "zcoref/merge.hpp"

namespace zcoref {

nlohmann::json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);

nlohmann::json clusters_to_json(const ClusterSet& set);
ClusterSet clusters_from_json(const nlohmann::json& j);

nlohmann::json gaps_to_json(const std::vector<Azp>& gaps);
std::vector<Azp> gaps_from_json(const nlohmann::json& j, int default_part = 0);

nlohmann::json rejects_to_json(const std::string& doc_id, const std::vector<RejectRecord>& rejects);

}  // namespace zcoref

#endif
