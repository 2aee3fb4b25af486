#include "zcoref/onf.hpp"

#include <istream>
#include <set>
#include <sstream>

namespace zcoref {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// "Chain 71 (IDENT)"
bool parse_chain_header(const std::string& line, OnfChain* chain) {
  std::istringstream ss(trim(line));
  std::string kw, id_str, kind_str;
  if (!(ss >> kw >> id_str >> kind_str)) return false;
  if (kw != "Chain") return false;
  std::string rest;
  if (ss >> rest) throw MalformedChainHeader("trailing text in chain header: " + line);
  if (id_str.empty() || id_str.find_first_not_of("0123456789") != std::string::npos) {
    throw MalformedChainHeader("bad chain id in header: " + line);
  }
  chain->chain_id = std::stoi(id_str);
  if (kind_str == "(IDENT)") {
    chain->kind = OnfChainKind::IDENT;
  } else if (kind_str == "(APPOS)") {
    chain->kind = OnfChainKind::APPOS;
  } else {
    throw MalformedChainHeader("unknown chain kind in header: " + line);
  }
  return true;
}

bool parse_coordinate(const std::string& tok, OnfCoordinate* coord) {
  size_t dot = tok.find('.');
  size_t dash = tok.find('-', dot == std::string::npos ? 0 : dot + 1);
  if (dot == std::string::npos || dash == std::string::npos) return false;
  std::string s = tok.substr(0, dot);
  std::string a = tok.substr(dot + 1, dash - dot - 1);
  std::string b = tok.substr(dash + 1);
  auto num = [](const std::string& x) {
    return !x.empty() && x.find_first_not_of("0123456789") == std::string::npos;
  };
  if (!num(s) || !num(a) || !num(b)) return false;
  coord->sentence_index = std::stoi(s);
  coord->start_word = std::stoi(a);
  coord->end_word = std::stoi(b);
  if (coord->start_word > coord->end_word) {
    throw MalformedCoordinate("start > end in coordinate '" + tok + "'");
  }
  return true;
}

bool surface_has_marker(const std::string& surface) {
  std::istringstream ss(surface);
  std::string tok;
  while (ss >> tok) {
    if (tok == "*") return true;
  }
  return false;
}

// "[ATTRIB|HEAD] <s>.<a>-<b> <surface...>"; member lines are indented.
bool parse_member_line(const std::string& line, const OnfChain& chain, OnfChainMember* member) {
  if (line.empty() || (line[0] != ' ' && line[0] != '\t')) return false;
  std::istringstream ss(trim(line));
  std::string first;
  if (!(ss >> first)) return false;
  member->role.reset();
  if (first == "ATTRIB" || first == "HEAD") {
    if (chain.kind != OnfChainKind::APPOS) {
      throw MalformedChainHeader("role label '" + first + "' on IDENT chain " +
                                 std::to_string(chain.chain_id));
    }
    member->role = first == "ATTRIB" ? OnfMemberRole::ATTRIB : OnfMemberRole::HEAD;
    if (!(ss >> first)) return false;
  }
  if (!parse_coordinate(first, &member->coordinate)) return false;
  std::string surface;
  std::getline(ss, surface);
  member->surface = trim(surface);
  member->is_azp = surface_has_marker(member->surface);
  return true;
}

}  // namespace

OnfDocument parse_onf(std::istream& in, const std::string& fallback_doc_id) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_onf(text, fallback_doc_id);
}

OnfDocument parse_onf(const std::string& text, const std::string& fallback_doc_id) {
  OnfDocument doc;
  doc.doc_id = fallback_doc_id;
  std::istringstream in(text);
  std::string line;
  std::set<int> seen_ids;
  bool in_chain = false;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::string id_prefix = "Document ID:";
    if (line.rfind(id_prefix, 0) == 0) {
      doc.doc_id = trim(line.substr(id_prefix.size()));
      in_chain = false;
      continue;
    }

    OnfChain header;
    if (trim(line).rfind("Chain ", 0) == 0 && parse_chain_header(line, &header)) {
      if (!seen_ids.insert(header.chain_id).second) {
        throw DuplicateChainId("chain id " + std::to_string(header.chain_id) + " repeats");
      }
      doc.chains.push_back(header);
      in_chain = true;
      continue;
    }

    if (in_chain) {
      OnfChainMember member;
      if (parse_member_line(line, doc.chains.back(), &member)) {
        doc.chains.back().members.push_back(std::move(member));
        continue;
      }
      if (doc.chains.back().members.empty()) {
        throw MalformedChainHeader("chain " + std::to_string(doc.chains.back().chain_id) +
                                   " has no members");
      }
      in_chain = false;
    }
    // lines outside chain blocks are ignored
  }
  if (in_chain && doc.chains.back().members.empty()) {
    throw MalformedChainHeader("chain " + std::to_string(doc.chains.back().chain_id) +
                               " has no members");
  }
  return doc;
}

std::vector<std::pair<int, OnfChainMember>> azp_members(const OnfDocument& doc) {
  std::vector<std::pair<int, OnfChainMember>> out;
  for (const OnfChain& chain : doc.chains) {
    for (const OnfChainMember& m : chain.members) {
      if (m.is_azp) out.emplace_back(chain.chain_id, m);
    }
  }
  return out;
}

}  // namespace zcoref
