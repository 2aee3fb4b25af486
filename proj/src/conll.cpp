#include "zcoref/conll.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace zcoref {
namespace {

bool valid_utf8(const std::string& s) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    int extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (int k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

int parse_int(const std::string& s, const char* what, int line_no) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size() || v < 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw MalformedHeader(std::string("line ") + std::to_string(line_no) + ": bad " + what +
                          " value '" + s + "'");
  }
}

// "#begin document (<id>); part <nnn>"
bool parse_begin_line(const std::string& line, std::string* doc_id, int* part, int line_no) {
  const std::string prefix = "#begin document (";
  if (line.rfind("#begin document", 0) != 0) return false;
  if (line.rfind(prefix, 0) != 0) throw MalformedHeader("line " + std::to_string(line_no) + ": " + line);
  size_t close = line.find(')', prefix.size());
  if (close == std::string::npos) {
    throw MalformedHeader("line " + std::to_string(line_no) + ": missing ')' in header");
  }
  *doc_id = line.substr(prefix.size(), close - prefix.size());
  const std::string part_kw = "; part ";
  if (line.compare(close + 1, part_kw.size(), part_kw) != 0) {
    throw MalformedHeader("line " + std::to_string(line_no) + ": missing '; part' in header");
  }
  std::string part_str = line.substr(close + 1 + part_kw.size());
  while (!part_str.empty() && (part_str.back() == '\r' || part_str.back() == ' ')) part_str.pop_back();
  *part = parse_int(part_str, "part number", line_no);
  return true;
}

void check_balance(const Sentence& sent, int line_no_hint) {
  std::map<int, int> open_depth;
  for (const TokenRow& row : sent.rows) {
    for (const CorefTag& t : row.coref_tags) {
      if (t.boundary == CorefTag::Boundary::open) {
        open_depth[t.chain_id]++;
      } else if (t.boundary == CorefTag::Boundary::close) {
        if (--open_depth[t.chain_id] < 0) {
          throw UnbalancedCorefBrackets("near line " + std::to_string(line_no_hint) +
                                        ": close without open for chain " +
                                        std::to_string(t.chain_id));
        }
      }
    }
  }
  for (const auto& [id, depth] : open_depth) {
    if (depth != 0) {
      throw UnbalancedCorefBrackets("near line " + std::to_string(line_no_hint) +
                                    ": open without close for chain " + std::to_string(id));
    }
  }
}

}  // namespace

std::vector<CorefTag> parse_coref_cell(const std::string& cell) {
  std::vector<CorefTag> tags;
  if (cell == "-" || cell == "_") return tags;
  size_t i = 0;
  while (i <= cell.size()) {
    size_t bar = cell.find('|', i);
    std::string piece = cell.substr(i, bar == std::string::npos ? std::string::npos : bar - i);
    if (piece.empty()) throw MalformedCorefTag("empty tag in coref cell '" + cell + "'");
    CorefTag t;
    bool open = piece.front() == '(';
    bool close = piece.back() == ')';
    std::string digits = piece.substr(open ? 1 : 0, piece.size() - (open ? 1 : 0) - (close ? 1 : 0));
    if ((!open && !close) || digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos) {
      throw MalformedCorefTag("unparseable coref tag '" + piece + "' in cell '" + cell + "'");
    }
    t.chain_id = std::stoi(digits);
    t.boundary = open && close ? CorefTag::Boundary::open_and_close
                 : open        ? CorefTag::Boundary::open
                               : CorefTag::Boundary::close;
    tags.push_back(t);
    if (bar == std::string::npos) break;
    i = bar + 1;
  }
  return tags;
}

std::string format_coref_cell(const std::vector<CorefTag>& tags) {
  if (tags.empty()) return "-";
  std::string out;
  for (size_t i = 0; i < tags.size(); ++i) {
    if (i) out += '|';
    const CorefTag& t = tags[i];
    switch (t.boundary) {
      case CorefTag::Boundary::open:
        out += '(' + std::to_string(t.chain_id);
        break;
      case CorefTag::Boundary::close:
        out += std::to_string(t.chain_id) + ')';
        break;
      case CorefTag::Boundary::open_and_close:
        out += '(' + std::to_string(t.chain_id) + ')';
        break;
    }
  }
  return out;
}

std::vector<Document> parse_conll(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_conll(text);
}

std::vector<Document> parse_conll(const std::string& text) {
  if (!valid_utf8(text)) throw NonUtf8Input("input is not valid UTF-8");

  std::vector<Document> docs;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  std::string cur_doc_id;
  int cur_part = -1;
  bool in_part = false;
  Sentence cur_sent;

  auto flush_sentence = [&]() {
    if (cur_sent.rows.empty()) return;
    check_balance(cur_sent, line_no);
    docs.back().parts.back().push_back(std::move(cur_sent));
    cur_sent = Sentence{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::string doc_id;
    int part = 0;
    if (parse_begin_line(line, &doc_id, &part, line_no)) {
      if (in_part) {
        throw MalformedHeader("line " + std::to_string(line_no) +
                              ": nested '#begin document' (missing '#end document')");
      }
      if (doc_id == cur_doc_id && part == cur_part + 1) {
        docs.back().parts.emplace_back();
      } else if (part == 0) {
        docs.push_back(Document{doc_id, {{}}});
        cur_doc_id = doc_id;
      } else {
        throw MalformedHeader("line " + std::to_string(line_no) + ": part " + std::to_string(part) +
                              " of '" + doc_id + "' is out of sequence");
      }
      cur_part = part;
      in_part = true;
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      if (!in_part) {
        throw MalformedHeader("line " + std::to_string(line_no) + ": stray '#end document'");
      }
      flush_sentence();
      in_part = false;
      continue;
    }
    if (is_blank(line)) {
      if (in_part) flush_sentence();
      continue;
    }
    if (!in_part) {
      throw MalformedHeader("line " + std::to_string(line_no) + ": token row outside a document");
    }

    std::vector<std::string> cols = split_ws(line);
    if (cols.size() < 12) {
      throw ColumnCountMismatch("line " + std::to_string(line_no) + ": expected >= 12 columns, got " +
                                std::to_string(cols.size()));
    }
    TokenRow row;
    row.doc_id = cols[0];
    row.part_number = parse_int(cols[1], "part column", line_no);
    row.word_number = parse_int(cols[2], "word number", line_no);
    row.word = cols[3];
    row.pos = cols[4];
    row.parse_bit = cols[5];
    row.lemma = cols[6];
    row.frameset_id = cols[7];
    row.word_sense = cols[8];
    row.speaker = cols[9];
    row.named_entity = cols[10];
    row.arguments.assign(cols.begin() + 11, cols.end() - 1);
    row.coref_tags = parse_coref_cell(cols.back());
    cur_sent.rows.push_back(std::move(row));
  }
  if (in_part) throw MalformedHeader("missing '#end document' at end of input");
  return docs;
}

void write_conll(const std::vector<Document>& docs, std::ostream& out) {
  for (const Document& doc : docs) {
    for (size_t p = 0; p < doc.parts.size(); ++p) {
      char part_buf[8];
      std::snprintf(part_buf, sizeof(part_buf), "%03zu", p);
      out << "#begin document (" << doc.doc_id << "); part " << part_buf << '\n';
      for (const Sentence& sent : doc.parts[p]) {
        if (sent.rows.empty()) throw InvariantViolation("empty sentence in " + doc.doc_id);
        check_balance(sent, 0);
        for (const TokenRow& r : sent.rows) {
          out << r.doc_id << ' ' << r.part_number << ' ' << r.word_number << ' ' << r.word << ' '
              << r.pos << ' ' << r.parse_bit << ' ' << r.lemma << ' ' << r.frameset_id << ' '
              << r.word_sense << ' ' << r.speaker << ' ' << r.named_entity;
          for (const std::string& a : r.arguments) out << ' ' << a;
          out << ' ' << format_coref_cell(r.coref_tags) << '\n';
        }
        out << '\n';
      }
      out << "#end document\n";
    }
  }
}

std::string write_conll(const std::vector<Document>& docs) {
  std::ostringstream out;
  write_conll(docs, out);
  return out.str();
}

namespace {

// stripped_index[i] = number of non-pro rows before row i in the sentence.
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

ClusterSet extract_mentions(const Document& doc) {
  std::map<int, std::vector<Member>> chains;
  for (size_t p = 0; p < doc.parts.size(); ++p) {
    for (size_t s = 0; s < doc.parts[p].size(); ++s) {
      const Sentence& sent = doc.parts[p][s];
      const std::vector<int> sidx = stripped_indices(sent);
      std::map<int, std::vector<size_t>> open_stack;  // chain -> row indices of opens
      for (size_t i = 0; i < sent.rows.size(); ++i) {
        for (const CorefTag& t : sent.rows[i].coref_tags) {
          size_t start_row, end_row;
          if (t.boundary == CorefTag::Boundary::open) {
            open_stack[t.chain_id].push_back(i);
            continue;
          }
          if (t.boundary == CorefTag::Boundary::close) {
            auto& st = open_stack[t.chain_id];
            if (st.empty()) throw UnbalancedCorefBrackets("close without open in extract_mentions");
            start_row = st.back();
            st.pop_back();
            end_row = i;
          } else {
            start_row = end_row = i;
          }
          // Pro rows are transparent span boundaries: a single tagged pro row
          // is an AZP member; otherwise the span covers its non-pro tokens.
          size_t first_real = start_row, last_real = end_row;
          while (first_real <= end_row && sent.rows[first_real].is_pro()) ++first_real;
          while (last_real >= start_row && last_real > 0 && sent.rows[last_real].is_pro()) --last_real;
          if (first_real > end_row || sent.rows[last_real].is_pro()) {
            if (start_row == end_row) {
              chains[t.chain_id].push_back(
                  Azp{static_cast<int>(p), static_cast<int>(s), sidx[start_row]});
              continue;
            }
            throw InvariantViolation("multi-token span consisting only of *pro* rows");
          }
          chains[t.chain_id].push_back(Mention{static_cast<int>(p), static_cast<int>(s),
                                               sidx[first_real], sidx[last_real]});
        }
      }
    }
  }
  ClusterSet out;
  for (auto& [id, members] : chains) out.clusters.push_back(Cluster{id, std::move(members)});
  out.sort_members();
  return out;
}

Document encode_mentions(const ClusterSet& clusters, const Document& doc) {
  Document out = doc;
  for (auto& part : out.parts) {
    for (auto& sent : part) {
      for (auto& row : sent.rows) row.coref_tags.clear();
    }
  }

  struct CellTags {
    std::vector<CorefTag> opens;   // with span end stored for ordering
    std::vector<int> open_ends;
    std::vector<CorefTag> units;
    std::vector<CorefTag> closes;
    std::vector<int> close_starts;
  };

  auto locate_sentence = [&](int part, int sentence) -> Sentence& {
    if (part < 0 || part >= static_cast<int>(out.parts.size()) || sentence < 0 ||
        sentence >= static_cast<int>(out.parts[part].size())) {
      throw InvariantViolation("member references a sentence outside the document");
    }
    return out.parts[part][sentence];
  };

  // Collect per-row tag groups, then emit in canonical order.
  std::map<TokenRow*, CellTags> cells;
  for (const Cluster& c : clusters.clusters) {
    for (const Member& m : c.members) {
      if (const Mention* men = std::get_if<Mention>(&m)) {
        Sentence& sent = locate_sentence(men->part, men->sentence);
        const std::vector<int> sidx = stripped_indices(sent);
        TokenRow* start_row = nullptr;
        TokenRow* end_row = nullptr;
        for (size_t i = 0; i < sent.rows.size(); ++i) {
          if (sent.rows[i].is_pro()) continue;
          if (sidx[i] == men->start && !start_row) start_row = &sent.rows[i];
          if (sidx[i] == men->end) end_row = &sent.rows[i];
        }
        if (!start_row || !end_row) {
          throw InvariantViolation("mention span not found in sentence");
        }
        if (start_row == end_row) {
          cells[start_row].units.push_back({c.id, CorefTag::Boundary::open_and_close});
        } else {
          cells[start_row].opens.push_back({c.id, CorefTag::Boundary::open});
          cells[start_row].open_ends.push_back(men->end);
          cells[end_row].closes.push_back({c.id, CorefTag::Boundary::close});
          cells[end_row].close_starts.push_back(men->start);
        }
      } else {
        const Azp& a = std::get<Azp>(m);
        Sentence& sent = locate_sentence(a.part, a.sentence);
        const std::vector<int> sidx = stripped_indices(sent);
        TokenRow* pro_row = nullptr;
        for (size_t i = 0; i < sent.rows.size(); ++i) {
          if (sent.rows[i].is_pro() && sidx[i] == a.gap_index) {
            if (pro_row) throw InvariantViolation("two *pro* rows at one gap");
            pro_row = &sent.rows[i];
          }
        }
        if (!pro_row) throw InvariantViolation("no *pro* row at AZP gap");
        cells[pro_row].units.push_back({c.id, CorefTag::Boundary::open_and_close});
      }
    }
  }

  for (auto& [row, tags] : cells) {
    // opens: longer spans first; units by id; closes: inner (later start) first
    std::vector<size_t> oidx(tags.opens.size()), cidx(tags.closes.size());
    for (size_t i = 0; i < oidx.size(); ++i) oidx[i] = i;
    for (size_t i = 0; i < cidx.size(); ++i) cidx[i] = i;
    std::sort(oidx.begin(), oidx.end(), [&](size_t a, size_t b) {
      if (tags.open_ends[a] != tags.open_ends[b]) return tags.open_ends[a] > tags.open_ends[b];
      return tags.opens[a].chain_id < tags.opens[b].chain_id;
    });
    std::sort(cidx.begin(), cidx.end(), [&](size_t a, size_t b) {
      if (tags.close_starts[a] != tags.close_starts[b])
        return tags.close_starts[a] > tags.close_starts[b];
      return tags.closes[a].chain_id < tags.closes[b].chain_id;
    });
    std::sort(tags.units.begin(), tags.units.end());
    for (size_t i : oidx) row->coref_tags.push_back(tags.opens[i]);
    for (const CorefTag& t : tags.units) row->coref_tags.push_back(t);
    for (size_t i : cidx) row->coref_tags.push_back(tags.closes[i]);
  }
  return out;
}

}  // namespace zcoref
