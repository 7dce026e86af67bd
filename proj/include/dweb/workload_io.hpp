/*
 * Copyright (c) 2026 The dweb Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dweb/dialect.hpp"
#include "dweb/error.hpp"
#include "dweb/params.hpp"
#include "dweb/query.hpp"
#include "dweb/sql_render.hpp"
#include "dweb/workload_gen.hpp"

namespace dweb {

// ---------------------------------------------------------------------------
// Workload file
//
//   # SEED=42
//   # PARAM NB_Q=100
//   ...
//   -- QUERY 1 kind=OLAP depth=0
//   SELECT ... ;
//
// Query text is the canonical (ansi) rendering, one statement per record.
// ---------------------------------------------------------------------------

inline void save_workload(std::ostream& out, const Workload& w) {
  using detail::format_double;
  const auto& p = w.params;
  out << "# SEED=" << w.seed << '\n'
      << "# PARAM NB_Q=" << p.nb_q << '\n'
      << "# PARAM Q_AVG_NB_ATT=" << format_double(p.q_avg_nb_att) << '\n'
      << "# PARAM AVG_NB_RESTR=" << format_double(p.avg_nb_restr) << '\n'
      << "# PARAM PROB_OLAP=" << format_double(p.prob_olap) << '\n'
      << "# PARAM AVG_NB_AGGREG=" << format_double(p.avg_nb_aggreg) << '\n'
      << "# PARAM PROB_CUBE=" << format_double(p.prob_cube) << '\n'
      << "# PARAM PROB_HAVING=" << format_double(p.prob_having) << '\n'
      << "# PARAM AVG_NB_DD=" << format_double(p.avg_nb_dd) << '\n'
      << "# PARAM SIGMA_RATIO=" << format_double(w.sigma_ratio) << '\n';
  const auto ansi = dialects::ansi();
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    const auto& q = w.queries[i];
    out << "-- QUERY " << (i + 1) << " kind=" << to_string(q.kind) << " depth=" << q.drill_depth << '\n'
        << render_sql(q, ansi) << ";\n";
  }
}

inline void save_workload_file(const Workload& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write workload file " + path);
  save_workload(out, w);
  out.flush();
  if (!out) throw Error("error writing workload file " + path);
}

namespace detail {

struct Token {
  enum Kind { kWord, kString, kNumber, kSymbol, kEnd } kind = kEnd;
  std::string text;
};

inline std::vector<Token> tokenize_sql(std::string_view sql, std::size_t line) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < sql.size()) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '\'') {
      std::string s;
      ++i;
      while (true) {
        if (i >= sql.size()) throw ParseError("unterminated string literal", line);
        if (sql[i] == '\'') {
          if (i + 1 < sql.size() && sql[i + 1] == '\'') {
            s += '\'';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        s += sql[i++];
      }
      out.push_back({Token::kString, std::move(s)});
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
               (c == '.' && i + 1 < sql.size() && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
      std::size_t j = i + 1;
      while (j < sql.size() && (std::isalnum(static_cast<unsigned char>(sql[j])) || sql[j] == '.' ||
                                ((sql[j] == '-' || sql[j] == '+') && (sql[j - 1] == 'e' || sql[j - 1] == 'E')))) {
        ++j;
      }
      out.push_back({Token::kNumber, std::string(sql.substr(i, j - i))});
      i = j;
    } else if (is_word(c)) {
      std::size_t j = i;
      while (j < sql.size() && is_word(sql[j])) ++j;
      out.push_back({Token::kWord, std::string(sql.substr(i, j - i))});
      i = j;
    } else if ((c == '<' || c == '>') && i + 1 < sql.size() && (sql[i + 1] == '=' || (c == '<' && sql[i + 1] == '>'))) {
      out.push_back({Token::kSymbol, std::string(sql.substr(i, 2))});
      i += 2;
    } else if (std::string_view("(),.=<>*").find(c) != std::string_view::npos) {
      out.push_back({Token::kSymbol, std::string(1, c)});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "' in query", line);
    }
  }
  out.push_back({Token::kEnd, {}});
  return out;
}

/// Recursive-descent reader for the canonical query form.
class QueryParser {
 public:
  QueryParser(std::string_view sql, std::size_t line) : tokens_(tokenize_sql(sql, line)), line_(line) {}

  QueryAst parse() {
    QueryAst q;
    expect_word("SELECT");
    do {
      if (peek_word("SUM") || (peek().kind == Token::kWord && peek(1).text == "(")) {
        Aggregate a;
        a.function = take().text;
        expect("(");
        a.measure = attribute();
        expect(")");
        expect_word("AS");
        a.alias = word();
        q.aggregates.push_back(std::move(a));
      } else {
        if (!q.aggregates.empty()) fail("attribute after aggregate in select list");
        q.select_attrs.push_back(attribute());
      }
    } while (accept(","));

    expect_word("FROM");
    do q.tables.push_back(word());
    while (accept(","));

    if (accept_word("WHERE")) {
      do {
        AttributeRef left = attribute();
        const CompareOp op = compare_op();
        if (peek().kind == Token::kWord) {
          if (op != CompareOp::kEq) fail("join condition must use '='");
          if (!q.restrictions.empty()) fail("join condition after restriction");
          q.join_conds.push_back({std::move(left), attribute()});
        } else {
          q.restrictions.push_back({std::move(left), op, operand(op)});
        }
      } while (accept_word("AND"));
    }

    if (accept_word("GROUP")) {
      expect_word("BY");
      if (accept_word("CUBE")) {
        q.grouping = GroupingMode::kCube;
        q.group_by = attribute_list_in_parens();
      } else if (accept_word("ROLLUP")) {
        q.grouping = GroupingMode::kRollup;
        q.group_by = attribute_list_in_parens();
      } else {
        q.grouping = GroupingMode::kPlain;
        do q.group_by.push_back(attribute());
        while (accept(","));
      }
    }

    if (accept_word("HAVING")) {
      Having h;
      if (peek(1).text == "(") {
        take();
        expect("(");
        const auto m = attribute();
        expect(")");
        h.aggregate = find_aggregate(q, [&](const Aggregate& a) { return a.measure == m; });
      } else {
        const auto alias = word();
        h.aggregate = find_aggregate(q, [&](const Aggregate& a) { return a.alias == alias; });
      }
      h.op = compare_op();
      h.value = number();
      q.having = h;
    }
    if (peek().kind != Token::kEnd) fail("unexpected '" + peek().text + "'");
    q.kind = q.aggregates.empty() ? QueryKind::kExtraction : QueryKind::kOlap;
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  Token take() {
    if (peek().kind == Token::kEnd) fail("unexpected end of query");
    return tokens_[pos_++];
  }
  bool peek_word(std::string_view w) const { return peek().kind == Token::kWord && peek().text == w; }
  bool accept(std::string_view sym) {
    if (peek().kind == Token::kSymbol && peek().text == sym) return ++pos_, true;
    return false;
  }
  bool accept_word(std::string_view w) {
    if (peek_word(w)) return ++pos_, true;
    return false;
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) fail("expected '" + std::string(sym) + "' near '" + peek().text + "'");
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail("expected " + std::string(w) + " near '" + peek().text + "'");
  }
  std::string word() {
    if (peek().kind != Token::kWord) fail("expected identifier near '" + peek().text + "'");
    return take().text;
  }
  AttributeRef attribute() {
    AttributeRef a;
    a.table = word();
    expect(".");
    a.column = word();
    return a;
  }
  std::vector<AttributeRef> attribute_list_in_parens() {
    std::vector<AttributeRef> out;
    expect("(");
    do out.push_back(attribute());
    while (accept(","));
    expect(")");
    return out;
  }
  CompareOp compare_op() {
    static const std::pair<std::string_view, CompareOp> ops[] = {
        {"=", CompareOp::kEq},  {"<>", CompareOp::kNe}, {"<", CompareOp::kLt},
        {"<=", CompareOp::kLe}, {">", CompareOp::kGt},  {">=", CompareOp::kGe}};
    if (accept_word("IN")) return CompareOp::kIn;
    for (const auto& [text, op] : ops) {
      if (accept(text)) return op;
    }
    fail("expected comparison operator near '" + peek().text + "'");
  }
  double number() {
    if (peek().kind != Token::kNumber) fail("expected number near '" + peek().text + "'");
    return parse_double(take().text, "number", line_);
  }
  Operand operand(CompareOp op) {
    if (op == CompareOp::kIn) {
      std::vector<std::string> list;
      expect("(");
      do {
        if (peek().kind != Token::kString) fail("expected string in IN list");
        list.push_back(take().text);
      } while (accept(","));
      expect(")");
      return list;
    }
    if (peek().kind == Token::kString) return take().text;
    return number();
  }
  template <class Pred>
  std::size_t find_aggregate(const QueryAst& q, Pred pred) {
    for (std::size_t i = 0; i < q.aggregates.size(); ++i) {
      if (pred(q.aggregates[i])) return i;
    }
    fail("HAVING references an unknown aggregate");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace detail

/// Parses one query in canonical form (trailing ';' optional).
inline QueryAst parse_query(std::string_view sql, std::size_t line = 0) {
  auto text = detail::trim(sql);
  if (!text.empty() && text.back() == ';') text.remove_suffix(1);
  return detail::QueryParser(text, line).parse();
}

inline Workload load_workload(std::istream& in) {
  Workload w;
  bool have_seed = false;
  std::string raw;
  std::size_t line = 0;

  struct Pending {
    std::size_t header_line = 0;
    QueryKind kind = QueryKind::kExtraction;
    std::size_t depth = 0;
    std::string sql;
    std::size_t sql_line = 0;
  };
  std::optional<Pending> pending;

  auto finish = [&](std::size_t at) {
    if (!pending) return;
    if (pending->sql.empty()) throw ParseError("query " + std::to_string(w.queries.size() + 1) + " has no text", at);
    throw ParseError("query not terminated by ';'", pending->sql_line);
  };

  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto text = detail::trim(raw);

    if (pending && !text.starts_with("-- QUERY") && !text.empty()) {
      if (pending->sql.empty()) pending->sql_line = line;
      if (!pending->sql.empty()) pending->sql += ' ';
      pending->sql += text;
      if (text.back() == ';') {
        QueryAst q = parse_query(pending->sql, pending->sql_line);
        if (q.kind != pending->kind) throw ParseError("query kind does not match its header", pending->header_line);
        q.drill_depth = pending->depth;
        if (const auto issues = check_query(q); !issues.empty()) throw ParseError(issues.front(), pending->sql_line);
        w.queries.push_back(std::move(q));
        pending.reset();
      }
      continue;
    }
    if (text.empty()) continue;

    if (text.starts_with("-- QUERY")) {
      finish(line);
      std::istringstream fields{std::string(text.substr(8))};
      std::size_t ordinal = 0;
      std::string kind_field, depth_field;
      if (!(fields >> ordinal >> kind_field >> depth_field) || !kind_field.starts_with("kind=") ||
          !depth_field.starts_with("depth=")) {
        throw ParseError("malformed query header", line);
      }
      if (ordinal != w.queries.size() + 1) throw ParseError("query ordinal out of sequence", line);
      Pending p;
      p.header_line = line;
      const auto kind = kind_field.substr(5);
      if (kind == "OLAP") p.kind = QueryKind::kOlap;
      else if (kind == "EXTRACTION") p.kind = QueryKind::kExtraction;
      else throw ParseError("unknown query kind '" + kind + "'", line);
      p.depth = detail::parse_u64(depth_field.substr(6), "depth", line);
      pending = std::move(p);
    } else if (text.starts_with("# SEED=")) {
      w.seed = detail::parse_u64(text.substr(7), "SEED", line);
      have_seed = true;
    } else if (text.starts_with("# PARAM ")) {
      const auto kv = text.substr(8);
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) throw ParseError("malformed parameter line", line);
      const auto key = detail::trim(kv.substr(0, eq));
      const auto value = detail::trim(kv.substr(eq + 1));
      static const std::vector<std::string_view> workload_keys = {
          "NB_Q", "Q_AVG_NB_ATT", "AVG_NB_RESTR", "PROB_OLAP", "AVG_NB_AGGREG", "PROB_CUBE", "PROB_HAVING", "AVG_NB_DD"};
      if (key == "SIGMA_RATIO") {
        w.sigma_ratio = detail::parse_double(value, key, line);
      } else if (std::find(workload_keys.begin(), workload_keys.end(), key) != workload_keys.end()) {
        ParameterSet scratch;
        scratch.workload = w.params;
        apply_config_value(scratch, key, value, line);
        w.params = scratch.workload;
      } else {
        throw ParseError("not a workload parameter: " + std::string(key), line);
      }
    } else if (text.starts_with("#")) {
      continue;
    } else {
      throw ParseError("unexpected line outside a query record", line);
    }
  }
  finish(line);
  if (!have_seed) throw ParseError("missing '# SEED=' header", line == 0 ? 1 : line);
  return w;
}

inline Workload load_workload_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open workload file " + path);
  return load_workload(in);
}

}  // namespace dweb
