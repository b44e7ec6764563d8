#include "selbox/parse.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace selbox {

ParseError::ParseError(int line, int col, const std::string& message)
    : UserError("line " + std::to_string(line) + ", col " + std::to_string(col) +
                ": " + message),
      line_(line),
      col_(col) {}

bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  auto head = static_cast<unsigned char>(name[0]);
  if (!std::isalpha(head) && name[0] != '_') return false;
  for (char ch : name.substr(1)) {
    auto c = static_cast<unsigned char>(ch);
    if (!std::isalnum(c) && ch != '_') return false;
  }
  return true;
}

bool is_reserved_name(std::string_view name) {
  return name.size() >= 2 && name[0] == '_' && name[1] == 'N';
}

namespace {

struct Token {
  std::string text;
  int line;
  int col; // 1-based byte offset
};

// Splits one line; "(", ")" and "|" are single-character tokens, "#"
// discards the rest of the line.
void lex_line(std::string_view text, int line_no, std::vector<Token>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    char ch = text[i];
    if (ch == '#') break;
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (ch == '(' || ch == ')' || ch == '|') {
      out.push_back({std::string(1, ch), line_no, static_cast<int>(i + 1)});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size()) {
      char c = text[i];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
          c == '|' || c == '#')
        break;
      ++i;
    }
    out.push_back({std::string(text.substr(start, i - start)), line_no,
                   static_cast<int>(start + 1)});
  }
}

class TokenStream {
public:
  TokenStream(std::vector<Token> tokens, int line_no)
      : tokens_(std::move(tokens)), line_(line_no) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& peek() const {
    if (done()) throw ParseError(line_, end_col(), "unexpected end of statement");
    return tokens_[pos_];
  }

  Token next() {
    Token t = peek();
    ++pos_;
    return t;
  }

  void expect(std::string_view text) {
    Token t = next();
    if (t.text != text)
      throw ParseError(t.line, t.col,
                       "expected '" + std::string(text) + "', got '" + t.text + "'");
  }

  void expect_end() const {
    if (!done()) {
      const Token& t = tokens_[pos_];
      throw ParseError(t.line, t.col, "trailing input '" + t.text + "'");
    }
  }

  int line() const { return line_; }
  int end_col() const {
    return tokens_.empty() ? 1 : tokens_.back().col + static_cast<int>(tokens_.back().text.size());
  }

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int line_;
};

std::string check_name(const Token& t, const ParseOptions& opts) {
  if (!is_valid_name(t.text))
    throw ParseError(t.line, t.col, "invalid name '" + t.text + "'");
  if (!opts.allow_reserved_names && is_reserved_name(t.text))
    throw ParseError(t.line, t.col,
                     "name '" + t.text + "' uses the reserved prefix '_N'");
  return t.text;
}

Concept parse_concept_tokens(TokenStream& ts, const ParseOptions& opts) {
  Token t = ts.next();
  if (t.text == "(") {
    Token op = ts.next();
    if (op.text == "and") {
      Concept lhs = parse_concept_tokens(ts, opts);
      Concept rhs = parse_concept_tokens(ts, opts);
      ts.expect(")");
      return Concept::conj(std::move(lhs), std::move(rhs));
    }
    if (op.text == "some") {
      Token role = ts.next();
      if (!is_valid_name(role.text))
        throw ParseError(role.line, role.col, "invalid role name '" + role.text + "'");
      Concept filler = parse_concept_tokens(ts, opts);
      ts.expect(")");
      return Concept::exists(role.text, std::move(filler));
    }
    throw ParseError(op.line, op.col, "expected 'and' or 'some', got '" + op.text + "'");
  }
  if (t.text == ")" || t.text == "|")
    throw ParseError(t.line, t.col, "expected a concept, got '" + t.text + "'");
  if (t.text == "top") return Concept::top();
  return Concept::atomic(check_name(t, opts));
}

double parse_probability(const Token& t) {
  double value = 0.0;
  const char* begin = t.text.data();
  const char* end = begin + t.text.size();
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError(t.line, t.col, "invalid probability '" + t.text + "'");
  if (!(value >= 0.0 && value <= 1.0))
    throw ParseError(t.line, t.col, "probability '" + t.text + "' outside [0, 1]");
  return value;
}

Conditional parse_statement(TokenStream& ts, const ParseOptions& opts) {
  Token kw = ts.next();
  if (kw.text == "cond") {
    Token lt = ts.next();
    Token ut = ts.next();
    double lower = parse_probability(lt);
    double upper = parse_probability(ut);
    if (lower > upper)
      throw ParseError(lt.line, lt.col, "lower bound " + lt.text +
                                            " exceeds upper bound " + ut.text);
    Concept head = parse_concept_tokens(ts, opts);
    ts.expect("|");
    Concept body = parse_concept_tokens(ts, opts);
    ts.expect_end();
    return make_conditional(std::move(body), std::move(head), lower, upper,
                            lt.text, ut.text);
  }
  if (kw.text == "gci") {
    Concept body = parse_concept_tokens(ts, opts);
    Concept head = parse_concept_tokens(ts, opts);
    ts.expect_end();
    return make_gci(std::move(body), std::move(head));
  }
  throw ParseError(kw.line, kw.col, "expected 'cond' or 'gci', got '" + kw.text + "'");
}

} // namespace

TBox parse_tbox(std::string_view text, const ParseOptions& opts) {
  TBox t;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : eol - pos);
    ++line_no;
    std::vector<Token> tokens;
    lex_line(line, line_no, tokens);
    if (!tokens.empty()) {
      TokenStream ts(std::move(tokens), line_no);
      t.conditionals.push_back(parse_statement(ts, opts));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return t;
}

Concept parse_concept(std::string_view text, const ParseOptions& opts) {
  std::vector<Token> tokens;
  lex_line(text, 1, tokens);
  TokenStream ts(std::move(tokens), 1);
  Concept c = parse_concept_tokens(ts, opts);
  ts.expect_end();
  return c;
}

std::pair<Concept, Concept> parse_query(std::string_view text, const ParseOptions& opts) {
  std::vector<Token> tokens;
  lex_line(text, 1, tokens);
  TokenStream ts(std::move(tokens), 1);
  Concept head = parse_concept_tokens(ts, opts);
  ts.expect("|");
  Concept body = parse_concept_tokens(ts, opts);
  ts.expect_end();
  return {std::move(head), std::move(body)};
}

std::string serialize(const Conditional& c) {
  return "cond " + c.lower_text + " " + c.upper_text + " " + to_string(c.head) +
         " | " + to_string(c.body);
}

std::string serialize(const TBox& t) {
  std::string out;
  for (const auto& c : t.conditionals) {
    out += serialize(c);
    out += '\n';
  }
  return out;
}

TBox load_tbox(const std::filesystem::path& path, const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_tbox(buf.str(), opts);
  } catch (const ParseError& e) {
    throw UserError(path.string() + ": " + e.what());
  }
}

void save_tbox(const TBox& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write " + path.string());
  out << serialize(t);
  if (!out) throw UserError("write failed: " + path.string());
}

} // namespace selbox
