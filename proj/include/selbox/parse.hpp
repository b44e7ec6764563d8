#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>

#include "selbox/common.hpp"
#include "selbox/concepts.hpp"

namespace selbox {

// TBox text format, one statement per line, "#" starts a comment:
//
//   cond <l> <u> <HEAD> | <BODY>     conditional (HEAD | BODY)[l, u]
//   gci <BODY> <HEAD>                sugar for cond 1 1 <HEAD> | <BODY>
//
//   concept := NAME | top | (and <concept> <concept>) | (some ROLE <concept>)
//
// Names match [A-Za-z_][A-Za-z0-9_]*.  The prefix "_N" is reserved for
// names introduced by normalization; by default the parser rejects it so
// user input can never collide with generated names.  Files produced by
// the normalizer are read back with allow_reserved_names set.
struct ParseOptions {
  bool allow_reserved_names = false;
};

class ParseError : public UserError {
public:
  ParseError(int line, int col, const std::string& message);
  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_, col_;
};

TBox parse_tbox(std::string_view text, const ParseOptions& opts = {});

// A single concept occupying the whole string.
Concept parse_concept(std::string_view text, const ParseOptions& opts = {});

// "<HEAD> | <BODY>", the query syntax used by the CLI.
// Returns (head, body).
std::pair<Concept, Concept> parse_query(std::string_view text, const ParseOptions& opts = {});

// One "cond" line per conditional, bound text echoed verbatim.
std::string serialize(const TBox& t);
std::string serialize(const Conditional& c);

// File helpers; wrap parse errors with the file name.
TBox load_tbox(const std::filesystem::path& path, const ParseOptions& opts = {});
void save_tbox(const TBox& t, const std::filesystem::path& path);

// True for names normalization may generate ("_N" followed by anything).
bool is_reserved_name(std::string_view name);

// [A-Za-z_][A-Za-z0-9_]*
bool is_valid_name(std::string_view name);

} // namespace selbox
