#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace repairkit::analysis {

/// The infill mask sentinel. Lexed as a single token.
inline constexpr std::string_view kMaskSentinel = "<extra_id_0>";

enum class TokenKind { Identifier, Keyword, Literal, Operator, Sentinel };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t offset; // byte offset into the lexed text
  int line;           // 1-based
};

/// Half-open byte range of a comment.
struct CommentRange {
  std::size_t begin;
  std::size_t end;
};

/// Java reserved words. `true`, `false` and `null` are literals, not keywords.
const std::unordered_set<std::string> &java_keywords();

bool is_java_keyword(std::string_view word);

/// Tokenizes Java source. Comments and whitespace are skipped; string,
/// char and text-block literals become one Literal token each. The lexer
/// never fails: unterminated constructs run to end of input and stray bytes
/// become single-character Operator tokens.
std::vector<Token> lex_java(std::string_view text);

/// Comment spans found by the same scanner `lex_java` uses.
std::vector<CommentRange> find_comments(std::string_view text);

/// Token texts only, convenient for n-gram scoring.
std::vector<std::string> token_texts(std::string_view text);

} // namespace repairkit::analysis
