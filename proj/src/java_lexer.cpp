#include "repairkit/java_lexer.hpp"

#include <array>
#include <cctype>

namespace repairkit::analysis {

const std::unordered_set<std::string> &java_keywords() {
  static const std::unordered_set<std::string> kKeywords = {
      "abstract", "assert",     "boolean",   "break",     "byte",     "case",
      "catch",    "char",       "class",     "const",     "continue", "default",
      "do",       "double",     "else",      "enum",      "extends",  "final",
      "finally",  "float",      "for",       "goto",      "if",       "implements",
      "import",   "instanceof", "int",       "interface", "long",     "native",
      "new",      "package",    "private",   "protected", "public",   "return",
      "short",    "static",     "strictfp",  "super",     "switch",   "synchronized",
      "this",     "throw",      "throws",    "transient", "try",      "void",
      "volatile", "while",      "_"};
  return kKeywords;
}

bool is_java_keyword(std::string_view word) {
  return java_keywords().count(std::string(word)) != 0;
}

namespace {

bool ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

// Longest operators first.
constexpr std::array<std::string_view, 38> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&",
    "||",   "==",  "!=",  "<=",  ">=",  "+=", "-=", "*=", "/=", "&=",
    "|=",   "^=",  "%=",  "<<",  ">>",  "+",  "-",  "*",  "/",  "&",
    "|",    "^",   "%",   "!",   "~",   "?",  ":",  "="};

class Scanner {
public:
  explicit Scanner(std::string_view text) : text_(text) {}

  // Fills either tokens or comments; one pass serves both callers.
  void run(std::vector<Token> *tokens, std::vector<CommentRange> *comments) {
    while (pos_ < text_.size()) {
      unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (c == '\n') {
        ++line_;
        ++pos_;
        continue;
      }
      if (std::isspace(c)) {
        ++pos_;
        continue;
      }
      std::size_t start = pos_;
      int start_line = line_;
      if (starts_with("//")) {
        while (pos_ < text_.size() && text_[pos_] != '\n') {
          ++pos_;
        }
        if (comments) {
          comments->push_back({start, pos_});
        }
        continue;
      }
      if (starts_with("/*")) {
        pos_ += 2;
        while (pos_ < text_.size() && !starts_with("*/")) {
          advance();
        }
        pos_ = pos_ < text_.size() ? pos_ + 2 : text_.size();
        if (comments) {
          comments->push_back({start, pos_});
        }
        continue;
      }
      TokenKind kind;
      if (starts_with("\"\"\"")) {
        pos_ += 3;
        while (pos_ < text_.size() && !starts_with("\"\"\"")) {
          if (text_[pos_] == '\\') {
            advance();
          }
          if (pos_ < text_.size()) {
            advance();
          }
        }
        pos_ = pos_ < text_.size() ? pos_ + 3 : text_.size();
        kind = TokenKind::Literal;
      } else if (c == '"' || c == '\'') {
        quoted(static_cast<char>(c));
        kind = TokenKind::Literal;
      } else if (std::isdigit(c) ||
                 (c == '.' && pos_ + 1 < text_.size() &&
                  std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        number(start);
        kind = TokenKind::Literal;
      } else if (ident_start(c)) {
        while (pos_ < text_.size() && ident_part(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
        std::string_view word = text_.substr(start, pos_ - start);
        if (word == "true" || word == "false" || word == "null") {
          kind = TokenKind::Literal;
        } else if (is_java_keyword(word)) {
          kind = TokenKind::Keyword;
        } else {
          kind = TokenKind::Identifier;
        }
      } else if (sentinel()) {
        kind = TokenKind::Sentinel;
      } else {
        kind = TokenKind::Operator;
        bool matched = false;
        for (std::string_view op : kOperators) {
          if (starts_with(op)) {
            pos_ += op.size();
            matched = true;
            break;
          }
        }
        if (!matched) {
          ++pos_;
        }
      }
      if (tokens) {
        tokens->push_back(
            Token{kind, std::string(text_.substr(start, pos_ - start)), start, start_line});
      }
    }
  }

private:
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
    }
    ++pos_;
  }

  void quoted(char quote) {
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != quote && text_[pos_] != '\n') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size() && text_[pos_ + 1] != '\n') {
        ++pos_;
      }
      ++pos_;
    }
    if (pos_ < text_.size() && text_[pos_] == quote) {
      ++pos_;
    }
  }

  void number(std::size_t start) {
    bool hex = text_.substr(start, 2) == "0x" || text_.substr(start, 2) == "0X";
    while (pos_ < text_.size()) {
      unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (std::isalnum(c) || c == '_' || c == '.') {
        ++pos_;
      } else if ((c == '+' || c == '-') && pos_ > 0 &&
                 (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E' || text_[pos_ - 1] == 'p' ||
                  text_[pos_ - 1] == 'P') &&
                 !hex) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // <extra_id_N>
  bool sentinel() {
    constexpr std::string_view kPrefix = "<extra_id_";
    if (!starts_with(kPrefix)) {
      return false;
    }
    std::size_t p = pos_ + kPrefix.size();
    std::size_t digits = p;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
      ++p;
    }
    if (p == digits || p >= text_.size() || text_[p] != '>') {
      return false;
    }
    pos_ = p + 1;
    return true;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

} // namespace

std::vector<Token> lex_java(std::string_view text) {
  std::vector<Token> tokens;
  Scanner(text).run(&tokens, nullptr);
  return tokens;
}

std::vector<CommentRange> find_comments(std::string_view text) {
  std::vector<CommentRange> comments;
  Scanner(text).run(nullptr, &comments);
  return comments;
}

std::vector<std::string> token_texts(std::string_view text) {
  std::vector<std::string> out;
  for (auto &t : lex_java(text)) {
    out.push_back(std::move(t.text));
  }
  return out;
}

} // namespace repairkit::analysis
