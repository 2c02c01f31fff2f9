#pragma once

#include "repairkit/code_analysis.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace repairkit::ident {

inline constexpr std::size_t kDims = 512;
inline constexpr std::size_t kTopSnippets = 3;
inline constexpr std::size_t kTopPerSource = 3;
inline constexpr std::size_t kMaxCandidates = 6;

struct IdentifierVector {
  std::string source_name;
  std::array<double, kDims> dims{};
};

/// Camel-case, underscore and '$' split, lowercased. "parseHTTPHeader2"
/// gives parse, http, header2.
std::vector<std::string> subtokens(std::string_view name);

/// Character trigrams of each "#subtoken#", hashed (FNV-1a, 32 bit) into
/// kDims buckets; components are counts.
IdentifierVector vectorize_identifier(std::string_view name);

double cosine(const IdentifierVector &a, const IdentifierVector &b);

/// Patch identifiers found in neither table, in order of first appearance.
std::vector<std::string> detect_suspects(std::string_view patch_text,
                                         const analysis::IdentifierTable &file_table,
                                         const analysis::IdentifierTable &project_table);

struct Snippet {
  std::size_t first_line = 0; // 0-based index into the file's lines
  std::vector<std::string> lines;
  std::string text() const;
};

/// Consecutive non-overlapping windows of `patch_line_count` lines; the last
/// window holds the remainder.
std::vector<Snippet> chunk_file(const std::vector<std::string> &file_lines,
                                std::size_t patch_line_count);

struct RankedSnippet {
  std::size_t index = 0; // into the chunk_file result
  double score = 0;
};

/// Up to three snippets by CodeBLEU against the patch, best first; ties keep
/// file order.
std::vector<RankedSnippet> rank_snippets(const std::vector<Snippet> &snippets,
                                         std::string_view patch_text);

enum class CandidateSource { Snippet, File };

std::string_view to_string(CandidateSource s);

struct Candidate {
  std::string identifier;
  double similarity = 0;
  CandidateSource source = CandidateSource::Snippet;
  friend bool operator==(const Candidate &, const Candidate &) = default;
};

struct IdentifierSuggestion {
  std::string suspect;
  std::vector<Candidate> candidates; // similarity descending, then by name
};

/// Top three identifiers from the three snippets most similar to the patch,
/// plus the top three from the rest of the file, by cosine similarity to the
/// suspect. Zero-similarity identifiers are never proposed.
IdentifierSuggestion recommend(const std::string &suspect, const analysis::SourceFile &file,
                               std::string_view patch_text);

/// Suggestions for every suspect of every patch, merged per suspect.
std::vector<IdentifierSuggestion> suggest_for_patches(
    const std::vector<std::string> &patch_texts, const analysis::SourceFile &file,
    const analysis::IdentifierTable &project_table);

/// Lines "<suspect>: a, b, c" for the final prompt.
std::string render_suggestions(const std::vector<IdentifierSuggestion> &suggestions);

} // namespace repairkit::ident
