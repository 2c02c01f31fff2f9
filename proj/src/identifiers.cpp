#include "repairkit/identifiers.hpp"

#include "repairkit/codebleu.hpp"
#include "repairkit/java_lexer.hpp"
#include "repairkit/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace repairkit::ident {

std::vector<std::string> subtokens(std::string_view name) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(to_lower(cur));
      cur.clear();
    }
  };
  auto upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  auto lower = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (c == '_' || c == '$') {
      flush();
      continue;
    }
    if (upper(c) && !cur.empty()) {
      char prev = name[i - 1];
      bool next_lower = i + 1 < name.size() && lower(name[i + 1]);
      if (!upper(prev) || next_lower) {
        flush();
      }
    }
    cur += c;
  }
  flush();
  return out;
}

IdentifierVector vectorize_identifier(std::string_view name) {
  IdentifierVector v;
  v.source_name = std::string(name);
  auto parts = subtokens(name);
  if (parts.empty()) {
    parts.push_back(to_lower(name));
  }
  for (const auto &p : parts) {
    std::string padded = "#" + p + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      v.dims[fnv1a32(std::string_view(padded).substr(i, 3)) % kDims] += 1.0;
    }
  }
  return v;
}

double cosine(const IdentifierVector &a, const IdentifierVector &b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < kDims; ++i) {
    dot += a.dims[i] * b.dims[i];
    na += a.dims[i] * a.dims[i];
    nb += b.dims[i] * b.dims[i];
  }
  if (na == 0 || nb == 0) {
    return 0;
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::vector<std::string> detect_suspects(std::string_view patch_text,
                                         const analysis::IdentifierTable &file_table,
                                         const analysis::IdentifierTable &project_table) {
  std::vector<std::string> out;
  for (auto &id : analysis::identifiers_in_order(patch_text)) {
    if (!project_table.contains(id) && !file_table.contains(id)) {
      out.push_back(std::move(id));
    }
  }
  return out;
}

std::string Snippet::text() const { return join_lines(lines); }

std::vector<Snippet> chunk_file(const std::vector<std::string> &file_lines,
                                std::size_t patch_line_count) {
  if (patch_line_count == 0) {
    throw std::invalid_argument("patch_line_count must be at least 1");
  }
  std::vector<Snippet> out;
  for (std::size_t i = 0; i < file_lines.size(); i += patch_line_count) {
    std::size_t end = std::min(file_lines.size(), i + patch_line_count);
    out.push_back({i, std::vector<std::string>(file_lines.begin() + i, file_lines.begin() + end)});
  }
  return out;
}

std::vector<RankedSnippet> rank_snippets(const std::vector<Snippet> &snippets,
                                         std::string_view patch_text) {
  std::vector<RankedSnippet> ranked;
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    ranked.push_back({i, codebleu::codebleu(snippets[i].text(), patch_text).total});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.score > b.score; });
  if (ranked.size() > kTopSnippets) {
    ranked.resize(kTopSnippets);
  }
  return ranked;
}

std::string_view to_string(CandidateSource s) {
  return s == CandidateSource::Snippet ? "snippet" : "file";
}

namespace {

bool better(const Candidate &a, const Candidate &b) {
  if (a.similarity != b.similarity) {
    return a.similarity > b.similarity;
  }
  return a.identifier < b.identifier;
}

std::vector<Candidate> top_candidates(const IdentifierVector &suspect,
                                      const std::set<std::string> &pool, CandidateSource source) {
  std::vector<Candidate> scored;
  for (const auto &id : pool) {
    double sim = cosine(suspect, vectorize_identifier(id));
    if (sim > 0) {
      scored.push_back({id, sim, source});
    }
  }
  std::sort(scored.begin(), scored.end(), better);
  if (scored.size() > kTopPerSource) {
    scored.resize(kTopPerSource);
  }
  return scored;
}

std::vector<Candidate> merge(std::vector<Candidate> all) {
  std::sort(all.begin(), all.end(), [](const Candidate &a, const Candidate &b) {
    if (a.identifier != b.identifier) {
      return a.identifier < b.identifier;
    }
    if (a.similarity != b.similarity) {
      return a.similarity > b.similarity;
    }
    return a.source < b.source;
  });
  std::vector<Candidate> unique;
  for (auto &c : all) {
    if (unique.empty() || unique.back().identifier != c.identifier) {
      unique.push_back(std::move(c));
    }
  }
  std::sort(unique.begin(), unique.end(), better);
  if (unique.size() > kMaxCandidates) {
    unique.resize(kMaxCandidates);
  }
  return unique;
}

} // namespace

IdentifierSuggestion recommend(const std::string &suspect, const analysis::SourceFile &file,
                               std::string_view patch_text) {
  auto lines = split_lines(file.text);
  std::size_t patch_len = std::max<std::size_t>(1, split_lines(patch_text).size());
  auto snippets = chunk_file(lines, patch_len);
  auto ranked = rank_snippets(snippets, patch_text);

  std::vector<bool> in_top(lines.size(), false);
  std::set<std::string> snippet_pool;
  for (const auto &r : ranked) {
    const auto &s = snippets[r.index];
    for (std::size_t i = 0; i < s.lines.size(); ++i) {
      in_top[s.first_line + i] = true;
    }
    for (const auto &[id, n] : analysis::collect_identifiers(s.text())) {
      snippet_pool.insert(id);
    }
  }
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    rest.push_back(in_top[i] ? std::string() : lines[i]);
  }
  std::set<std::string> file_pool;
  for (const auto &[id, n] : analysis::collect_identifiers(join_lines(rest))) {
    file_pool.insert(id);
  }

  auto sv = vectorize_identifier(suspect);
  auto candidates = top_candidates(sv, snippet_pool, CandidateSource::Snippet);
  auto from_file = top_candidates(sv, file_pool, CandidateSource::File);
  candidates.insert(candidates.end(), from_file.begin(), from_file.end());
  return {suspect, merge(std::move(candidates))};
}

std::vector<IdentifierSuggestion> suggest_for_patches(
    const std::vector<std::string> &patch_texts, const analysis::SourceFile &file,
    const analysis::IdentifierTable &project_table) {
  analysis::IdentifierTable file_table{analysis::TableScope::File, {}};
  file_table.add(file.text);
  std::vector<std::string> order;
  std::map<std::string, std::vector<Candidate>> merged;
  for (const auto &patch : patch_texts) {
    for (const auto &suspect : detect_suspects(patch, file_table, project_table)) {
      auto rec = recommend(suspect, file, patch);
      auto [it, inserted] = merged.try_emplace(suspect);
      if (inserted) {
        order.push_back(suspect);
      }
      it->second.insert(it->second.end(), rec.candidates.begin(), rec.candidates.end());
    }
  }
  std::vector<IdentifierSuggestion> out;
  for (const auto &s : order) {
    auto candidates = merge(merged[s]);
    if (!candidates.empty()) {
      out.push_back({s, std::move(candidates)});
    }
  }
  return out;
}

std::string render_suggestions(const std::vector<IdentifierSuggestion> &suggestions) {
  std::vector<std::string> lines;
  for (const auto &s : suggestions) {
    std::vector<std::string> names;
    for (const auto &c : s.candidates) {
      names.push_back(c.identifier);
    }
    lines.push_back(fmt::format("{} may be wrong here; candidates from this file: {}", s.suspect,
                                fmt::join(names, ", ")));
  }
  return join_lines(lines);
}

} // namespace repairkit::ident
