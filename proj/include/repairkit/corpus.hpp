#pragma once

#include "repairkit/code_analysis.hpp"
#include "repairkit/repo_source.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace repairkit::corpus {

inline constexpr std::size_t kMinBodyLines = 3;
inline constexpr std::size_t kMaxScale = 5;

struct MaskedSample {
  std::string method_id;
  std::string masked_text;
  std::string target_text;
  std::size_t start_idx = 0; // into body_lines, inclusive
  std::size_t end_idx = 0;   // inclusive
  std::size_t scale = 0;
};

/// Portable uniform draws: the standard distributions are not specified
/// bit-for-bit across library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

private:
  std::mt19937_64 engine_;
};

std::uint64_t method_seed(std::uint64_t seed, const std::string &method_id);

/// The method text with body_lines[start..end] replaced by a bare sentinel
/// line.
std::string mask_body(const analysis::MethodUnit &m, std::size_t start, std::size_t end);

/// Masks random windows of 1..min(5, n) lines until every body line was
/// masked at least once. Each window contains a line not masked before.
/// Throws std::invalid_argument for bodies shorter than three lines.
std::vector<MaskedSample> build_samples(const analysis::MethodUnit &m, std::uint64_t seed);

/// Puts `target_text` in place of the sentinel.
std::string fill_mask(const std::string &masked_text, const std::string &target_text);

struct CorpusStats {
  std::size_t files_seen = 0;
  std::size_t files_failed = 0;
  std::size_t methods_seen = 0;
  std::size_t methods_excluded_short = 0;
  std::size_t samples_emitted = 0;
  bool coverage_complete = true;
};

struct CorpusRecord {
  std::string method_id;
  std::string masked_text;
  std::string target_text;
};

/// Samples for every non-test Java file of `repo` at `ref`, in path order,
/// written as one JSON record per line. Files that do not parse are logged
/// and skipped.
CorpusStats build_corpus(const RepoSource &repo, const std::string &ref,
                         const std::filesystem::path &out, std::uint64_t seed);

/// Throws std::runtime_error naming the line of a malformed record.
std::vector<CorpusRecord> load_corpus(const std::filesystem::path &path);

} // namespace repairkit::corpus
