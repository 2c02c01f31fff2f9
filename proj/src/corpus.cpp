#include "repairkit/corpus.hpp"

#include "repairkit/java_lexer.hpp"
#include "repairkit/text.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace repairkit::corpus {

using nlohmann::json;

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::below(0)");
  }
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::uint64_t method_seed(std::uint64_t seed, const std::string &method_id) {
  return seed ^ fnv1a64(method_id);
}

std::string mask_body(const analysis::MethodUnit &m, std::size_t start, std::size_t end) {
  std::vector<std::string> lines = m.header_lines;
  for (std::size_t i = 0; i < m.body_lines.size(); ++i) {
    if (i == start) {
      lines.emplace_back(analysis::kMaskSentinel);
    }
    if (i < start || i > end) {
      lines.push_back(m.body_lines[i]);
    }
  }
  if (!m.footer.empty()) {
    lines.push_back(m.footer);
  }
  return join_lines(lines);
}

std::vector<MaskedSample> build_samples(const analysis::MethodUnit &m, std::uint64_t seed) {
  const std::size_t n = m.body_lines.size();
  if (n < kMinBodyLines) {
    throw std::invalid_argument(fmt::format("{} has {} body lines; at least {} are needed",
                                            m.method_id(), n, kMinBodyLines));
  }
  const std::string id = m.method_id();
  Rng rng(method_seed(seed, id));
  std::vector<bool> covered(n, false);
  std::size_t uncovered = n;
  std::vector<MaskedSample> samples;
  while (uncovered > 0) {
    std::size_t alpha = rng.between(1, std::min(kMaxScale, n));
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + alpha <= n; ++s) {
      for (std::size_t i = s; i < s + alpha; ++i) {
        if (!covered[i]) {
          starts.push_back(s);
          break;
        }
      }
    }
    std::size_t s = starts[rng.below(starts.size())];
    std::size_t e = s + alpha - 1;
    std::vector<std::string> target(m.body_lines.begin() + s, m.body_lines.begin() + e + 1);
    samples.push_back({id, mask_body(m, s, e), join_lines(target), s, e, alpha});
    for (std::size_t i = s; i <= e; ++i) {
      if (!covered[i]) {
        covered[i] = true;
        --uncovered;
      }
    }
  }
  return samples;
}

std::string fill_mask(const std::string &masked_text, const std::string &target_text) {
  std::size_t pos = masked_text.find(analysis::kMaskSentinel);
  if (pos == std::string::npos) {
    throw std::invalid_argument("masked text has no sentinel");
  }
  std::string out = masked_text;
  out.replace(pos, std::string_view(analysis::kMaskSentinel).size(), target_text);
  return out;
}

CorpusStats build_corpus(const RepoSource &repo, const std::string &ref,
                         const std::filesystem::path &out, std::uint64_t seed) {
  CorpusStats stats;
  std::string data;
  for (const auto &path : project_source_files(repo, ref)) {
    ++stats.files_seen;
    std::vector<analysis::MethodUnit> methods;
    try {
      methods = analysis::extract_methods({path, repo.read(path, ref)});
    } catch (const analysis::ParseError &e) {
      spdlog::warn("skipping {}: {}", path, e.what());
      ++stats.files_failed;
      continue;
    } catch (const RepoError &e) {
      spdlog::warn("skipping {}: {}", path, e.what());
      ++stats.files_failed;
      continue;
    }
    for (const auto &m : methods) {
      ++stats.methods_seen;
      if (m.body_lines.size() < kMinBodyLines) {
        ++stats.methods_excluded_short;
        continue;
      }
      auto samples = build_samples(m, seed);
      std::vector<bool> covered(m.body_lines.size(), false);
      for (const auto &s : samples) {
        for (std::size_t i = s.start_idx; i <= s.end_idx; ++i) {
          covered[i] = true;
        }
        json rec = {{"method_id", s.method_id},
                    {"masked_text", s.masked_text},
                    {"target_text", s.target_text}};
        data += rec.dump();
        data += '\n';
      }
      stats.samples_emitted += samples.size();
      if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
        stats.coverage_complete = false;
      }
    }
  }
  write_file_atomic(out, data);
  return stats;
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus " + path.string());
  }
  std::vector<CorpusRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) {
      continue;
    }
    try {
      json j = json::parse(line);
      records.push_back({j.at("method_id").get<std::string>(),
                         j.at("masked_text").get<std::string>(),
                         j.at("target_text").get<std::string>()});
    } catch (const json::exception &e) {
      throw std::runtime_error(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return records;
}

} // namespace repairkit::corpus
