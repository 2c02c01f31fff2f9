#include "repairkit/repo_source.hpp"

#include "repairkit/benchmark.hpp"
#include "repairkit/text.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <memory>

namespace repairkit {

namespace fs = std::filesystem;

std::string DirectorySource::read(const std::string &rel_path, const std::string &) const {
  fs::path p = root_ / fs::path(rel_path);
  if (!fs::is_regular_file(p)) {
    throw RepoError("no such file in snapshot: " + rel_path);
  }
  return read_file(p);
}

std::vector<std::string> DirectorySource::list_files(const std::string &) const {
  std::vector<std::string> out;
  if (!fs::is_directory(root_)) {
    throw RepoError("not a directory: " + root_.string());
  }
  for (auto it = fs::recursive_directory_iterator(root_); it != fs::recursive_directory_iterator();
       ++it) {
    if (it->is_directory() && it->path().filename() == ".git") {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file()) {
      out.push_back(fs::relative(it->path(), root_).generic_string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string shell_quote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string run_git(const fs::path &root, const std::string &args) {
  std::string cmd = "git -C " + shell_quote(root.string()) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE *)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) {
    throw RepoError("cannot run git");
  }
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) {
    out.append(buf.data(), n);
  }
  int status = pclose(pipe.release());
  if (status != 0) {
    throw RepoError("git " + args + " failed");
  }
  return out;
}

} // namespace

std::string GitSource::read(const std::string &rel_path, const std::string &ref) const {
  if (ref.empty()) {
    return worktree_.read(rel_path, ref);
  }
  return run_git(root_, "show " + shell_quote(ref + ":" + rel_path));
}

std::vector<std::string> GitSource::list_files(const std::string &ref) const {
  if (ref.empty()) {
    return worktree_.list_files(ref);
  }
  auto out = split_lines(run_git(root_, "ls-tree -r --name-only " + shell_quote(ref)));
  std::sort(out.begin(), out.end());
  return out;
}

std::unique_ptr<RepoSource> open_repo(const fs::path &root) {
  if (fs::exists(root / ".git")) {
    return std::make_unique<GitSource>(root);
  }
  return std::make_unique<DirectorySource>(root);
}

std::vector<std::string> project_source_files(const RepoSource &repo, const std::string &ref) {
  std::vector<std::string> out;
  for (auto &p : repo.list_files(ref)) {
    if (ingest::is_source_path(p) && !ingest::is_test_path(p)) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

} // namespace repairkit
