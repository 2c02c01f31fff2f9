#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace repairkit {

class RepoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Read access to a repository snapshot at a given revision.
class RepoSource {
public:
  virtual ~RepoSource() = default;
  /// Contents of `rel_path` ('/'-separated) at `ref`. Throws RepoError.
  virtual std::string read(const std::string &rel_path, const std::string &ref) const = 0;
  /// All file paths at `ref`, sorted.
  virtual std::vector<std::string> list_files(const std::string &ref) const = 0;
};

/// A plain directory. `ref` is ignored: the directory is the snapshot.
class DirectorySource : public RepoSource {
public:
  explicit DirectorySource(std::filesystem::path root) : root_(std::move(root)) {}
  std::string read(const std::string &rel_path, const std::string &ref) const override;
  std::vector<std::string> list_files(const std::string &ref) const override;

private:
  std::filesystem::path root_;
};

/// A git clone read through `git show` / `git ls-tree`. An empty ref reads
/// the working tree.
class GitSource : public RepoSource {
public:
  explicit GitSource(std::filesystem::path root) : root_(std::move(root)), worktree_(root_) {}
  std::string read(const std::string &rel_path, const std::string &ref) const override;
  std::vector<std::string> list_files(const std::string &ref) const override;

private:
  std::filesystem::path root_;
  DirectorySource worktree_;
};

/// GitSource when `root` holds a .git entry, DirectorySource otherwise.
std::unique_ptr<RepoSource> open_repo(const std::filesystem::path &root);

/// Java sources that are not test files, sorted.
std::vector<std::string> project_source_files(const RepoSource &repo, const std::string &ref);

} // namespace repairkit
