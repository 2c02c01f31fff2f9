#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace repairkit::prompts {

class TemplateError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vars = std::map<std::string, std::string, std::less<>>;

/// $REPAIRKIT_PROMPT_DIR when set, else the prompts/ directory of the
/// source tree this binary was built from.
std::filesystem::path default_dir();

/// Replaces each {{name}} with vars[name]. Throws TemplateError for an
/// unknown or unterminated placeholder.
std::string render(std::string_view tmpl, const Vars &vars);

/// Template files loaded once from a directory; trailing newlines dropped.
class Library {
public:
  explicit Library(std::filesystem::path dir = default_dir());

  /// Throws TemplateError when `<name>.txt` is missing.
  const std::string &get(const std::string &name) const;
  std::string render(const std::string &name, const Vars &vars = {}) const;

private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> cache_;
};

} // namespace repairkit::prompts
