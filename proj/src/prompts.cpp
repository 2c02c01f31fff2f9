#include "repairkit/prompts.hpp"

#include "repairkit/text.hpp"

#include <cstdlib>

namespace repairkit::prompts {

namespace fs = std::filesystem;

fs::path default_dir() {
  if (const char *env = std::getenv("REPAIRKIT_PROMPT_DIR"); env && *env) {
    return env;
  }
  return REPAIRKIT_PROMPT_DIR;
}

std::string render(std::string_view tmpl, const Vars &vars) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      return out;
    }
    std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw TemplateError("unterminated placeholder in template");
    }
    out.append(tmpl.substr(pos, open - pos));
    std::string_view name = trim(tmpl.substr(open + 2, close - open - 2));
    auto it = vars.find(name);
    if (it == vars.end()) {
      throw TemplateError("no value for placeholder {{" + std::string(name) + "}}");
    }
    out += it->second;
    pos = close + 2;
  }
}

Library::Library(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::is_directory(dir_)) {
    throw TemplateError("prompt directory not found: " + dir_.string());
  }
  for (const auto &e : fs::directory_iterator(dir_)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") {
      std::string text = read_file(e.path());
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
        text.pop_back();
      }
      cache_[e.path().stem().string()] = std::move(text);
    }
  }
}

const std::string &Library::get(const std::string &name) const {
  auto it = cache_.find(name);
  if (it == cache_.end()) {
    throw TemplateError("missing prompt template " + (dir_ / (name + ".txt")).string());
  }
  return it->second;
}

std::string Library::render(const std::string &name, const Vars &vars) const {
  return prompts::render(get(name), vars);
}

} // namespace repairkit::prompts
