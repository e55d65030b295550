#pragma once

// Option plumbing shared by the commands: every flag doubles as a key of the
// JSON config file (dashes become underscores) and a flag given on the command
// line wins over the file.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace casurf::cli {

/// a + b sin(omega x). Configs accept a number (a) or {"a", "b", "omega"}.
struct FnSpec {
  double a = 0.0;
  double b = 0.0;
  double omega = 1.0;

  double operator()(double x) const;
  bool constant() const { return b == 0.0; }
};

void from_json(const nlohmann::json& j, FnSpec& f);
void to_json(nlohmann::json& j, const FnSpec& f);

/// Raised for check failures (exit code 3).
struct CheckFailure {
  std::string what;
};

class OptionSet {
 public:
  explicit OptionSet(CLI::App* app);

  template <class T>
  CLI::Option* add(const std::string& name, T& target, const std::string& desc) {
    auto holder = std::make_shared<T>(target);
    CLI::Option* opt = app_->add_option("--" + name, *holder, desc);
    opt->default_str(describe(target));
    const std::string key = key_of(name);
    keys_.insert(key);
    apply_.push_back([opt, holder, &target, key](const nlohmann::json& cfg) {
      if (cfg.contains(key)) target = cfg.at(key).get<T>();
      if (opt->count() > 0) target = *holder;
    });
    return opt;
  }

  CLI::Option* add_flag(const std::string& name, bool& target, const std::string& desc);

  /// Reads --config (when given), rejects unknown keys and applies the
  /// config values and then the command-line overrides.
  void resolve();

  /// --out-dir, else $CASURF_OUT_DIR, else the working directory. Created on demand.
  std::filesystem::path out_dir() const;
  std::filesystem::path out_path(const std::string& prefix, const std::string& suffix) const;

 private:
  static std::string key_of(const std::string& name);
  template <class T>
  static std::string describe(const T& v) {
    return nlohmann::json(v).dump();
  }

  CLI::App* app_;
  std::string config_path_;
  std::string out_dir_;
  std::set<std::string> keys_;
  std::vector<std::function<void(const nlohmann::json&)>> apply_;
};

/// Lexical cast used by CLI11 for FnSpec flags: a plain number.
std::istream& operator>>(std::istream& is, FnSpec& f);

/// Writes `text` to `path`, reporting the path on stderr.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace casurf::cli
