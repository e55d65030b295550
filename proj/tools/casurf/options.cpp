#include "options.hpp"

#include "casurf/error.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace casurf::cli {

double FnSpec::operator()(double x) const { return a + b * std::sin(omega * x); }

void from_json(const nlohmann::json& j, FnSpec& f) {
  if (j.is_number()) {
    f = FnSpec{j.get<double>(), 0.0, 1.0};
    return;
  }
  if (!j.is_object()) throw ValidationError("function spec must be a number or {\"a\", \"b\", \"omega\"}");
  for (const auto& [k, v] : j.items())
    if (k != "a" && k != "b" && k != "omega") throw ValidationError("unknown function spec key '" + k + "'");
  f.a = j.value("a", 0.0);
  f.b = j.value("b", 0.0);
  f.omega = j.value("omega", 1.0);
}

void to_json(nlohmann::json& j, const FnSpec& f) {
  if (f.constant())
    j = f.a;
  else
    j = {{"a", f.a}, {"b", f.b}, {"omega", f.omega}};
}

std::istream& operator>>(std::istream& is, FnSpec& f) {
  double a = 0.0;
  is >> a;
  f = FnSpec{a, 0.0, 1.0};
  return is;
}

OptionSet::OptionSet(CLI::App* app) : app_(app) {
  app_->add_option("--config", config_path_, "JSON file with option values (flags override it)");
  app_->add_option("--out-dir", out_dir_, "Output directory (default: $CASURF_OUT_DIR or .)");
}

CLI::Option* OptionSet::add_flag(const std::string& name, bool& target, const std::string& desc) {
  auto holder = std::make_shared<bool>(false);
  CLI::Option* opt = app_->add_flag("--" + name, *holder, desc);
  const std::string key = key_of(name);
  keys_.insert(key);
  apply_.push_back([opt, holder, &target, key](const nlohmann::json& cfg) {
    if (cfg.contains(key)) target = cfg.at(key).get<bool>();
    if (opt->count() > 0) target = *holder;
  });
  return opt;
}

std::string OptionSet::key_of(const std::string& name) {
  std::string k = name;
  for (char& ch : k)
    if (ch == '-') ch = '_';
  return k;
}

void OptionSet::resolve() {
  nlohmann::json cfg = nlohmann::json::object();
  if (!config_path_.empty()) {
    std::ifstream in(config_path_);
    if (!in) throw ValidationError("cannot open config file '" + config_path_ + "'");
    try {
      cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("config '" + config_path_ + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw ValidationError("config '" + config_path_ + "' must hold a JSON object");
    for (const auto& [k, v] : cfg.items()) {
      if (k == "out_dir") continue;
      if (!keys_.count(k)) throw ValidationError("config '" + config_path_ + "': unknown key '" + k + "' for this command");
    }
    if (out_dir_.empty() && cfg.contains("out_dir")) out_dir_ = cfg.at("out_dir").get<std::string>();
  }
  for (const auto& f : apply_) {
    try {
      f(cfg);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config '" + config_path_ + "': " + e.what());
    }
  }
}

std::filesystem::path OptionSet::out_dir() const {
  std::filesystem::path dir = ".";
  if (!out_dir_.empty()) {
    dir = out_dir_;
  } else if (const char* env = std::getenv("CASURF_OUT_DIR"); env && *env) {
    dir = env;
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::filesystem::path OptionSet::out_path(const std::string& prefix, const std::string& suffix) const {
  return out_dir() / (prefix + suffix);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
  std::cerr << "wrote " << path.string() << "\n";
}

}  // namespace casurf::cli
