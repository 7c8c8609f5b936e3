#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracsp/config.hpp"
#include "fracsp/error.hpp"
#include "fracsp/run.hpp"

namespace {

// "--section.key value" or "--section.key=value" pairs left over by CLI11.
std::vector<fracsp::Override> collect_overrides(const std::vector<std::string>& extras) {
  std::vector<fracsp::Override> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() <= 2)
      throw fracsp::Error("unexpected argument '" + arg + "'");
    std::string key = arg.substr(2);
    if (auto eq = key.find('='); eq != std::string::npos) {
      out.emplace_back(key.substr(0, eq), key.substr(eq + 1));
      continue;
    }
    if (i + 1 >= extras.size()) throw fracsp::Error("override '" + arg + "' needs a value");
    out.emplace_back(key, extras[++i]);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Schrodinger-Poisson normalized ground states"};
  app.footer(fracsp::usage_text());
  app.allow_extras();
  std::string sub;
  std::string config_path;
  app.add_option("subcommand", sub, "one of solve-q, solve, sweep, landscape, check");
  app.add_option("-c,--config", config_path, "TOML run configuration");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const auto& names = fracsp::subcommand_names();
  if (sub.empty() || std::find(names.begin(), names.end(), sub) == names.end()) {
    if (!sub.empty()) std::cerr << "unknown subcommand '" << sub << "'\n";
    std::cerr << fracsp::usage_text();
    return 2;
  }
  fracsp::RunConfig cfg;
  try {
    auto overrides = collect_overrides(app.remaining());
    cfg = config_path.empty() ? fracsp::parse_config_string("", overrides, "<defaults>")
                              : fracsp::parse_config(config_path, overrides);
  } catch (const fracsp::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return fracsp::run(sub, cfg, std::cerr);
}
