// Copyright 2026 The kerrsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 1 I/O failure,
// 2 usage or parse error, 3 validation error, 4 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kerrsim/kerrsim.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kerrsim::config::UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-photon cross-Kerr cavity simulator"};
  std::string scenario;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;

  app.add_option("scenario", scenario, "one of: " + kerrsim::config::scenario_list())->required();
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--set", sets, "override a configuration key (key=value), repeatable");
  app.add_option("--out", out, "output CSV path");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--workers", workers, "worker threads; results do not depend on this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  using kerrsim::config::Scenario;
  try {
    const std::string text = config_path.empty() ? std::string() : read_file(config_path);
    std::vector<std::string> overrides = sets;
    overrides.push_back("scenario=" + scenario);
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));
    if (workers) overrides.push_back("workers=" + std::to_string(*workers));
    if (!out.empty()) overrides.push_back("out=" + out);

    kerrsim::config::RunConfig cfg = kerrsim::config::parse_config(text, overrides);
    if (cfg.out.empty()) cfg.out = std::string(kerrsim::config::name_of(cfg.scenario)) + ".csv";

    const auto rendered = kerrsim::scenarios::render(cfg);
    for (const auto& w : rendered.warnings) std::cerr << "warning: " << w << "\n";
    if (cfg.scenario == Scenario::validate) {
      std::cout << "configuration ok\n";
      return 0;
    }
    kerrsim::scenarios::write_tables(cfg.out, rendered);
    for (const auto& t : rendered.tables)
      std::cout << "wrote " << kerrsim::scenarios::table_path(cfg.out, t).string() << "\n";
    return 0;
  } catch (const kerrsim::config::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kerrsim::config::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kerrsim::ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const kerrsim::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
