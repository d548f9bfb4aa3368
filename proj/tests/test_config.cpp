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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kerrsim/config.hpp"
#include "kerrsim/scenarios.hpp"
#include "support.hpp"

using namespace kerrsim;
using namespace kerrsim::config;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

// Rebuilds config text from the `# key = value` header of a rendered table.
std::string header_config(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  std::getline(in, line);  // title line
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) out += line.substr(2) + "\n";
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

RunConfig small(const std::string& scenario, std::vector<std::string> extra = {}) {
  extra.push_back("scenario=" + scenario);
  extra.push_back("n_trials=4000");
  return parse_config("", extra);
}

}  // namespace

TEST_CASE("minimal config fills documented defaults", "[config]") {
  const RunConfig cfg = parse_config("scenario = rates\nkappa_a = 0.5");
  CHECK(cfg.scenario == Scenario::rates);
  CHECK(cfg.params.gamma == 1.0);
  CHECK(cfg.params.kappa_a == 0.5);
  CHECK(cfg.seed == 42);
  CHECK(cfg.n_trials == 50000);
  CHECK(cfg.n_b == 8);
  CHECK(cfg.compensate_detuning);
  CHECK(cfg.resolved_params().delta_a == Approx(analytic::compensating_detuning(cfg.params)));
}

TEST_CASE("config errors", "[config]") {
  CHECK_THROWS_MATCHES(parse_config(""), UsageError, Catch::Matchers::MessageMatches(ContainsSubstring("rates, histogram")));
  CHECK_THROWS_MATCHES(parse_config("scenario = rates\nkappa_a = frog"), ParseError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("line 2")));
  CHECK_THROWS_MATCHES(parse_config("kappa_a = frog"), ParseError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("line 1")));
  CHECK_THROWS_MATCHES(parse_config("scenario = rates\n\n# note\ncolour = red"), ParseError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("line 4: unknown key 'colour'")));
  CHECK_THROWS_AS(parse_config("scenario = rates\nn_trials = 2.5"), ParseError);
  CHECK_THROWS_AS(parse_config("scenario = rates\nn_trials = -3"), ParseError);
  CHECK_THROWS_AS(parse_config("scenario = rates\ndisplaced = maybe"), ParseError);
  CHECK_THROWS_AS(parse_config("scenario = rates\njust words"), ParseError);
  CHECK_THROWS_AS(parse_config("scenario = nonsense"), UsageError);
  CHECK_THROWS_AS(parse_config("scenario = rates\ngamma = -1"), ValidationError);
  CHECK_THROWS_AS(parse_config("scenario = rates\nwindow_start = 30"), ValidationError);
  CHECK_THROWS_AS(parse_config("scenario = parity\nn_trials = 50"), ValidationError);
  CHECK_THROWS_AS(parse_config("scenario = rates\nprobe_time = -1"), ValidationError);
}

TEST_CASE("overrides and comments", "[config]") {
  const std::string text = "# header comment\nscenario = histogram   # trailing\n\nseed = 5\nchi = 0.5\n";
  const RunConfig cfg = parse_config(text, {"seed=9", "delta_a = 0.25", "phi=auto", "window_end=12"});
  CHECK(cfg.scenario == Scenario::histogram);
  CHECK(cfg.seed == 9);
  CHECK(cfg.params.chi == 0.5);
  CHECK_FALSE(cfg.compensate_detuning);
  CHECK(cfg.resolved_params().delta_a == 0.25);
  CHECK_FALSE(cfg.phi);
  CHECK(cfg.window_finish() == 12.0);
  CHECK(cfg.window_begin() == cfg.t_start);
  // The scenario may come from an override alone.
  CHECK(parse_config("gamma = 2", {"scenario=validate"}).params.gamma == 2.0);
}

TEST_CASE("numbers survive the round trip through text", "[config]") {
  gen::Source s(61);
  for (int i = 0; i < 10000; ++i) {
    const double v = s.uniform(-1.0, 1.0) * std::pow(10.0, s.integer(-300, 300));
    REQUIRE(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("echoed header reproduces the configuration", "[config][property]") {
  gen::Source s(62);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> o = {"scenario=" + std::string(kScenarioNames[s.integer(0, 4)]),
                                  "gamma=" + format_number(s.log_uniform(0.2, 5.0)),
                                  "chi=" + format_number(s.uniform(-0.1, 0.1)),
                                  "seed=" + std::to_string(s.integer(0, 1 << 30)),
                                  "n_trials=" + std::to_string(s.integer(100, 100000))};
    if (i % 3 == 0) o.push_back("delta_a=" + format_number(s.uniform(-1.0, 1.0)));
    if (i % 4 == 0) o.push_back("phi=" + format_number(s.uniform(0.0, 3.0)));
    const RunConfig a = parse_config("", o);
    std::string text;
    for (const auto& [k, v] : echo(a)) text += k + " = " + v + "\n";
    const RunConfig b = parse_config(text);
    CHECK(echo(a) == echo(b));
  }
}

TEST_CASE("rates table", "[scenarios]") {
  const RunConfig cfg = parse_config("scenario = rates\nkappa_a = 0.5\nn_points = 11\nt_end = 10");
  const auto r = scenarios::render(cfg);
  REQUIRE(r.tables.size() == 1);
  const std::string& csv = r.tables[0].content;
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.back() == '\n');
  const auto lines = lines_of(csv);
  std::size_t comments = 0;
  while (lines[comments][0] == '#') ++comments;
  CHECK(lines[comments] == "t,source_rate,p_abs,emission_rate,p_out");
  CHECK(lines.size() == comments + 1 + 11);
  CHECK(lines[comments + 1] == "0,1,0,0,1");
  CHECK_THAT(csv, ContainsSubstring("# seed = 42"));
  CHECK_THAT(csv, ContainsSubstring("# kappa_a = 0.5"));
}

TEST_CASE("histogram and conditional tables", "[scenarios]") {
  const auto h = scenarios::render(small("histogram")).tables.at(0).content;
  CHECK_THAT(h, ContainsSubstring("bin_lo,bin_hi,count"));
  CHECK_THAT(h, ContainsSubstring("# summary fraction_above_half_B = "));
  CHECK_THAT(h, ContainsSubstring("# summary n_trials = 4000"));

  const auto c = scenarios::render(small("conditional")).tables.at(0).content;
  const auto lines = lines_of(c);
  CHECK(std::count(lines.begin(), lines.end(), "quantity,analytic,monte_carlo,standard_error") == 1);
  CHECK(std::count_if(lines.begin(), lines.end(), [](const std::string& l) { return l.rfind("variance_paper,", 0) == 0; }) == 1);
  CHECK(std::count_if(lines.begin(), lines.end(), [](const std::string& l) { return l.rfind("variance_exact,", 0) == 0; }) == 1);
}

TEST_CASE("cascade and parity tables", "[scenarios]") {
  const auto cas = scenarios::render(small("cascade", {"t_end=2", "n_points=5", "N_b=4", "epsilon=1", "chi=0.1", "kappa_b=4"}));
  CHECK_THAT(cas.tables.at(0).content, ContainsSubstring("t,n_c,n_a,re_b_d,im_b_d,trace_error"));
  CHECK_THROWS_AS(scenarios::render(small("cascade", {"t_start=1"})), ValidationError);

  const auto par = scenarios::render(small("parity", {"kappa_a=0.1", "t_end=60"}));
  REQUIRE(par.tables.size() == 2);
  CHECK(par.tables[1].suffix == ".errors.csv");
  CHECK_THAT(par.tables[0].content, ContainsSubstring("case,bin_lo,bin_hi,count"));
  CHECK_THAT(par.tables[1].content, ContainsSubstring("theta,even_as_odd,odd_as_even,error"));
  CHECK(par.warnings.empty());
  CHECK(scenarios::render(small("validate")).tables.empty());
}

TEST_CASE("rendered output is byte-identical across runs and worker counts", "[scenarios][determinism]") {
  for (const char* name : {"rates", "histogram", "conditional", "parity"}) {
    std::vector<std::string> extra = {"kappa_a=0.1", "t_end=40"};
    RunConfig one = small(name, extra);
    RunConfig many = small(name, extra);
    many.workers = 3;
    const auto a = scenarios::render(one);
    const auto b = scenarios::render(many);
    const auto c = scenarios::render(one);
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i) {
      CHECK(a.tables[i].content == b.tables[i].content);
      CHECK(a.tables[i].content == c.tables[i].content);
    }
  }
}

TEST_CASE("header comments are enough to rerun a scenario", "[scenarios][determinism]") {
  const auto first = scenarios::render(small("histogram", {"seed=77", "chi=0.03"})).tables.at(0).content;
  const auto again = scenarios::render(parse_config(header_config(first))).tables.at(0).content;
  CHECK(first == again);
}

TEST_CASE("tables are written through a temporary file", "[scenarios][io]") {
  const auto dir = std::filesystem::temp_directory_path() / "kerrsim_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto rendered = scenarios::render(small("parity", {"kappa_a=0.1"}));
  const std::string out = (dir / "gate.csv").string();
  scenarios::write_tables(out, rendered);
  CHECK(std::filesystem::exists(dir / "gate.csv"));
  CHECK(std::filesystem::exists(dir / "gate.errors.csv"));
  std::ifstream in(dir / "gate.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == rendered.tables[0].content);

  const std::string missing = (dir / "no_such_dir" / "gate.csv").string();
  CHECK_THROWS(scenarios::write_tables(missing, rendered));
  std::size_t leftovers = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    leftovers += e.path().extension() == ".partial";
  CHECK(leftovers == 0);
  std::filesystem::remove_all(dir);
}
