#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "chainspec/cli.hpp"
#include "chainspec/errors.hpp"
#include "chainspec/model.hpp"
#include "support.hpp"

using namespace chainspec;
using chainspec::testing::kZoo;
using chainspec::testing::model_path;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

// Fields of the first machine record of `type`.
std::map<std::string, std::string> record(const std::string& text, const std::string& type) {
  for (const auto& line : lines(text)) {
    if (line.rfind("record=" + type + " ", 0) != 0) continue;
    std::map<std::string, std::string> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const std::size_t eq = line.find('=', pos);
      std::string key = line.substr(pos, eq - pos);
      std::size_t end;
      std::string value;
      if (line[eq + 1] == '"') {
        end = eq + 2;
        while (line[end] != '"') {
          if (line[end] == '\\') ++end;
          value += line[end++];
        }
        ++end;
      } else {
        end = line.find(' ', eq);
        if (end == std::string::npos) end = line.size();
        value = line.substr(eq + 1, end - eq - 1);
      }
      fields[key] = value;
      pos = end + 1;
    }
    return fields;
  }
  return {};
}

std::string without_clock(const std::string& text) {
  std::string kept;
  for (const auto& line : lines(text))
    if (line.rfind("record=wall_clock", 0) != 0 && line.rfind("wall_clock:", 0) != 0) kept += line + "\n";
  return kept;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("criteria on the Ising chain") {
  const Outcome o = invoke({"criteria", model_path("ising"), "--format", "machine"});
  CHECK(o.code == kExitPass);
  bool seen = false;
  for (const auto& line : lines(o.out))
    if (line.find("name=dobrushin ") != std::string::npos) {
      seen = true;
      CHECK(line.find("verdict=holds") != std::string::npos);
      CHECK(line.find("margin=0.2384058440442") != std::string::npos);
      CHECK(line.find("margin.radius=exact") != std::string::npos);
    }
  CHECK(seen);
}

TEST_CASE("markov roundtrip") {
  const Outcome o = invoke({"roundtrip", model_path("markov"), "--format", "machine"});
  CHECK(o.code == kExitPass);
  const auto r = record(o.out, "roundtrip");
  REQUIRE(r.count("max_discrepancy"));
  CHECK(std::stod(r.at("max_discrepancy")) <= 1e-9);
  CHECK(r.at("pass") == "true");
  CHECK(record(o.out, "summary").at("exit") == "0");
}

TEST_CASE("empty model file") {
  const std::string path = temp_file("chainspec-empty.cfg", "");
  const Outcome o = invoke({"eval-lis", path, "--format", "machine"});
  CHECK(o.code == kExitInput);
  CHECK(o.err.find("missing field 'model.kind'") != std::string::npos);
  CHECK(record(o.out, "error").at("kind") == "ConfigError");
}

TEST_CASE("parse errors carry a location") {
  const std::string path = temp_file("chainspec-bad.cfg", "[model]\nkind = markov-chain\nname\n");
  const Outcome o = invoke({"eval-lis", path});
  CHECK(o.code == kExitInput);
  CHECK(o.err.find("chainspec-bad.cfg:3") != std::string::npos);

  CHECK_THROWS_WITH_AS(parse_model("[alphabet]\nsymbols = 0 1\n"), doctest::Contains("missing field 'model.kind'"),
                       ConfigError);
  CHECK_THROWS_AS(build_model(parse_model("[model]\nkind = markov-chain\n[alphabet]\nsymbols = 0 1\n"
                                          "[parameters]\nmatrix = 0.7 0.3 ; 0.4 0.5\n")),
                  ConfigError);
}

TEST_CASE("zoo files survive serialisation") {
  for (const std::string name : kZoo) {
    CAPTURE(name);
    const ModelSpec spec = load_model(model_path(name));
    const std::string text = serialize_model(spec);
    const ModelSpec again = parse_model(text);
    CHECK(again == spec);
    CHECK(serialize_model(again) == text);
  }
}

TEST_CASE("reports are deterministic up to the clock") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"rates", model_path("renewal"), "--format", "machine"},
        std::vector<std::string>{"reconstruct", model_path("ising"), "--format", "machine"},
        std::vector<std::string>{"oracle-check", model_path("golden-markov")},
        std::vector<std::string>{"spec-to-lis", model_path("ising"), "--past", "+", "--length", "2"}}) {
    const Outcome a = invoke(args);
    const Outcome b = invoke(args);
    CHECK(a.code == b.code);
    CHECK(without_clock(a.out) == without_clock(b.out));
    CHECK(a.out != without_clock(a.out));
  }
}

TEST_CASE("machine records tag every real") {
  const Outcome o = invoke({"eval-spec", model_path("ising"), "--format", "machine"});
  CHECK(o.code == kExitPass);
  for (const auto& line : lines(o.out)) {
    if (line.rfind("record=eval", 0) != 0) continue;
    const auto r = record(o.out, "eval");
    for (const auto& [key, value] : r)
      if (key == "value" || key == "oracle") CHECK(r.count(key + ".radius"));
  }
}

TEST_CASE("negative control and inapplicable commands") {
  const Outcome perturbed = invoke({"reconstruct", model_path("ising-perturbed"), "--format", "machine"});
  CHECK(perturbed.code == kExitFail);
  CHECK(perturbed.out.find("OrderConsistencyViolated") != std::string::npos);

  const Outcome renewal = invoke({"eval-spec", model_path("renewal"), "--format", "machine"});
  CHECK(renewal.code == kExitInput);
  CHECK(record(renewal.out, "error").at("kind") == "Inapplicable");

  const Outcome slow = invoke({"spec-to-lis", model_path("ising-slow"), "--format", "machine"});
  CHECK(slow.code == kExitInput);
  CHECK(record(slow.out, "error").at("kind") == "SpreadNotContracting");

  CHECK(invoke({"criteria"}).code == kExitInput);
  CHECK(invoke({"criteria", model_path("ising"), "--format", "yaml"}).code == kExitInput);
  CHECK(invoke({"criteria", model_path("no-such-model")}).code == kExitInput);
}

TEST_CASE("every command on every zoo model ends with a summary") {
  const char* commands[] = {"eval-lis", "eval-spec", "lis-to-spec", "spec-to-lis", "roundtrip",
                            "reconstruct", "criteria", "rates", "oracle-check"};
  for (const char* name : kZoo)
    for (const char* command : commands) {
      const std::string label = std::string(name) + " " + command;
      CAPTURE(label);
      const Outcome o = invoke({command, model_path(name), "--format", "machine", "--probes", "16"});
      CHECK((o.code == kExitPass || o.code == kExitFail || o.code == kExitInput));
      const auto summary = record(o.out, "summary");
      REQUIRE(summary.count("exit"));
      CHECK(summary.at("exit") == std::to_string(o.code));
      // the reason is an error record or a check that raised
      if (o.code == kExitInput)
        CHECK((!record(o.out, "error").empty() || o.out.find("record=check error=") != std::string::npos));
    }
}

TEST_CASE("text format") {
  const Outcome o = invoke({"eval-lis", model_path("markov"), "--past", "0", "--word", "1"});
  CHECK(o.code == kExitPass);
  CHECK(o.out.find("eval: site 0, past 0, word 1, value 0.3, oracle 0.3") != std::string::npos);
}
