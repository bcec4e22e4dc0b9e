#pragma once

// Declarative model files: parsing, canonical serialisation and
// construction of the kernel families they describe.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainspec/kernels.hpp"
#include "chainspec/oracle.hpp"
#include "chainspec/transport.hpp"

namespace chainspec {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct ModelSpec {
  std::string name;
  std::string kind;  // markov-chain | ising-spec | iid | renewal-g | custom-table
  bool stationary = true;
  std::vector<std::string> symbols;
  int grammar_order = 0;
  std::vector<std::string> forbidden;
  KeyValues parameters;  // file order
  KeyValues tolerances;  // file order

  const std::string* parameter(const std::string& key) const;
  bool operator==(const ModelSpec&) const = default;
};

// Throws ConfigError with "source:line: message" or "missing field 'x.y'".
ModelSpec parse_model(const std::string& text, const std::string& source = "<input>");
ModelSpec load_model(const std::string& path);
std::string serialize_model(const ModelSpec& spec);

struct Model {
  ModelSpec spec;
  Alphabet alphabet;
  Grammar grammar;
  Settings settings;
  // The side the file describes natively; iid models have both.
  std::shared_ptr<const LisFamily> lis;
  std::shared_ptr<const SpecFamily> gibbs;
  // Transfer-matrix reference, when the model has finite memory.
  std::optional<TransferModel> transfer;
  // Row-stochastic version of `transfer` (equal to it for chains).
  std::optional<TransferModel> chain;
  // Unnormalised weight of a finite word whose first `weight_context`
  // symbols are conditioning; used by direct normalisation. Empty when the
  // model has no finite-memory reference.
  std::function<double(const Word&)> weight;
  int weight_context = 0;
};

Model build_model(const ModelSpec& spec);

// Applies [tolerances] entries to `s`; throws ConfigError on bad values.
void apply_tolerances(const KeyValues& kv, Settings& s);

}  // namespace chainspec
