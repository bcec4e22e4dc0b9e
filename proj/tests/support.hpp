#pragma once

// Shared helpers for the test binaries.

#include <string>

#include "chainspec/model.hpp"

#ifndef CHAINSPEC_MODEL_DIR
#define CHAINSPEC_MODEL_DIR "models"
#endif

namespace chainspec::testing {

inline std::string model_path(const std::string& name) { return std::string(CHAINSPEC_MODEL_DIR) + "/" + name + ".cfg"; }

inline Model zoo(const std::string& name) { return build_model(load_model(model_path(name))); }

inline const char* const kZoo[] = {"markov",           "golden-markov", "iid",         "renewal",
                                   "renewal-harmonic", "custom-table",  "ising",       "ising-025",
                                   "ising-1",          "ising-slow",    "golden-ising", "ising-perturbed"};

}  // namespace chainspec::testing
