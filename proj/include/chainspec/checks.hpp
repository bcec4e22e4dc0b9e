#pragma once

// Cross-validation of the certified operations against brute-force
// references and exact identities. Each check returns a record instead of
// throwing, so suites can report every failure.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "chainspec/kernels.hpp"
#include "chainspec/oracle.hpp"
#include "chainspec/transport.hpp"

namespace chainspec {

struct Check {
  explicit Check(std::string n = {}) : name(std::move(n)) {}
  std::string name;
  bool pass = true;
  double worst = 0.0;      // largest discrepancy seen (minus radii where certified)
  double tolerance = 0.0;
  std::size_t probes = 0;
  std::string detail;
};

// Product of transfer weights along w (first `memory` symbols are the state).
double path_weight(const TransferModel& tm, const Word& w);

// b on intervals and gapped sets against two-sided transfer conditionals.
Check check_lis_to_spec_oracle(const LisFamily& f, const TransferModel& chain, const Settings& settings);
// c against the transition probabilities of `chain`.
Check check_spec_to_lis_oracle(const SpecFamily& s, const TransferModel& chain, const Settings& settings);
// gamma_volume and the rho recursion against direct normalisation, for
// intervals of length 1..max_volume and every boundary pair of the reach.
Check check_volume_oracle(const SpecFamily& s, const std::function<double(const Word&)>& weight, int context,
                          int max_volume, double tol);
// rho_Lambda for `orders` random site orders on random sets inside [0, 5].
Check check_order_independence(const SpecFamily& s, int orders, int probes, double tol, std::uint64_t seed);
// rho_{L u G} lambda_L(rho_L / rho_G) = rho_L
Check check_union_identity(const SpecFamily& s, int probes, double tol, std::uint64_t seed);
// lambda_L(rho_L) = 1
Check check_volume_normalization(const SpecFamily& s, int probes, double tol, std::uint64_t seed);
// (rho_V lambda_V)(rho_i lambda_i) = rho_V lambda_V, random test functions
Check check_singleton_absorption(const SpecFamily& s, int probes, double tol, std::uint64_t seed);
// gamma_D gamma_L = gamma_D for L inside D, random test functions
Check check_consistency(const SpecFamily& s, int probes, double tol, std::uint64_t seed);
// rho_pair both ways on random windows; fails on OrderConsistencyViolated.
Check check_order_consistency(const SpecFamily& s, int probes, std::uint64_t seed);
// f_[l,m] = f_[l,n] f_[n+1,m], pointwise and as kernel composition.
Check check_factorization(const LisFamily& f, int probes, double tol, std::uint64_t seed);
// Singleton normalisation on sampled windows.
Check check_normalization(const LisFamily& f, std::size_t probes, double tol, std::uint64_t seed);
Check check_normalization(const SpecFamily& s, std::size_t probes, double tol, std::uint64_t seed);
// |F_{n+1} - F_n| <= c(f_{n+1})^{-1} delta(f_{n+1}) along n on random windows;
// full shift only.
Check check_ratio_increments(const LisFamily& f, int probes, double tol, std::uint64_t seed);
// Certified radii of lis_to_spec never increase with the truncation depth and
// consecutive values stay within the earlier radius.
Check check_radius_monotone(const LisFamily& f, int probes, std::uint64_t seed);
// Zero weight on inadmissible words for every kernel of the model, and
// Fibonacci counts when the grammar is the golden mean.
Check check_grammar_lis(const LisFamily& f, std::uint64_t seed);
Check check_grammar_spec(const SpecFamily& s, const Settings& settings, std::uint64_t seed);
Check check_enumeration_counts(const Grammar& g, int max_length);
// spread_trace on [-d, d], d = 0..depth, for the event {omega_0 = a} for every
// a: envelopes monotone; worst spread at the last volume in `worst`.
Check check_spread_monotone(const SpecFamily& s, int depth, const BoundarySet& set);
// global_kernel on [0, inf) against spec_to_lis at site 0.
Check check_global_kernel(const SpecFamily& s, const Settings& settings);
// Stationary vector of a row-stochastic model: residual of pi P = pi.
Check check_invariant_measure(const TransferModel& chain);

}  // namespace chainspec
