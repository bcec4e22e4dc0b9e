#pragma once

// Brute-force references: transfer matrices for finite-memory models and
// exhaustive normalisation over small volumes.

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "chainspec/kernels.hpp"
#include "chainspec/lattice.hpp"

namespace chainspec {

// Weighted graph on memory states (admissible words of length M). A step
// from state s emits symbol a with weight w(s, a) and moves to s' = s·a with
// its first symbol dropped.
class TransferModel {
 public:
  using WeightFn = std::function<double(std::span<const Symbol> state, Symbol a)>;

  TransferModel(Grammar grammar, int memory, const WeightFn& weight);

  std::size_t alphabet_size() const noexcept { return grammar_.alphabet_size(); }
  int memory() const noexcept { return memory_; }
  const Grammar& grammar() const noexcept { return grammar_; }
  const std::vector<std::vector<Symbol>>& states() const noexcept { return states_; }
  std::size_t state_index(std::span<const Symbol> state) const;

  // 0 when the step is forbidden
  double weight(std::size_t state, Symbol a) const { return weights_[state * alphabet_size() + a]; }
  // -1 when the step is forbidden
  long next(std::size_t state, Symbol a) const { return next_[state * alphabet_size() + a]; }

  bool row_stochastic(double tol = 1e-12) const;
  bool irreducible() const;

 private:
  Grammar grammar_;
  int memory_;
  std::vector<std::vector<Symbol>> states_;
  std::vector<double> weights_;
  std::vector<long> next_;
};

// Stationary vector of a row-stochastic model over its states, by power
// iteration on the lazy chain until the L1 residual is below 1e-14.
std::vector<double> invariant_measure(const TransferModel& tm);

// Right Perron vector and eigenvalue of a nonnegative model.
struct Perron {
  double eigenvalue = 0.0;
  std::vector<double> right;
};
Perron perron(const TransferModel& tm);

// Row-stochastic chain with the same two-sided conditionals as `tm`
// (Doob transform by the right Perron vector).
TransferModel doob_chain(const TransferModel& tm);

// Weight ratio of left·interior·right over all admissible interiors; both
// contexts must have length >= memory. Interior covers [l, m].
double two_sided_conditional(const TransferModel& tm, Site l, Site m, std::span<const Symbol> interior,
                             const Word& left, const Word& right);

// Direct normalisation of `weight` over every admissible interior of
// `patch`; the result follows enumerate_interior order.
std::vector<double> finite_volume_gibbs(const std::function<double(const Word& configuration)>& weight,
                                        const Grammar& g, const SitePatch& patch, std::size_t budget = 1u << 20);

// Ising chain with spins -1 (symbol 0) and +1 (symbol 1): a step from s to a
// carries weight lambda(a) exp(beta s a + field a).
TransferModel ising_transfer(double beta, double field, const std::vector<double>& weights, const Grammar& g);

// Envelope of gamma_V(A | boundary) over the boundary words on both sides of
// each volume V = [lo, hi]; with `fixed_left`, sites left of lo are read
// from it instead of being varied.
std::vector<Envelope> spread_trace(const SpecFamily& s, std::span<const Site> event_sites,
                                   const std::vector<std::vector<Symbol>>& event_words,
                                   const std::vector<std::pair<Site, Site>>& volumes, const BoundarySet& probes,
                                   const Word* fixed_left = nullptr);

// Whether sup is nonincreasing and inf nondecreasing along the trace, up to
// a few units in the last place.
bool envelopes_monotone(const std::vector<Envelope>& trace);

}  // namespace chainspec
