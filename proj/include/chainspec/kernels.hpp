#pragma once

// Left interval-specifications built from single-site transition functions,
// and specifications built from single-site densities.

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "chainspec/certified.hpp"
#include "chainspec/lattice.hpp"

namespace chainspec {

struct GSingleton {
  // Probability of `a` at site i given `past`; past.back() sits at i-1. A
  // finite past stands for its canonical extension.
  std::function<double(Site i, std::span<const Symbol> past, Symbol a)> eval;
  TailProfile memory = TailProfile::exact(0);
};

class LisFamily {
 public:
  LisFamily(Alphabet alphabet, Grammar grammar, GSingleton singleton, bool stationary);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const Grammar& grammar() const noexcept { return grammar_; }
  bool stationary() const noexcept { return stationary_; }

  // Replaces the singleton at one site; the family is no longer stationary.
  void set_singleton(Site i, GSingleton s);
  const GSingleton& singleton(Site i) const;
  const TailProfile& memory(Site i) const { return singleton(i).memory; }
  // Worst profile over all singletons.
  const TailProfile& profile() const noexcept { return profile_; }
  // Past length needed for an exact evaluation (0 for tail profiles).
  int required_depth() const noexcept { return std::max(0, profile_.memory()); }

  // f_i(a | past). Returns 0 when past·a violates the grammar. Throws
  // WindowTooShort if an exact memory is not covered.
  double f(Site i, std::span<const Symbol> past, Symbol a) const;
  // Evaluates at site i of w, using every site of w before i as the past.
  double f(Site i, const Word& w) const;

  // Uniform bound on the error of a single evaluation (nonzero when the
  // singletons are themselves limits).
  double eval_radius() const noexcept { return eval_radius_; }
  void set_eval_radius(double r) { eval_radius_ = r; }

  // Sites whose singleton may differ from the others: 0, the overridden
  // sites and any added probe sites.
  std::vector<Site> probe_sites() const;
  void add_probe_site(Site i) { extra_sites_.push_back(i); }

  // Certified lower bound on f over admissible pasts (minimum over windows
  // of depth 10 or the exact memory, minus the tail bound there).
  double c_min() const;

 private:
  Alphabet alphabet_;
  Grammar grammar_;
  GSingleton default_;
  std::map<Site, GSingleton> overrides_;
  std::vector<Site> extra_sites_;
  TailProfile profile_;
  bool stationary_;
  double eval_radius_ = 0.0;
  mutable double c_min_ = -1.0;
};

struct RhoSingleton {
  // rho_i on a window covering [i - range, i + range].
  std::function<double(const Word& w, Site i)> eval;
  int range = 0;
};

class SpecFamily {
 public:
  SpecFamily(Alphabet alphabet, Grammar grammar, RhoSingleton singleton, std::vector<double> weights,
             bool stationary);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const Grammar& grammar() const noexcept { return grammar_; }
  bool stationary() const noexcept { return stationary_; }

  void set_singleton(Site i, RhoSingleton s);
  const RhoSingleton& singleton(Site i) const;
  // max(range, grammar order) at site i
  int reach(Site i) const;
  int max_reach() const noexcept { return max_reach_; }

  double weight(Symbol a) const { return weights_.at(static_cast<std::size_t>(a)); }
  const std::vector<double>& weights() const noexcept { return weights_; }

  // rho_i(w); 0 when w violates the grammar around i.
  double rho(Site i, const Word& w) const;
  // gamma_i(w_i | w) = lambda(w_i) rho_i(w)
  double gamma(Site i, const Word& w) const { return weight(w.at(i)) * rho(i, w); }

  double eval_radius() const noexcept { return eval_radius_; }
  void set_eval_radius(double r) { eval_radius_ = r; }

  std::vector<Site> probe_sites() const;

 private:
  Alphabet alphabet_;
  Grammar grammar_;
  RhoSingleton default_;
  std::map<Site, RhoSingleton> overrides_;
  std::vector<double> weights_;
  bool stationary_;
  int max_reach_;
  double eval_radius_ = 0.0;
};

// prod_{i=l}^{m} f_i(word_i | past · word_{<i}). past ends at l-1. For tail
// profiles the radius bounds the effect of the unseen past.
CertifiedValue lis_interval(const LisFamily& f, Site l, Site m, std::span<const Symbol> word, const Word& past);

struct NormalizationReport {
  std::size_t probes = 0;
  double max_defect = 0.0;
  bool pass = true;
  Word worst;
};

NormalizationReport check_singleton_normalization(const LisFamily& f, Site i, std::size_t probes,
                                                  std::mt19937_64& rng, double tol = 1e-12);
NormalizationReport check_singleton_normalization(const SpecFamily& s, Site i, std::size_t probes,
                                                  std::mt19937_64& rng, double tol = 1e-12);

// rho_{ij}(w) computed both ways; throws OrderConsistencyViolated when the
// two expressions differ by more than tol (relative).
double rho_pair(const SpecFamily& s, Site i, Site j, const Word& w, double tol = 1e-10);

// rho_Lambda(w) by adding the sites of `order` one at a time; the last
// element is added last. Zero when w is inadmissible on Lambda.
double rho_volume(const SpecFamily& s, std::span<const Site> order, const Word& w);

// gamma_Lambda(A | exterior): probability under the volume kernel on `volume`
// (ascending sites) that the sites `event_sites` carry one of `event_words`.
// The exterior is read from `window`, which must cover the volume plus the
// reach of every singleton.
double cylinder_probability(const SpecFamily& s, const Word& window, std::span<const Site> volume,
                            std::span<const Site> event_sites, const std::vector<std::vector<Symbol>>& event_words);

struct Envelope {
  double sup = 0.0;
  double inf = 0.0;
  std::size_t boundaries = 0;
  bool sampled = false;
  double spread() const noexcept { return sup - inf; }
  double midpoint() const noexcept { return 0.5 * (sup + inf); }
};

// Boundary words are enumerated exhaustively when their number is at most
// `budget`; otherwise constant words plus `probes` seeded random ones.
struct BoundarySet {
  std::size_t budget = 4096;
  std::size_t probes = 64;
  std::uint64_t seed = 1;
};

// Envelope of cylinder_probability over the boundary words of length
// max_reach() just left of volume.front() (if vary_left) and just right of
// volume.back() (if vary_right). Everything else is read from `base`.
// Boundaries admitting no filling are skipped.
Envelope volume_envelope(const SpecFamily& s, const Word& base, std::span<const Site> volume,
                         std::span<const Site> event_sites, const std::vector<std::vector<Symbol>>& event_words,
                         bool vary_left, bool vary_right, const BoundarySet& set);

// gamma_Lambda(interior | exterior), Lambda = `sites` ascending.
double gamma_volume(const SpecFamily& s, std::span<const Site> sites, std::span<const Symbol> interior,
                    const Word& window);

// Same value through the recursion, summing rho_Lambda * lambda_Lambda over
// every admissible filling.
double gamma_volume_by_recursion(const SpecFamily& s, std::span<const Site> sites, std::span<const Symbol> interior,
                                 const Word& window);

}  // namespace chainspec
