#pragma once

// The two maps between left interval-specifications and specifications,
// with certified truncation errors.

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "chainspec/certified.hpp"
#include "chainspec/kernels.hpp"

namespace chainspec {

struct Settings {
  double identity_tol = 1e-12;
  double composed_tol = 1e-10;
  double target = 1e-10;  // radius requested from limit operations
  int n_max = 64;
  int k_max = 64;
  std::size_t budget = 4096;
  std::size_t probes = 64;
  std::uint64_t seed = 1;

  BoundarySet boundary() const { return {budget, probes, seed}; }
};

// F_{Lambda,n}: f_{[l,n]} at the configuration with `interior` on Lambda,
// divided by its sum over every admissible interior. `exterior` supplies the
// past of l and the sites of [l, n] outside Lambda.
double f_ratio(const LisFamily& f, std::span<const Site> sites, Site n, std::span<const Symbol> interior,
               const Word& exterior);

// gamma^f_Lambda(interior | exterior) as F_{Lambda,n} for the smallest n whose
// certified future tail is below target. The exterior must reach far enough
// to the right for that n.
CertifiedValue lis_to_spec(const LisFamily& f, std::span<const Site> sites, std::span<const Symbol> interior,
                           const Word& exterior, double target, int n_max = 64);

// Certified bound sum_{k > n} c^{-1} delta for the volume `sites`.
double future_tail(const LisFamily& f, std::span<const Site> sites, Site n);

// f^gamma_[l,m](A | past): volume kernels on [l, m+k], k = 1, 2, 4, ... capped
// at k_max, until the spread over right boundaries is at most 2 * target. A is
// a union of interior words on [l, m].
CertifiedValue spec_to_lis(const SpecFamily& s, Site l, Site m, const std::vector<std::vector<Symbol>>& event,
                           const Word& past, double target, int k_max, const BoundarySet& set);

// b(f): specification whose singletons are gamma^f_i. Needs exact memory.
std::shared_ptr<SpecFamily> lis_induced_spec(std::shared_ptr<const LisFamily> f);

// c(gamma): LIS whose singletons are f^gamma_i, computed on demand (and
// cached) to the given target; exact memory equal to the reach of gamma.
std::shared_ptr<LisFamily> spec_induced_lis(std::shared_ptr<const SpecFamily> s, const Settings& settings);

struct RoundtripProbe {
  std::string label;
  double original = 0.0;
  double recovered = 0.0;
  double radius = 0.0;
  bool pass = true;
  double discrepancy() const { return recovered > original ? recovered - original : original - recovered; }
};

struct RoundtripReport {
  std::vector<RoundtripProbe> probes;
  double max_discrepancy = 0.0;
  double max_radius = 0.0;
  bool pass = true;
};

// c(b(f)) against f on every context of the memory length.
RoundtripReport roundtrip_cb(std::shared_ptr<const LisFamily> f, const Settings& settings);
// b(c(gamma)) against gamma_0 on every neighbourhood of the reach.
RoundtripReport roundtrip_bc(std::shared_ptr<const SpecFamily> s, const Settings& settings);

struct Region {
  enum class Kind { RightHalfLine, LeftHalfLine, Cofinite };
  Kind kind = Kind::RightHalfLine;
  Site edge = 0;              // [edge, inf) or (-inf, edge]
  std::vector<Site> removed;  // Z minus removed
};

// gamma_Lambda(A | omega) along Lambda_d increasing to the region, stopped at
// `depth` (or earlier once the spread is at most 2 * target when target > 0).
// Value is the midpoint of the boundary envelope, radius half its spread.
CertifiedValue global_kernel(const SpecFamily& s, const Region& region, std::span<const Site> event_sites,
                             const std::vector<std::vector<Symbol>>& event_words, const Word& omega, int depth,
                             double target, const BoundarySet& set);

}  // namespace chainspec
