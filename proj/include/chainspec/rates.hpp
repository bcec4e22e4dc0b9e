#pragma once

// Continuity rates, interdependence coefficients, oscillation quantities and
// the uniqueness criteria built on them. All sup/inf are taken over explicit
// windows; tail profiles turn them into certified bounds.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chainspec/certified.hpp"
#include "chainspec/kernels.hpp"
#include "chainspec/transport.hpp"

namespace chainspec {

enum class Verdict { Holds, Fails, Inconclusive, Inapplicable };
const char* to_string(Verdict v);

struct CriterionResult {
  std::string name;
  Verdict verdict = Verdict::Inconclusive;
  // Holds: certified distance to failure (for summability criteria, the
  // certified bound on the series). Fails: size of the violation.
  double margin = 0.0;
  std::string detail;
  bool sampled = false;
};

// Largest depth <= 12 with |A|^depth <= budget, or the exact memory.
int default_depth(const LisFamily& f, std::size_t budget);

// Over pasts of f_i agreeing on the last k sites (and the symbol at i):
//   var      max |f_i - f_i'|
//   log_var  max |log f_i - log f_i'|
//   overlap  min sum_a min(f_i(a|xi), f_i(a|eta))
struct PastStats {
  CertifiedValue var, log_var, overlap;
};
PastStats past_stats(const LisFamily& f, Site i, int k, int depth, const BoundarySet& set);
CertifiedValue var_k(const LisFamily& f, Site i, int k, int depth, const BoundarySet& set);

struct DobrushinRow {
  Site site = 0;
  std::vector<std::pair<Site, CertifiedValue>> entries;  // j -> C_ij
  double tail = 0.0;  // bound on the sum over j outside `entries`
  bool sampled = false;

  double sum() const;
  double upper() const;  // sum + radii + tail
  double lower() const;
};

struct DobrushinMatrix {
  std::vector<DobrushinRow> rows;
  const DobrushinRow& row(Site i) const;
  // Entries outside the computed window carry their tail bound as radius.
  CertifiedValue entry(Site i, Site j) const;
  double max_row_upper() const;
};

// C_ij as half the L1 gap between single-site kernels whose conditioning
// differs at j only. LIS rows cover j in [i - depth, i - 1].
DobrushinMatrix dobrushin_matrix(const LisFamily& f, std::span<const Site> sites, int depth,
                                 const BoundarySet& set);
DobrushinMatrix dobrushin_matrix(const SpecFamily& s, std::span<const Site> sites, const BoundarySet& set);

struct OscillationPair {
  CertifiedValue c, delta;
  // Upper bound on delta / c (+inf when c is not certified positive).
  double ratio_upper() const;
};

// c^w_Lambda(f_k) and delta^w_Lambda(f_k); w covers Lambda and the past of k
// and carries the symbol at k.
OscillationPair oscillation(const LisFamily& f, Site k, std::span<const Site> lambda, const Word& w);
// c^w_j(gamma_k) and delta^w_j(gamma_k); w covers the reach of k and site j.
OscillationPair oscillation(const SpecFamily& s, Site k, Site j, const Word& w);

// sup over windows of c^{-1} delta; value is the largest measured ratio,
// value + radius an upper bound for the probed windows.
CertifiedValue sup_ratio(const LisFamily& f, Site k, std::span<const Site> lambda, int depth,
                         const BoundarySet& set);
CertifiedValue sup_ratio(const SpecFamily& s, Site k, Site j, const BoundarySet& set);

struct SeriesCertificate {
  Verdict verdict = Verdict::Inconclusive;
  double bound = 0.0;          // GF: certified bound on sum_k eps_k. EGF: sup of a^{k-j} ratio
  double a = 0.0;              // EGF rate (inf: any a > 1)
  std::vector<double> terms;   // measured terms (upper values)
  std::vector<double> partial;
  double tail = 0.0;
  bool sampled = false;
  std::string detail;
};

SeriesCertificate gf_certificate(const LisFamily& f, std::span<const Site> lambda, const Settings& settings);
SeriesCertificate egf_certificate(const LisFamily& f, Site j, const Settings& settings);
SeriesCertificate egf_certificate(const SpecFamily& s, Site j, const Settings& settings);

struct NonNullReport {
  CertifiedValue min_value;  // inf of f_i over admissible windows
  bool non_null = false;
  bool weakly_non_null = false;
  int checked_length = 0;  // weak non-nullness checked for |Lambda| <= this
  std::string detail;
};
NonNullReport non_null_report(const LisFamily& f, int max_length, const BoundarySet& set);

struct UniformityReport {
  double K = 0.0;  // certified lower bound over the probed cylinders
  std::size_t cylinders = 0;
  std::string worst;  // cylinder attaining K
  bool sampled = false;
};
// K with f_[n,m](A|xi) >= K f_[n,m](A|eta), cylinders of length <= max_cylinder
// at each probe site, n chosen with m - n + 1 <= max_volume.
UniformityReport one_sided_uniformity(const LisFamily& f, int max_cylinder, int max_volume, const BoundarySet& set);
// Same with gamma_Lambda and intervals Lambda of length <= max_volume.
UniformityReport boundary_uniformity(const SpecFamily& s, int max_cylinder, int max_volume, const BoundarySet& set);

std::vector<CriterionResult> lis_criteria(const LisFamily& f, const Settings& settings);
std::vector<CriterionResult> spec_criteria(const SpecFamily& s, const Settings& settings);

// Continuity-rate bound against the oscillation measured by enumeration.
struct RateCheck {
  std::string label;
  CertifiedValue bound;
  CertifiedValue measured;
  std::size_t probes = 0;
  bool pass = false;
};

// delta_j(gamma^f_Lambda) for j > m (future site), Lambda = [l, m].
RateCheck rate_check_future(std::shared_ptr<const LisFamily> f, Site l, Site m, Site j, const Settings& settings);
// delta_j(gamma^f_Lambda) for j < l (past site).
RateCheck rate_check_past(std::shared_ptr<const LisFamily> f, Site l, Site m, Site j, const Settings& settings);
// delta_j(f^gamma_Lambda) for j < l, bounded through c_j(gamma_i), delta_j(gamma_i).
RateCheck rate_check_spec(std::shared_ptr<const SpecFamily> gamma, Site l, Site m, Site j, const Settings& settings);
// Same with gamma = b(f).
RateCheck rate_check_chain(std::shared_ptr<const LisFamily> f, Site l, Site m, Site j, const Settings& settings);

// 1 - prod_{i >= k} (1 - u_i)/(1 + u_i) for u_i = m c a^{-i}, against
// 2m H(k-1) with H(x) = c a^{-x} / ln a.
struct ProductTailCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double M = 0.0;
  bool pass = false;
};
ProductTailCheck product_tail_check(double c, double a, double m, int k);

}  // namespace chainspec
