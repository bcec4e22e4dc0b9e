// Acceptance suite: one PASS/FAIL line per criterion with its runtime.
// Exit status 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "chainspec/checks.hpp"
#include "chainspec/errors.hpp"
#include "chainspec/rates.hpp"
#include "support.hpp"

using namespace chainspec;
using chainspec::testing::kZoo;
using chainspec::testing::zoo;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    note << " [" << what << "]";
  }
  void check(const Check& c, const std::string& model) {
    require(c.pass, model + ": " + c.name + " worst " + std::to_string(c.worst) + " " + c.detail);
  }
};

struct Criterion {
  int id;
  const char* title;
  double limit;  // seconds; 0 for none
  std::function<void(Outcome&)> body;
};

std::shared_ptr<const SpecFamily> spec_side(const Model& m) {
  if (m.gibbs) return m.gibbs;
  if (m.lis && m.lis->profile().memory() >= 0) return lis_induced_spec(m.lis);
  return nullptr;
}

void markov_roundtrip(Outcome& o) {
  const Model m = zoo("markov");
  const RoundtripReport r = roundtrip_cb(m.lis, m.settings);
  o.require(r.pass && r.max_discrepancy <= 1e-9, "c(b(P)) discrepancy " + std::to_string(r.max_discrepancy));
  const Site sites[] = {0};
  const Symbol one[] = {1};
  const CertifiedValue v = lis_to_spec(*m.lis, sites, one, Word(-1, {0, 0, 0}), 1e-12);
  o.require(std::abs(v.value - 0.12 / 0.61) <= 1e-12, "b(P) probe");
  Settings tight = m.settings;
  tight.composed_tol = 1e-12;
  o.check(check_lis_to_spec_oracle(*m.lis, *m.chain, tight), "markov");
  o.note << " max discrepancy " << r.max_discrepancy << ", probe " << v.value;
}

void reconstruction(Outcome& o) {
  for (const char* name : {"ising-025", "ising", "ising-1"}) {
    const Model m = zoo(name);
    const SpecFamily& s = *m.gibbs;
    o.check(check_volume_oracle(s, m.weight, m.weight_context, 6, 1e-10), name);
    o.check(check_order_independence(s, 20, 100, 1e-10, 17), name);
    o.check(check_union_identity(s, 100, 1e-10, 17), name);
    o.check(check_volume_normalization(s, 100, 1e-10, 17), name);
    o.check(check_singleton_absorption(s, 100, 1e-10, 17), name);
    o.check(check_consistency(s, 100, 1e-10, 17), name);
  }
  o.note << " beta 0.25, 0.5, 1; volumes up to 6";
}

void order_detector(Outcome& o) {
  const Model bad = zoo("ising-perturbed");
  const Check c = check_order_consistency(*bad.gibbs, 100, 5);
  o.require(!c.pass && c.detail.find("OrderConsistencyViolated") != std::string::npos,
            "perturbed model not flagged: " + c.detail);
  const Model good = zoo("ising");
  o.check(check_order_consistency(*good.gibbs, 100, 5), "ising");
  o.note << " perturbed flagged after " << c.probes << " probes, unperturbed clean";
}

void dobrushin(Outcome& o) {
  const Model ising = zoo("ising");
  const Site sites[] = {0};
  const DobrushinMatrix d = dobrushin_matrix(*ising.gibbs, sites, ising.settings.boundary());
  o.require(std::abs(d.entry(0, 1).value - 0.3807970780) <= 1e-10, "C_{0,1}");
  o.require(std::abs(d.entry(0, -1).value - 0.3807970780) <= 1e-10, "C_{0,-1}");
  o.require(std::abs(d.row(0).sum() - 0.7615941560) <= 1e-10, "row sum");
  bool holds = false;
  for (const auto& r : spec_criteria(*ising.gibbs, ising.settings))
    if (r.name == "dobrushin") holds = r.verdict == Verdict::Holds;
  o.require(holds, "Ising verdict");

  const Model markov = zoo("markov");
  const DobrushinMatrix l = dobrushin_matrix(*markov.lis, sites, 8, markov.settings.boundary());
  o.require(std::abs(l.entry(0, -1).value - 0.3) <= 1e-12, "Markov C_{0,-1}");
  for (Site j = -8; j <= -2; ++j) o.require(l.entry(0, j).value == 0.0, "Markov C_{0," + std::to_string(j) + "}");
  o.note << " C_{0,1} " << d.entry(0, 1).value << ", row " << d.row(0).sum();
}

void transfer_of_criteria(Outcome& o) {
  const Model m = zoo("ising");
  auto f = spec_induced_lis(m.gibbs, m.settings);
  const Site sites[] = {0};
  const DobrushinMatrix one = dobrushin_matrix(*f, sites, 1, m.settings.boundary());
  const DobrushinMatrix two = dobrushin_matrix(*m.gibbs, sites, m.settings.boundary());
  o.require(one.row(0).lower() <= two.row(0).upper(), "one-sided sum above two-sided sum");
  const UniformityReport kf = one_sided_uniformity(*f, 3, 8, m.settings.boundary());
  const UniformityReport kg = boundary_uniformity(*m.gibbs, 3, 8, m.settings.boundary());
  o.require(kf.K >= kg.K * kg.K, "K(f) below K(gamma)^2");
  o.note << " sums " << one.row(0).sum() << " <= " << two.row(0).sum() << "; K " << kf.K << " >= " << kg.K * kg.K;
}

void rate_bounds(Outcome& o) {
  std::size_t total = 0;
  for (const char* name : {"markov", "renewal"}) {
    const Model m = zoo(name);
    for (const RateCheck& r : {rate_check_future(m.lis, 0, 0, 2, m.settings), rate_check_past(m.lis, 0, 0, -2, m.settings),
                               rate_check_chain(m.lis, 0, 0, -2, m.settings)}) {
      o.require(r.pass, std::string(name) + " " + r.label);
      o.require(r.probes >= 50, std::string(name) + " " + r.label + " probes");
      o.require(r.measured.value <= r.bound.upper() + r.measured.radius, std::string(name) + " " + r.label + " bound");
      total += r.probes;
    }
  }
  o.note << " " << total << " probes";
}

void spread(Outcome& o) {
  for (const char* name : kZoo) {
    const Model m = zoo(name);
    const auto s = spec_side(m);
    if (!s) continue;
    o.check(check_spread_monotone(*s, 8, m.settings.boundary()), name);
  }
  const Model ising = zoo("ising");
  const Check c = check_spread_monotone(*ising.gibbs, 10, ising.settings.boundary());
  o.check(c, "ising");
  o.require(c.worst < 1e-3, "Ising spread at depth 10");
  o.note << " Ising spread at depth 10 " << c.worst;
}

void soundness(Outcome& o) {
  std::size_t probes = 0;
  auto take = [&](const Check& c, const std::string& name) {
    o.check(c, name);
    probes += c.probes;
  };
  for (const char* name : {"markov", "golden-markov", "iid", "custom-table"}) {
    Model m = zoo(name);
    m.settings.composed_tol = 1e-12;
    take(check_lis_to_spec_oracle(*m.lis, *m.chain, m.settings), name);
  }
  for (const char* name : {"ising", "ising-025", "ising-1", "golden-ising", "iid"}) {
    Model m = zoo(name);
    m.settings.composed_tol = 1e-12;
    take(check_spec_to_lis_oracle(*m.gibbs, *m.chain, m.settings), name);
    take(check_global_kernel(*m.gibbs, m.settings), name);
  }
  take(check_radius_monotone(*zoo("renewal").lis, 20, 9), "renewal");
  o.note << " " << probes << " probes";
}

void grammar(Outcome& o) {
  const Model chain = zoo("golden-markov");
  const Model spec = zoo("golden-ising");
  o.check(check_grammar_lis(*chain.lis, 3), "golden-markov");
  o.check(check_grammar_spec(*lis_induced_spec(chain.lis), chain.settings, 3), "golden-markov");
  o.check(check_grammar_spec(*spec.gibbs, spec.settings, 3), "golden-ising");
  o.check(check_grammar_lis(*spec_induced_lis(spec.gibbs, spec.settings), 3), "golden-ising");
  o.check(check_enumeration_counts(chain.grammar, 15), "golden-markov");
  o.note << " lengths 1..15";
}

void negative_paths(Outcome& o) {
  const Model harmonic = zoo("renewal-harmonic");
  const Site lambda[] = {0};
  const SeriesCertificate gf = gf_certificate(*harmonic.lis, lambda, harmonic.settings);
  o.require(gf.verdict == Verdict::Inconclusive, std::string("GF verdict ") + to_string(gf.verdict));

  const Model slow = zoo("ising-slow");
  std::string kind = "value";
  try {
    spec_to_lis(*slow.gibbs, 0, 0, {{1}}, Word(-1, {1}), slow.settings.target, slow.settings.k_max,
                slow.settings.boundary());
  } catch (const Error& e) {
    kind = e.kind();
  }
  o.require(kind == "SpreadNotContracting", "slow decay gave " + kind);
  o.note << " GF " << to_string(gf.verdict) << ", slow decay " << kind;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Markov round trip", 1.0, markov_roundtrip},
      {2, "volume reconstruction", 5.0, reconstruction},
      {3, "order-consistency detector", 0.0, order_detector},
      {4, "Dobrushin coefficients", 0.0, dobrushin},
      {5, "one-sided vs two-sided criteria", 0.0, transfer_of_criteria},
      {6, "continuity-rate bounds", 0.0, rate_bounds},
      {7, "spread monotonicity", 0.0, spread},
      {8, "certificate soundness", 0.0, soundness},
      {9, "grammar correctness", 0.0, grammar},
      {10, "negative paths", 0.0, negative_paths},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0.0 && seconds >= c.limit) {
      o.pass = false;
      o.note << " [over " << c.limit << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d %s (%.3f s)%s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, seconds,
                o.note.str().c_str());
  }
  return failed == 0 ? 0 : 1;
}
