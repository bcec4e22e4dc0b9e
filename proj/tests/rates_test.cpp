#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "chainspec/rates.hpp"
#include "support.hpp"

using namespace chainspec;
using chainspec::testing::zoo;

namespace {

// tanh(1) / 2 and tanh(1): variation of an Ising spin at beta 0.5 under one neighbour flip
constexpr double kIsingEntry = 0.38079707797788231;
constexpr double kIsingRow = 0.76159415595576463;

const CriterionResult& find(const std::vector<CriterionResult>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return r;
  FAIL("criterion " << name << " missing");
  return rs.front();
}

}  // namespace

TEST_CASE("Ising interdependence matrix") {
  const Model m = zoo("ising");
  const Site sites[] = {0};
  const DobrushinMatrix d = dobrushin_matrix(*m.gibbs, sites, m.settings.boundary());
  const DobrushinRow& row = d.row(0);
  CHECK(std::abs(d.entry(0, 1).value - kIsingEntry) <= 1e-10);
  CHECK(std::abs(d.entry(0, -1).value - kIsingEntry) <= 1e-10);
  CHECK(std::abs(row.sum() - kIsingRow) <= 1e-10);
  CHECK(d.entry(0, 2).value == 0.0);
  CHECK(row.upper() < 1.0);
}

TEST_CASE("Markov one-sided interdependence") {
  const Model m = zoo("markov");
  const Site sites[] = {0};
  const DobrushinMatrix d = dobrushin_matrix(*m.lis, sites, 6, m.settings.boundary());
  // |P00 - P10| = 0.3
  CHECK(std::abs(d.entry(0, -1).value - 0.3) <= 1e-12);
  for (Site j = -6; j <= -2; ++j) CHECK(d.entry(0, j).value == 0.0);
  CHECK(d.row(0).tail == 0.0);
}

TEST_CASE("renewal variations decay like the profile") {
  const Model m = zoo("renewal");
  for (int k = 0; k <= 8; ++k) {
    CAPTURE(k);
    const CertifiedValue v = var_k(*m.lis, 0, k, 12, m.settings.boundary());
    // sup over runs of 0.3 * (0.5^k - 0.5^r), r > k: tends to 0.3 * 2^-k
    CHECK(std::abs(v.value - 0.3 * std::pow(0.5, k)) <= v.radius + 1e-15);
    CHECK(v.value <= m.lis->profile().bound(k) + 1e-15);
  }
  const PastStats markov = past_stats(*zoo("markov").lis, 0, 0, 1, {});
  CHECK(markov.var.value == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(markov.overlap.value == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("criteria verdicts") {
  const Model ising = zoo("ising");
  const auto spec = spec_criteria(*ising.gibbs, ising.settings);
  const CriterionResult& dob = find(spec, "dobrushin");
  CHECK(dob.verdict == Verdict::Holds);
  CHECK(dob.margin == doctest::Approx(1.0 - kIsingRow).epsilon(1e-10));
  CHECK(std::string(to_string(dob.verdict)) == "holds");

  const Model markov = zoo("markov");
  const auto lis = lis_criteria(*markov.lis, markov.settings);
  CHECK(find(lis, "one-sided-dobrushin").margin == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(find(lis, "non-null").margin == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(find(lis, "good-future").verdict == Verdict::Holds);

  const Model harmonic = zoo("renewal-harmonic");
  const auto weak = lis_criteria(*harmonic.lis, harmonic.settings);
  CHECK(find(weak, "good-future").verdict == Verdict::Inconclusive);
  CHECK(find(weak, "johansson-oberg").verdict == Verdict::Holds);

  const Model strong = zoo("ising-1");
  // row sum tanh(2) at beta 1
  const CriterionResult& hot = find(spec_criteria(*strong.gibbs, strong.settings), "dobrushin");
  CHECK(hot.verdict == Verdict::Holds);
  CHECK(hot.margin == doctest::Approx(1.0 - std::tanh(2.0)).epsilon(1e-10));
}

TEST_CASE("good-future certificate on the geometric renewal") {
  const Model m = zoo("renewal");
  const Site lambda[] = {0};
  const SeriesCertificate gf = gf_certificate(*m.lis, lambda, m.settings);
  CHECK(gf.verdict == Verdict::Holds);
  CHECK(std::isfinite(gf.bound));
  CHECK(gf.bound >= gf.partial.back());
}

TEST_CASE("non-nullness") {
  const NonNullReport r = non_null_report(*zoo("markov").lis, 3, {});
  CHECK(r.non_null);
  CHECK(r.weakly_non_null);
  CHECK(r.min_value.value == 0.3);
  const NonNullReport g = non_null_report(*zoo("golden-markov").lis, 3, {});
  // zeros forced by the grammar do not count against non-nullness
  CHECK(g.min_value.value == 0.5);
}

TEST_CASE("one-sided quantities of c(gamma) against the two-sided ones") {
  const Model m = zoo("ising");
  auto f = spec_induced_lis(m.gibbs, m.settings);
  const Site sites[] = {0};
  const DobrushinMatrix one = dobrushin_matrix(*f, sites, 1, m.settings.boundary());
  const DobrushinMatrix two = dobrushin_matrix(*m.gibbs, sites, m.settings.boundary());
  CHECK(one.row(0).lower() <= two.row(0).upper());

  const UniformityReport kf = one_sided_uniformity(*f, 3, 8, m.settings.boundary());
  const UniformityReport kg = boundary_uniformity(*m.gibbs, 3, 8, m.settings.boundary());
  CHECK(kf.cylinders > 0);
  CHECK(kf.K >= kg.K * kg.K);
}

TEST_CASE("rate bounds dominate measured oscillations") {
  const Model markov = zoo("markov");
  const Model renewal = zoo("renewal");
  for (const Model* m : {&markov, &renewal}) {
    CAPTURE(m->spec.name);
    for (const RateCheck& r :
         {rate_check_future(m->lis, 0, 0, 2, m->settings), rate_check_past(m->lis, 0, 0, -2, m->settings),
          rate_check_chain(m->lis, 0, 0, -2, m->settings)}) {
      CAPTURE(r.label);
      CHECK(r.pass);
      CHECK(r.probes >= 50);
      CHECK(r.measured.value <= r.bound.upper() + r.measured.radius);
    }
  }
  const Model ising = zoo("ising");
  const RateCheck s = rate_check_spec(ising.gibbs, 0, 0, -2, ising.settings);
  CHECK(s.pass);
}

TEST_CASE("product tail inequality") {
  for (double a : {1.5, 2.0, 4.0})
    for (int k : {1, 3, 8}) {
      const ProductTailCheck p = product_tail_check(0.3, a, 2.0, k);
      CAPTURE(a);
      CAPTURE(k);
      CHECK(p.pass);
      CHECK(p.lhs <= p.rhs);
    }
}

TEST_CASE("oscillation pairs") {
  const Model m = zoo("ising");
  const OscillationPair p = oscillation(*m.gibbs, 0, 1, Word(-1, {1, 1, 0}));
  CHECK(p.c.value > 0.0);
  CHECK(p.ratio_upper() >= p.delta.value / p.c.value);
  // beyond the range the density does not move
  CHECK(oscillation(*m.gibbs, 0, 2, Word(-1, {1, 1, 0, 1})).delta.value == 0.0);
}
