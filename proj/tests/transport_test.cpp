#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "chainspec/checks.hpp"
#include "chainspec/errors.hpp"
#include "chainspec/transport.hpp"
#include "support.hpp"

using namespace chainspec;
using chainspec::testing::zoo;

namespace {

// P01 P10 / (P00 P00 + P01 P10) for P = [[0.7, 0.3], [0.4, 0.6]]
constexpr double kMarkovProbe = 0.12 / 0.61;
// e^b / (e^b + e^-b) at b = 0.5: Doob chain of the symmetric Ising transfer matrix
constexpr double kIsingStay = 0.7310585786300049;

}  // namespace

TEST_CASE("b(f) on a markov chain matches the two-sided ratio") {
  const Model m = zoo("markov");
  const Site sites[] = {0};
  const Symbol one[] = {1};
  const CertifiedValue v = lis_to_spec(*m.lis, sites, one, Word(-1, {0, 0, 0}), 1e-12);
  CHECK(v.value == doctest::Approx(kMarkovProbe).epsilon(1e-12));
  CHECK(std::abs(v.value - 0.1967213115) < 1e-10);
  CHECK(v.radius <= 1e-12);
  CHECK(f_ratio(*m.lis, sites, 1, one, Word(-1, {0, 0, 0})) == doctest::Approx(kMarkovProbe).epsilon(1e-12));
}

TEST_CASE("b(f) on a gapped volume") {
  const Model m = zoo("markov");
  const Site sites[] = {0, 2};
  const Word exterior(-1, {1, 0, 1, 0, 0});
  double total = 0.0;
  for (Symbol a = 0; a < 2; ++a)
    for (Symbol b = 0; b < 2; ++b) {
      const Symbol interior[] = {a, b};
      total += lis_to_spec(*m.lis, sites, interior, exterior, 1e-12).value;
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("forced interior under the golden mean") {
  const Model m = zoo("golden-markov");
  const Site sites[] = {0};
  const Symbol zero[] = {0};
  const Symbol one[] = {1};
  const Word exterior(-1, {1, 0, 1, 0});
  CHECK(lis_to_spec(*m.lis, sites, zero, exterior, 1e-12).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lis_to_spec(*m.lis, sites, one, exterior, 1e-12).value == 0.0);
}

TEST_CASE("transport oracles on the zoo") {
  for (const char* name : {"markov", "golden-markov", "iid", "custom-table"}) {
    CAPTURE(name);
    const Model m = zoo(name);
    const Check c = check_lis_to_spec_oracle(*m.lis, *m.chain, m.settings);
    CHECK_MESSAGE(c.pass, c.detail);
  }
  for (const char* name : {"ising", "ising-025", "golden-ising", "iid"}) {
    CAPTURE(name);
    const Model m = zoo(name);
    const Check c = check_spec_to_lis_oracle(*m.gibbs, *m.chain, m.settings);
    CHECK_MESSAGE(c.pass, c.detail);
  }
}

TEST_CASE("c(gamma) on the Ising chain") {
  const Model m = zoo("ising");
  const CertifiedValue v = spec_to_lis(*m.gibbs, 0, 0, {{1}}, Word(-1, {1}), 1e-10, 64, m.settings.boundary());
  CHECK(std::abs(v.value - kIsingStay) <= v.radius + 1e-12);
  CHECK(v.radius <= 1e-10);
  const CertifiedValue w = spec_to_lis(*m.gibbs, 0, 0, {{0}}, Word(-1, {1}), 1e-10, 64, m.settings.boundary());
  CHECK(std::abs(v.value + w.value - 1.0) <= v.radius + w.radius + 1e-12);
}

TEST_CASE("c(gamma) of an iid family is exact at once") {
  const Model m = zoo("iid");
  const CertifiedValue v = spec_to_lis(*m.gibbs, 0, 1, {{2, 0}}, Word(-1, {1}), 1e-12, 64, m.settings.boundary());
  CHECK(v.value == doctest::Approx(0.5 * 0.2).epsilon(1e-14));
  CHECK(v.radius <= 1e-14);
}

TEST_CASE("round trips") {
  const Model markov = zoo("markov");
  const RoundtripReport cb = roundtrip_cb(markov.lis, markov.settings);
  CHECK(cb.pass);
  CHECK(cb.probes.size() == 4);
  CHECK(cb.max_discrepancy <= 1e-9);

  const Model custom = zoo("custom-table");
  const RoundtripReport cb2 = roundtrip_cb(custom.lis, custom.settings);
  CHECK(cb2.pass);
  CHECK(cb2.max_discrepancy <= 1e-9);

  const Model ising = zoo("ising");
  const RoundtripReport bc = roundtrip_bc(ising.gibbs, ising.settings);
  CHECK(bc.pass);
  CHECK(bc.probes.size() == 8);
  CHECK(bc.max_discrepancy <= bc.max_radius + 1e-9);
}

TEST_CASE("certified radii shrink with depth") {
  const Model m = zoo("renewal");
  const Check c = check_radius_monotone(*m.lis, 10, 1);
  CHECK_MESSAGE(c.pass, c.detail);

  const Site sites[] = {0};
  const Symbol one[] = {1};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Word exterior = random_admissible_word(m.lis->grammar(), -20, 120, rng);
    const CertifiedValue loose = lis_to_spec(*m.lis, sites, one, exterior, 1e-4);
    const CertifiedValue tight = lis_to_spec(*m.lis, sites, one, exterior, 1e-9);
    CHECK(loose.radius <= 1e-4);
    CHECK(tight.radius <= 1e-9);
    CHECK(tight.n_used >= loose.n_used);
    CHECK(std::abs(loose.value - tight.value) <= loose.radius + tight.radius + 1e-15);
  }
}

TEST_CASE("future tail of a geometric profile") {
  const Model m = zoo("renewal");
  const Site sites[] = {0};
  double previous = future_tail(*m.lis, sites, 0);
  for (Site n = 1; n <= 30; ++n) {
    const double t = future_tail(*m.lis, sites, n);
    CHECK(t <= previous);
    previous = t;
  }
  CHECK(previous < 1e-7);
}

TEST_CASE("global kernels") {
  const Model m = zoo("ising");
  const Check c = check_global_kernel(*m.gibbs, m.settings);
  CHECK_MESSAGE(c.pass, c.detail);

  const Site event[] = {0};
  Region right{Region::Kind::RightHalfLine, 0, {}};
  const Word omega(-1, {1});
  const CertifiedValue v = global_kernel(*m.gibbs, right, event, {{1}}, omega, 40, 1e-10, m.settings.boundary());
  CHECK(std::abs(v.value - kIsingStay) <= v.radius + 1e-12);
}

TEST_CASE("failure paths") {
  const Model harmonic = zoo("renewal-harmonic");
  const Site sites[] = {0};
  const Symbol one[] = {1};
  CHECK_THROWS_AS(lis_to_spec(*harmonic.lis, sites, one, Word(-5, std::vector<Symbol>(200, 0)), 1e-6),
                  TailNotSummable);
  CHECK_THROWS_AS(lis_induced_spec(harmonic.lis), Unsupported);

  const Model slow = zoo("ising-slow");
  CHECK_THROWS_AS(spec_to_lis(*slow.gibbs, 0, 0, {{1}}, Word(-1, {1}), slow.settings.target, slow.settings.k_max,
                              slow.settings.boundary()),
                  SpreadNotContracting);

  // a run-length singleton on the golden mean shift: tail profile plus grammar
  const Model golden = zoo("golden-markov");
  GSingleton g;
  g.memory = TailProfile::geometric(0.3, 2.0);
  g.eval = [](Site, std::span<const Symbol> past, Symbol a) {
    if (!past.empty() && past.back() == 1) return a == 0 ? 1.0 : 0.0;
    return a == 0 ? 0.6 : 0.4;
  };
  const LisFamily f(golden.alphabet, golden.grammar, g, true);
  CHECK_THROWS_AS(lis_to_spec(f, sites, one, Word(-1, std::vector<Symbol>(100, 0)), 1e-6), Unsupported);
}
