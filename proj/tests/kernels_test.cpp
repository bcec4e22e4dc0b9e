#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "chainspec/checks.hpp"
#include "chainspec/errors.hpp"
#include "chainspec/kernels.hpp"
#include "support.hpp"

using namespace chainspec;
using chainspec::testing::zoo;

namespace {

// e / (e + 1/e): logistic weight of an aligned spin between two + neighbours at beta 0.5
constexpr double kAligned = 0.8807970779778823;

std::vector<Word> all_words(const Grammar& g, Site lo, Site hi) {
  return enumerate_interior(g, SitePatch{Word(), lo, hi, Word()});
}

}  // namespace

TEST_CASE("markov singletons and interval products") {
  const Model m = zoo("markov");
  const LisFamily& f = *m.lis;
  const Symbol past0[] = {0};
  const Symbol past1[] = {1};
  CHECK(f.f(0, past0, 1) == 0.3);
  CHECK(f.f(5, past1, 0) == 0.4);
  CHECK(f.required_depth() == 1);
  CHECK_THROWS_AS(f.f(0, std::span<const Symbol>(), 0), WindowTooShort);

  const Symbol word[] = {1, 0};
  const CertifiedValue v = lis_interval(f, 0, 1, word, Word(-1, {0}));
  CHECK(v.exact());
  CHECK(v.value == doctest::Approx(0.12).epsilon(1e-15));
  CHECK(f.c_min() == 0.3);
}

TEST_CASE("grammar zeros in chain kernels") {
  const Model m = zoo("golden-markov");
  const Symbol past1[] = {1};
  CHECK(m.lis->f(0, past1, 1) == 0.0);
  CHECK(m.lis->f(0, past1, 0) == 1.0);
  const Symbol word[] = {1, 1};
  CHECK(lis_interval(*m.lis, 0, 1, word, Word(-1, {0})).value == 0.0);
}

TEST_CASE("tail profiles bound the unseen past") {
  const Model m = zoo("renewal");
  const LisFamily& f = *m.lis;
  // min of 1 - q(0) = 0.3, less the depth-10 tail 0.3 / 1024
  CHECK(f.c_min() == doctest::Approx(0.29970703125).epsilon(1e-14));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Word past = random_admissible_word(f.grammar(), -4, 4, rng);
    const Symbol word[] = {1, 0, 1};
    const CertifiedValue v = lis_interval(f, 0, 2, word, past);
    for (int extra = 1; extra <= 6; ++extra) {
      const Word longer = extend_left(f.grammar(), past, static_cast<std::size_t>(extra), rng);
      const CertifiedValue w = lis_interval(f, 0, 2, word, longer);
      CHECK(std::abs(w.value - v.value) <= v.radius + 1e-15);
      CHECK(w.radius <= v.radius);
    }
  }
}

TEST_CASE("ising single-site densities") {
  const Model m = zoo("ising");
  const SpecFamily& s = *m.gibbs;
  CHECK(s.max_reach() == 1);
  CHECK(s.gamma(0, Word(-1, {1, 1, 1})) == doctest::Approx(kAligned).epsilon(1e-15));
  CHECK(s.gamma(0, Word(-1, {1, 0, 1})) == doctest::Approx(1.0 - kAligned).epsilon(1e-14));
  CHECK(s.gamma(0, Word(-1, {0, 1, 1})) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("volume kernels against direct normalisation") {
  for (const char* name : {"ising", "ising-025", "ising-1", "golden-ising", "iid"}) {
    CAPTURE(name);
    const Model m = zoo(name);
    const Check c = check_volume_oracle(*m.gibbs, m.weight, m.weight_context, 5, 1e-10);
    CHECK_MESSAGE(c.pass, c.detail);
    CHECK(c.probes > 0);
  }
}

TEST_CASE("gamma_volume sums to one and matches the recursion") {
  const Model m = zoo("golden-ising");
  const SpecFamily& s = *m.gibbs;
  const Site sites[] = {0, 1, 2};
  for (const Word& window : all_words(s.grammar(), -1, 3)) {
    double total = 0.0;
    for (const auto& interior : enumerate_fillings(s.grammar(), window, sites)) {
      const double direct = gamma_volume(s, sites, interior, window);
      CHECK(gamma_volume_by_recursion(s, sites, interior, window) == doctest::Approx(direct).epsilon(1e-12));
      total += direct;
    }
    if (total > 0.0) CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rho recursion identities") {
  for (const char* name : {"ising", "ising-1", "golden-ising", "iid"}) {
    CAPTURE(name);
    const Model m = zoo(name);
    const SpecFamily& s = *m.gibbs;
    for (const Check& c : {check_order_independence(s, 20, 20, 1e-10, 3), check_union_identity(s, 50, 1e-10, 3),
                           check_volume_normalization(s, 50, 1e-10, 3), check_singleton_absorption(s, 50, 1e-10, 3),
                           check_consistency(s, 50, 1e-10, 3), check_order_consistency(s, 50, 3),
                           check_normalization(s, 64, 1e-12, 3)}) {
      CAPTURE(c.name);
      CHECK_MESSAGE(c.pass, c.detail);
    }
  }
}

TEST_CASE("rho_volume does not depend on the order of addition") {
  const Model m = zoo("ising");
  const SpecFamily& s = *m.gibbs;
  const Word w(-3, {1, 0, 0, 1, 1, 0, 1});
  const Site a[] = {-1, 0, 1};
  const Site b[] = {1, -1, 0};
  const Site c[] = {0, 1, -1};
  const double ra = rho_volume(s, a, w);
  CHECK(rho_volume(s, b, w) == doctest::Approx(ra).epsilon(1e-12));
  CHECK(rho_volume(s, c, w) == doctest::Approx(ra).epsilon(1e-12));
}

TEST_CASE("perturbed singleton is caught by the pair check") {
  const Model bad = zoo("ising-perturbed");
  bool thrown = false;
  for (const Word& w : all_words(bad.gibbs->grammar(), -2, 3)) {
    try {
      rho_pair(*bad.gibbs, 0, 1, w);
    } catch (const OrderConsistencyViolated&) {
      thrown = true;
    }
  }
  CHECK(thrown);
  CHECK_FALSE(check_order_consistency(*bad.gibbs, 50, 1).pass);

  const Model good = zoo("ising");
  for (const Word& w : all_words(good.gibbs->grammar(), -2, 3)) CHECK_NOTHROW(rho_pair(*good.gibbs, 0, 1, w));
}

TEST_CASE("cylinder probabilities partition the volume") {
  const Model m = zoo("ising");
  const SpecFamily& s = *m.gibbs;
  const Word window(-1, {1, 0, 0, 0, 1});
  const Site volume[] = {0, 1, 2};
  const Site event[] = {0, 2};
  double total = 0.0;
  for (Symbol a = 0; a < 2; ++a)
    for (Symbol b = 0; b < 2; ++b) total += cylinder_probability(s, window, volume, event, {{a, b}});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cylinder_probability(s, window, volume, event, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lis families: factorisation, normalisation, grammar") {
  for (const char* name : {"markov", "golden-markov", "iid", "renewal", "custom-table"}) {
    CAPTURE(name);
    const Model m = zoo(name);
    const LisFamily& f = *m.lis;
    for (const Check& c : {check_factorization(f, 20, 1e-12, 5), check_normalization(f, 64, 1e-12, 5),
                           check_grammar_lis(f, 5)}) {
      CAPTURE(c.name);
      CHECK_MESSAGE(c.pass, c.detail);
    }
  }
}

TEST_CASE("normalisation reports flag a defective singleton") {
  const Model m = zoo("ising-perturbed");
  std::mt19937_64 rng(2);
  const NormalizationReport r = check_singleton_normalization(*m.gibbs, 0, 32, rng);
  CHECK_FALSE(r.pass);
  CHECK(r.max_defect > 0.01);
  std::mt19937_64 rng2(2);
  CHECK(check_singleton_normalization(*m.gibbs, 1, 32, rng2).pass);
}
