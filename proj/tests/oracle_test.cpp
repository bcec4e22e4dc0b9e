#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "chainspec/checks.hpp"
#include "chainspec/errors.hpp"
#include "chainspec/oracle.hpp"
#include "support.hpp"

using namespace chainspec;
using chainspec::testing::zoo;

namespace {

constexpr double kPhi = 1.6180339887498949;

TransferModel markov_model(double p01, double p10) {
  return TransferModel(Grammar::full_shift(2), 1, [=](std::span<const Symbol> s, Symbol a) {
    const double flip = s.back() == 0 ? p01 : p10;
    return a == s.back() ? 1.0 - flip : flip;
  });
}

double ising_weight(double beta, const Word& w) {
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    e += beta * (w.symbols[i] == w.symbols[i + 1] ? 1.0 : -1.0);
  return std::exp(e);
}

}  // namespace

TEST_CASE("stationary vectors") {
  const TransferModel m = markov_model(0.3, 0.4);
  CHECK(m.row_stochastic());
  CHECK(m.irreducible());
  const auto pi = invariant_measure(m);
  // pi_0 = P10 / (P01 + P10)
  CHECK(pi[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-13));
  CHECK(pi[1] == doctest::Approx(3.0 / 7.0).epsilon(1e-13));
  CHECK(check_invariant_measure(m).pass);

  const auto sym = invariant_measure(markov_model(0.25, 0.25));
  CHECK(sym[0] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("Parry measure of the golden mean shift") {
  const Grammar g = Grammar::from_forbidden(2, 1, {{1, 1}});
  const TransferModel uniform(g, 1, [](std::span<const Symbol>, Symbol) { return 1.0; });
  const Perron p = perron(uniform);
  CHECK(p.eigenvalue == doctest::Approx(kPhi).epsilon(1e-12));
  const TransferModel chain = doob_chain(uniform);
  CHECK(chain.row_stochastic());
  const auto pi = invariant_measure(chain);
  // phi^2 / (1 + phi^2)
  CHECK(pi[0] == doctest::Approx(kPhi * kPhi / (1.0 + kPhi * kPhi)).epsilon(1e-12));
  CHECK(chain.weight(0, 0) == doctest::Approx(1.0 / kPhi).epsilon(1e-12));
  CHECK(chain.next(1, 1) == -1);
}

TEST_CASE("Ising transfer matrix") {
  const TransferModel t = ising_transfer(0.5, 0.0, {1.0, 1.0}, Grammar::full_shift(2));
  CHECK(perron(t).eigenvalue == doctest::Approx(2.0 * std::cosh(0.5)).epsilon(1e-12));
  CHECK_FALSE(t.row_stochastic());
  const TransferModel d = doob_chain(t);
  CHECK(d.weight(1, 1) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("two-sided conditionals") {
  const TransferModel m = markov_model(0.3, 0.4);
  const Symbol one[] = {1};
  const Symbol zero[] = {0};
  const double v = two_sided_conditional(m, 0, 0, one, Word(-1, {0}), Word(1, {0}));
  CHECK(std::abs(v - 0.1967213115) < 1e-10);
  CHECK(v + two_sided_conditional(m, 0, 0, zero, Word(-1, {0}), Word(1, {0})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(two_sided_conditional(m, 0, -1, std::span<const Symbol>(), Word(-1, {0}), Word(0, {1})) == 1.0);

  const Grammar g = Grammar::from_forbidden(2, 1, {{1, 1}});
  const TransferModel golden(g, 1, [](std::span<const Symbol>, Symbol) { return 1.0; });
  CHECK(two_sided_conditional(golden, 0, 0, zero, Word(-1, {1}), Word(1, {1})) == 1.0);
  CHECK_THROWS_AS(two_sided_conditional(golden, 0, 0, zero, Word(-2, {1, 1}), Word(1, {0})), InadmissibleContext);

  const Symbol pair[] = {1, 0};
  double total = 0.0;
  for (Symbol a = 0; a < 2; ++a)
    for (Symbol b = 0; b < 2; ++b) {
      const Symbol w[] = {a, b};
      total += two_sided_conditional(m, 0, 1, w, Word(-1, {1}), Word(2, {0}));
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(two_sided_conditional(m, 0, 1, pair, Word(-1, {1}), Word(2, {0})) > 0.0);
}

TEST_CASE("finite-volume normalisation") {
  const Grammar full = Grammar::full_shift(2);
  const SitePatch one{Word(-1, {1}), 0, 0, Word(1, {1})};
  const auto p = finite_volume_gibbs([](const Word& w) { return ising_weight(0.5, w); }, full, one);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.1192029220221176).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.8807970779778823).epsilon(1e-12));

  const auto flat = finite_volume_gibbs([](const Word&) { return 1.0; }, full, SitePatch{Word(-1, {0}), 0, 2, Word()});
  for (double x : flat) CHECK(x == doctest::Approx(0.125).epsilon(1e-15));

  const auto scaled = finite_volume_gibbs([](const Word& w) { return 7.5 * ising_weight(0.5, w); }, full, one);
  CHECK(scaled[1] == doctest::Approx(p[1]).epsilon(1e-15));

  const SitePatch big{Word(-1, {0}), 0, 11, Word(12, {0})};
  CHECK_THROWS_AS(finite_volume_gibbs([](const Word&) { return 1.0; }, full, big, 1024), BudgetExceeded);
}

TEST_CASE("two-site normalisation against the recursion") {
  const Model m = zoo("ising");
  const Grammar& g = m.gibbs->grammar();
  for (Symbol l = 0; l < 2; ++l)
    for (Symbol r = 0; r < 2; ++r) {
      const SitePatch patch{Word(-1, {l}), 0, 1, Word(2, {r})};
      const auto p = finite_volume_gibbs(m.weight, g, patch);
      const auto interiors = enumerate_interior(g, patch);
      const Site sites[] = {0, 1};
      for (std::size_t k = 0; k < interiors.size(); ++k) {
        const Word window = patch.compose(interiors[k].symbols);
        CHECK(gamma_volume(*m.gibbs, sites, interiors[k].symbols, window) == doctest::Approx(p[k]).epsilon(1e-12));
      }
    }
}

TEST_CASE("spread traces") {
  const Model ising = zoo("ising");
  std::vector<std::pair<Site, Site>> volumes;
  for (Site d = 0; d <= 10; ++d) volumes.emplace_back(-d, d);
  const Site event[] = {0};
  const auto trace = spread_trace(*ising.gibbs, event, {{1}}, volumes, ising.settings.boundary());
  CHECK(envelopes_monotone(trace));
  CHECK(trace.back().spread() < 1e-3);
  CHECK(trace.front().spread() > trace.back().spread());

  const auto sure = spread_trace(*ising.gibbs, event, {{0}, {1}}, volumes, ising.settings.boundary());
  for (const Envelope& e : sure) CHECK(e.spread() <= 1e-15);

  const Model iid = zoo("iid");
  const auto flat = spread_trace(*iid.gibbs, event, {{2}}, volumes, iid.settings.boundary());
  for (const Envelope& e : flat) CHECK(e.spread() <= 1e-15);

  std::vector<Envelope> broken(2);
  broken[0].sup = 0.5;
  broken[1].sup = 0.6;
  CHECK_FALSE(envelopes_monotone(broken));
}

TEST_CASE("spread monotone on every zoo model with a specification") {
  for (const char* name : {"ising", "ising-025", "ising-1", "golden-ising", "iid", "markov", "custom-table"}) {
    CAPTURE(name);
    const Model m = zoo(name);
    auto s = m.gibbs ? m.gibbs : std::shared_ptr<const SpecFamily>(lis_induced_spec(m.lis));
    const Check c = check_spread_monotone(*s, 8, m.settings.boundary());
    CHECK_MESSAGE(c.pass, c.detail);
  }
}

TEST_CASE("path weights") {
  const TransferModel m = markov_model(0.3, 0.4);
  // first symbol is the state
  CHECK(path_weight(m, Word(0, {0, 1, 1, 0})) == doctest::Approx(0.3 * 0.6 * 0.4).epsilon(1e-15));
}
