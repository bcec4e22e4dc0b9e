#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "chainspec/certified.hpp"
#include "chainspec/errors.hpp"
#include "chainspec/lattice.hpp"

using namespace chainspec;

namespace {

Grammar golden() { return Grammar::from_forbidden(2, 1, {{1, 1}}); }

std::size_t count_words(const Grammar& g, Site n) {
  return enumerate_interior(g, SitePatch{Word(), 0, n - 1, Word()}).size();
}

}  // namespace

TEST_CASE("alphabet words") {
  Alphabet bits({"0", "1"});
  CHECK(bits.parse_word("0110") == std::vector<Symbol>{0, 1, 1, 0});
  CHECK(bits.format_word(std::vector<Symbol>{1, 0, 1}) == "101");
  CHECK_THROWS_AS(bits.parse_word("012"), Error);

  Alphabet spins({"up", "down"});
  CHECK(spins.parse_word("down up") == std::vector<Symbol>{1, 0});
  CHECK(spins.format_word(std::vector<Symbol>{0, 1}) == "up down");
  CHECK(spins.index_of("down") == 1);
}

TEST_CASE("word slicing and concatenation") {
  Word w(-2, {0, 1, 1, 0, 1});
  CHECK(w.end() == 3);
  CHECK(w.at(0) == 1);
  CHECK(w.slice(-1, 1) == Word(-1, {1, 1, 0}));
  CHECK(w.slice(2, 1).empty());
  CHECK(concat(Word(-2, {0, 1}), Word(0, {1, 0, 1})) == w);
  CHECK_THROWS_AS(concat(Word(0, {0}), Word(2, {1})), Error);
}

TEST_CASE("full shift") {
  const Grammar g = Grammar::full_shift(3);
  CHECK(g.is_full_shift());
  CHECK(g.forbidden_words().empty());
  CHECK(g.free_symbol().has_value());
  for (Site n = 1; n <= 6; ++n) CHECK(count_words(g, n) == ipow(3, static_cast<std::size_t>(n)));
}

TEST_CASE("golden mean counts are Fibonacci numbers") {
  const Grammar g = golden();
  CHECK_FALSE(g.is_full_shift());
  CHECK(g.forbidden_words() == std::vector<std::vector<Symbol>>{{1, 1}});
  REQUIRE(g.free_symbol().has_value());
  CHECK(*g.free_symbol() == 0);
  std::size_t a = 1, b = 2;  // F(2), F(3)
  for (Site n = 1; n <= 15; ++n) {
    CHECK(count_words(g, n) == b);
    const std::size_t c = a + b;
    a = b;
    b = c;
  }
  CHECK(count_words(g, 15) == 1597);
}

TEST_CASE("contexts restrict the interior") {
  const Grammar g = golden();
  const auto forced = enumerate_interior(g, SitePatch{Word(-1, {1}), 0, 0, Word(1, {1})});
  REQUIRE(forced.size() == 1);
  CHECK(forced[0] == Word(0, {0}));

  const auto lexicographic = enumerate_interior(g, SitePatch{Word(-1, {0}), 0, 1, Word()});
  REQUIRE(lexicographic.size() == 3);
  CHECK(lexicographic[0].symbols == std::vector<Symbol>{0, 0});
  CHECK(lexicographic[1].symbols == std::vector<Symbol>{0, 1});
  CHECK(lexicographic[2].symbols == std::vector<Symbol>{1, 0});

  CHECK_THROWS_AS(enumerate_interior(g, SitePatch{Word(-2, {1, 1}), 0, 0, Word()}), ContextInadmissible);
  CHECK_THROWS_AS(enumerate_interior(g, SitePatch{Word(-3, {0}), 0, 0, Word()}), InadmissibleWord);
}

TEST_CASE("fillings of a gapped set") {
  const Grammar g = golden();
  const Word window(0, {0, 0, 0, 0, 0});
  const Site sites[] = {1, 3};
  CHECK(enumerate_fillings(g, window, sites).size() == 4);
  const Word hemmed(0, {0, 0, 1, 0, 0});
  CHECK(enumerate_fillings(g, hemmed, sites).size() == 1);
}

TEST_CASE("grammar without extensions is rejected") {
  // after a 1 nothing may follow
  std::vector<bool> allowed{true, true, false, false};
  CHECK_THROWS_AS(Grammar(2, 1, allowed), GrammarError);
}

TEST_CASE("random words stay admissible") {
  const Grammar g = golden();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    const Word w = random_admissible_word(g, -5, 20, rng);
    CHECK(w.first() == -5);
    CHECK(w.size() == 20);
    CHECK(is_admissible(g, w));
    const Word r = extend_right(g, w, 7, rng);
    const Word l = extend_left(g, w, 7, rng);
    CHECK(r.size() == 27);
    CHECK(l.first() == -12);
    CHECK(r.slice(-5, 14) == w);
    CHECK(l.slice(-5, 14) == w);
    CHECK(is_admissible(g, r));
    CHECK(is_admissible(g, l));
  }
}

TEST_CASE("pairwise summation") {
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  std::vector<double> tenths(10, 0.1);
  CHECK(pairwise_sum(tenths) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ipow(2, 10) == 1024);
}

TEST_CASE("certified values") {
  CertifiedValue v{0.5, 0.0, 3};
  CHECK(v.exact());
  v.radius = 0.25;
  CHECK_FALSE(v.exact());
  CHECK(v.lower() == 0.25);
  CHECK(v.upper() == 0.75);
  CertifiedValue s{0.5, 0.0, 0, true};
  CHECK_FALSE(s.exact());
}

TEST_CASE("tail profiles") {
  const TailProfile e = TailProfile::exact(2);
  CHECK(e.memory() == 2);
  CHECK(e.bound(1) == 1.0);
  CHECK(e.bound(2) == 0.0);
  CHECK(e.tail_sum(2) == 0.0);
  CHECK(e.summable());

  // 0.3 * 2^-k: tail from k is 0.6 * 2^-k
  const TailProfile g = TailProfile::geometric(0.3, 2.0);
  CHECK(g.memory() == -1);
  CHECK(g.bound(1) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(g.tail_sum(0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(g.tail_sum(3) == doctest::Approx(0.075).epsilon(1e-14));
  // sum_{k>=n} 0.6 * 2^-k = 1.2 * 2^-n
  CHECK(g.double_tail_sum(1) == doctest::Approx(0.6).epsilon(1e-14));
  // 0.09 * 4^-k summed: 0.12
  CHECK(g.tail_sum_sq(0) == doctest::Approx(0.12).epsilon(1e-14));

  const TailProfile h = TailProfile::power(0.3, 1.0);
  CHECK_FALSE(h.summable());
  CHECK(h.square_summable());
  CHECK(std::isinf(h.tail_sum(5)));
  CHECK(h.bound(2) == doctest::Approx(0.1).epsilon(1e-15));

  const TailProfile t = TailProfile::table({0.5, 0.25, 0.0});
  CHECK(t.bound(1) == 0.25);
  CHECK(t.bound(9) == 0.0);
  CHECK(t.tail_sum(0) == 0.75);
}
