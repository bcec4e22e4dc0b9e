#pragma once

// Finite alphabets, finite-type grammars and explicit windows of the
// one-dimensional lattice. Every configuration handled by the library is a
// finite Word; there is no implicit infinite configuration anywhere.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace chainspec {

using Symbol = int;
using Site = std::int64_t;

class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(Symbol s) const { return labels_.at(static_cast<std::size_t>(s)); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Symbol index_of(const std::string& label) const;

  // Words are written compactly ("0110") when every label is one character,
  // and whitespace-separated otherwise.
  std::vector<Symbol> parse_word(const std::string& text) const;
  std::string format_word(std::span<const Symbol> symbols) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> labels_;
  bool compact_ = true;
};

// Subshift of finite type: a word is admissible iff every factor of length
// order+1 is allowed. Order 0 with every symbol allowed is the full shift.
class Grammar {
 public:
  // Throws GrammarError if some allowed word has no allowed extension on the
  // left or on the right.
  Grammar(std::size_t alphabet_size, int order, std::vector<bool> allowed);

  static Grammar full_shift(std::size_t alphabet_size);
  static Grammar from_forbidden(std::size_t alphabet_size, int order,
                                const std::vector<std::vector<Symbol>>& forbidden);

  std::size_t alphabet_size() const noexcept { return q_; }
  int order() const noexcept { return order_; }
  bool is_full_shift() const noexcept;

  // `factor` has length order()+1.
  bool allows(std::span<const Symbol> factor) const;
  bool admissible(std::span<const Symbol> word) const;

  // Allowed words of length order()+1 that are not permitted, in canonical order.
  std::vector<std::vector<Symbol>> forbidden_words() const;

  // A symbol that may replace any position of any allowed factor and keep it
  // allowed. Interval telescoping uses it as reference filler.
  std::optional<Symbol> free_symbol() const;

  bool operator==(const Grammar&) const = default;

 private:
  std::size_t index(std::span<const Symbol> factor) const;

  std::size_t q_;
  int order_;
  std::vector<bool> allowed_;
};

struct Word {
  Site start = 0;
  std::vector<Symbol> symbols;

  Word() = default;
  Word(Site first, std::vector<Symbol> s) : start(first), symbols(std::move(s)) {}

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
  Site first() const noexcept { return start; }
  // One past the last site.
  Site end() const noexcept { return start + static_cast<Site>(symbols.size()); }
  bool covers(Site i) const noexcept { return i >= start && i < end(); }
  bool covers(Site lo, Site hi) const noexcept { return lo > hi || (covers(lo) && covers(hi)); }

  Symbol at(Site i) const;
  Symbol& at(Site i);
  // Sites [lo, hi] inclusive; empty if lo > hi.
  Word slice(Site lo, Site hi) const;
  std::span<const Symbol> view(Site lo, Site hi) const;

  bool operator==(const Word&) const = default;
};

// Concatenation of abutting words.
Word concat(const Word& left, const Word& right);

struct SitePatch {
  Word left_context;
  Site first = 0;  // interior interval [first, last]
  Site last = -1;
  Word right_context;

  Site interior_size() const noexcept { return last >= first ? last - first + 1 : 0; }
  // Throws InadmissibleWord if contexts do not abut the interior.
  void validate() const;
  Word compose(std::span<const Symbol> interior) const;
};

bool is_admissible(const Grammar& g, const Word& w);

// All interior words w with left·w·right admissible, lexicographic in
// alphabet order. Throws ContextInadmissible on a bad context.
std::vector<Word> enumerate_interior(const Grammar& g, const SitePatch& patch);

// Generalisation to an arbitrary finite site set inside a window: every
// assignment of symbols to `sites` (ascending) keeping `window` admissible.
// The values currently stored at `sites` in `window` are ignored.
std::vector<std::vector<Symbol>> enumerate_fillings(const Grammar& g, const Word& window,
                                                    std::span<const Site> sites);

// Uniform random walk on allowed extensions.
Word random_admissible_word(const Grammar& g, Site start, std::size_t length, std::mt19937_64& rng);
// Extends `prefix` on the right by `extra` symbols.
Word extend_right(const Grammar& g, const Word& prefix, std::size_t extra, std::mt19937_64& rng);
// Extends `suffix` on the left by `extra` symbols.
Word extend_left(const Grammar& g, const Word& suffix, std::size_t extra, std::mt19937_64& rng);

// Deterministic pairwise summation, used for every normalisation.
double pairwise_sum(std::span<const double> values);

std::size_t ipow(std::size_t base, std::size_t exp);

}  // namespace chainspec
