#include "chainspec/lattice.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "chainspec/errors.hpp"

namespace chainspec {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ConfigError("alphabet must contain at least one symbol");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw ConfigError("empty symbol label");
    if (l.find_first_of(" \t;,") != std::string::npos)
      throw ConfigError("symbol label '" + l + "' contains a separator");
    if (!seen.insert(l).second) throw ConfigError("duplicate symbol label '" + l + "'");
    if (l.size() != 1) compact_ = false;
  }
}

Symbol Alphabet::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw ConfigError("unknown symbol '" + label + "'");
  return static_cast<Symbol>(it - labels_.begin());
}

std::vector<Symbol> Alphabet::parse_word(const std::string& text) const {
  std::vector<Symbol> out;
  if (compact_) {
    for (char c : text) {
      if (c == ' ' || c == '\t') continue;
      out.push_back(index_of(std::string(1, c)));
    }
    return out;
  }
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(index_of(tok));
  return out;
}

std::string Alphabet::format_word(std::span<const Symbol> symbols) const {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (!compact_ && i > 0) out += ' ';
    out += label(symbols[i]);
  }
  return out;
}

// ----------------------------------------------------------------- Grammar

Grammar::Grammar(std::size_t alphabet_size, int order, std::vector<bool> allowed)
    : q_(alphabet_size), order_(order), allowed_(std::move(allowed)) {
  if (q_ == 0) throw GrammarError("empty alphabet");
  if (order_ < 0) throw GrammarError("negative grammar order");
  const std::size_t n = ipow(q_, static_cast<std::size_t>(order_) + 1);
  if (allowed_.size() != n)
    throw GrammarError("grammar table has " + std::to_string(allowed_.size()) + " entries, expected " +
                       std::to_string(n));
  if (std::none_of(allowed_.begin(), allowed_.end(), [](bool b) { return b; }))
    throw GrammarError("grammar forbids every word");

  // Every allowed factor must extend by one symbol on each side.
  const std::size_t len = static_cast<std::size_t>(order_) + 1;
  std::vector<Symbol> w(len), probe(len);
  for (std::size_t code = 0; code < n; ++code) {
    if (!allowed_[code]) continue;
    std::size_t c = code;
    for (std::size_t p = len; p-- > 0;) {
      w[p] = static_cast<Symbol>(c % q_);
      c /= q_;
    }
    bool right = false, left = false;
    for (std::size_t a = 0; a < q_ && !right; ++a) {
      std::copy(w.begin() + 1, w.end(), probe.begin());
      probe[len - 1] = static_cast<Symbol>(a);
      right = allows(probe);
    }
    for (std::size_t a = 0; a < q_ && !left; ++a) {
      probe[0] = static_cast<Symbol>(a);
      std::copy(w.begin(), w.end() - 1, probe.begin() + 1);
      left = allows(probe);
    }
    if (!right || !left) {
      std::string word;
      for (Symbol s : w) word += std::to_string(s) + (len > 1 ? "," : "");
      throw GrammarError("allowed word [" + word + "] is a dead end (no " + (right ? "left" : "right") +
                         " extension)");
    }
  }
}

Grammar Grammar::full_shift(std::size_t alphabet_size) {
  return Grammar(alphabet_size, 0, std::vector<bool>(alphabet_size, true));
}

Grammar Grammar::from_forbidden(std::size_t alphabet_size, int order,
                                const std::vector<std::vector<Symbol>>& forbidden) {
  const std::size_t len = static_cast<std::size_t>(order) + 1;
  std::vector<bool> table(ipow(alphabet_size, len), true);
  for (const auto& w : forbidden) {
    if (w.size() != len)
      throw GrammarError("forbidden word of length " + std::to_string(w.size()) + " for grammar order " +
                         std::to_string(order));
    std::size_t code = 0;
    for (Symbol s : w) {
      if (s < 0 || static_cast<std::size_t>(s) >= alphabet_size) throw GrammarError("symbol out of range");
      code = code * alphabet_size + static_cast<std::size_t>(s);
    }
    table[code] = false;
  }
  return Grammar(alphabet_size, order, std::move(table));
}

bool Grammar::is_full_shift() const noexcept {
  return std::all_of(allowed_.begin(), allowed_.end(), [](bool b) { return b; });
}

std::size_t Grammar::index(std::span<const Symbol> factor) const {
  std::size_t code = 0;
  for (Symbol s : factor) code = code * q_ + static_cast<std::size_t>(s);
  return code;
}

bool Grammar::allows(std::span<const Symbol> factor) const { return allowed_[index(factor)]; }

bool Grammar::admissible(std::span<const Symbol> word) const {
  const std::size_t len = static_cast<std::size_t>(order_) + 1;
  for (Symbol s : word)
    if (s < 0 || static_cast<std::size_t>(s) >= q_) return false;
  if (word.size() >= len) {
    for (std::size_t p = 0; p + len <= word.size(); ++p)
      if (!allows(word.subspan(p, len))) return false;
    return true;
  }
  // Short words: admissible iff they are a prefix of some allowed factor.
  const std::size_t missing = len - word.size();
  const std::size_t base = index(word) * ipow(q_, missing);
  for (std::size_t t = 0; t < ipow(q_, missing); ++t)
    if (allowed_[base + t]) return true;
  return false;
}

std::vector<std::vector<Symbol>> Grammar::forbidden_words() const {
  const std::size_t len = static_cast<std::size_t>(order_) + 1;
  std::vector<std::vector<Symbol>> out;
  for (std::size_t code = 0; code < allowed_.size(); ++code) {
    if (allowed_[code]) continue;
    std::vector<Symbol> w(len);
    std::size_t c = code;
    for (std::size_t p = len; p-- > 0;) {
      w[p] = static_cast<Symbol>(c % q_);
      c /= q_;
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::optional<Symbol> Grammar::free_symbol() const {
  const std::size_t len = static_cast<std::size_t>(order_) + 1;
  std::vector<Symbol> w(len);
  for (std::size_t s = 0; s < q_; ++s) {
    bool ok = true;
    for (std::size_t code = 0; code < allowed_.size() && ok; ++code) {
      if (!allowed_[code]) continue;
      std::size_t c = code;
      for (std::size_t p = len; p-- > 0;) {
        w[p] = static_cast<Symbol>(c % q_);
        c /= q_;
      }
      for (std::size_t p = 0; p < len && ok; ++p) {
        const Symbol keep = w[p];
        w[p] = static_cast<Symbol>(s);
        ok = allows(w);
        w[p] = keep;
      }
    }
    if (ok) return static_cast<Symbol>(s);
  }
  return std::nullopt;
}

// -------------------------------------------------------------------- Word

Symbol Word::at(Site i) const {
  if (!covers(i)) throw WindowTooShort("site " + std::to_string(i) + " outside window [" + std::to_string(start) +
                                       ", " + std::to_string(end() - 1) + "]");
  return symbols[static_cast<std::size_t>(i - start)];
}

Symbol& Word::at(Site i) {
  if (!covers(i)) throw WindowTooShort("site " + std::to_string(i) + " outside window [" + std::to_string(start) +
                                       ", " + std::to_string(end() - 1) + "]");
  return symbols[static_cast<std::size_t>(i - start)];
}

Word Word::slice(Site lo, Site hi) const {
  if (lo > hi) return Word(lo, {});
  if (!covers(lo, hi))
    throw WindowTooShort("slice [" + std::to_string(lo) + ", " + std::to_string(hi) + "] outside window");
  return Word(lo, std::vector<Symbol>(symbols.begin() + (lo - start), symbols.begin() + (hi - start + 1)));
}

std::span<const Symbol> Word::view(Site lo, Site hi) const {
  if (lo > hi) return {};
  if (!covers(lo, hi))
    throw WindowTooShort("view [" + std::to_string(lo) + ", " + std::to_string(hi) + "] outside window");
  return std::span<const Symbol>(symbols).subspan(static_cast<std::size_t>(lo - start),
                                                  static_cast<std::size_t>(hi - lo + 1));
}

Word concat(const Word& left, const Word& right) {
  if (left.empty()) return right;
  if (right.empty()) return left;
  if (left.end() != right.start) throw InadmissibleWord("words do not abut");
  Word out = left;
  out.symbols.insert(out.symbols.end(), right.symbols.begin(), right.symbols.end());
  return out;
}

void SitePatch::validate() const {
  if (!left_context.empty() && left_context.end() != first)
    throw InadmissibleWord("left context does not end at site " + std::to_string(first - 1));
  if (!right_context.empty() && right_context.start != last + 1)
    throw InadmissibleWord("right context does not start at site " + std::to_string(last + 1));
}

Word SitePatch::compose(std::span<const Symbol> interior) const {
  validate();
  Word out = left_context.empty() ? Word(first, {}) : left_context;
  out.symbols.insert(out.symbols.end(), interior.begin(), interior.end());
  out.symbols.insert(out.symbols.end(), right_context.symbols.begin(), right_context.symbols.end());
  return out;
}

bool is_admissible(const Grammar& g, const Word& w) { return g.admissible(w.symbols); }

std::vector<std::vector<Symbol>> enumerate_fillings(const Grammar& g, const Word& window,
                                                    std::span<const Site> sites) {
  const std::size_t n = window.size();
  const std::size_t len = static_cast<std::size_t>(g.order()) + 1;
  std::vector<std::size_t> pos;
  std::vector<char> free_at(n, 0), assigned(n, 0);
  for (Site s : sites) {
    if (!window.covers(s)) throw WindowTooShort("site " + std::to_string(s) + " outside window");
    pos.push_back(static_cast<std::size_t>(s - window.start));
  }
  if (!std::is_sorted(pos.begin(), pos.end()) || std::adjacent_find(pos.begin(), pos.end()) != pos.end())
    throw InadmissibleWord("sites must be strictly increasing");
  for (std::size_t p : pos) free_at[p] = 1;

  std::vector<Symbol> buf = window.symbols;
  std::vector<std::vector<Symbol>> out;
  std::vector<Symbol> current(pos.size());

  auto factor_ok = [&](std::size_t start) {
    for (std::size_t t = start; t < start + len; ++t)
      if (free_at[t] && !assigned[t]) return true;  // undecided yet
    return g.allows(std::span<const Symbol>(buf).subspan(start, len));
  };

  auto rec = [&](auto&& self, std::size_t idx) -> void {
    if (idx == pos.size()) {
      if (g.admissible(buf)) out.push_back(current);
      return;
    }
    const std::size_t p = pos[idx];
    for (std::size_t a = 0; a < g.alphabet_size(); ++a) {
      buf[p] = static_cast<Symbol>(a);
      assigned[p] = 1;
      bool ok = true;
      if (n >= len) {
        const std::size_t lo = p >= len - 1 ? p - (len - 1) : 0;
        for (std::size_t st = lo; st <= p && st + len <= n && ok; ++st) ok = factor_ok(st);
      }
      if (ok) {
        current[idx] = static_cast<Symbol>(a);
        self(self, idx + 1);
      }
      assigned[p] = 0;
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<Word> enumerate_interior(const Grammar& g, const SitePatch& patch) {
  patch.validate();
  if (!g.admissible(patch.left_context.symbols))
    throw ContextInadmissible("left context violates the grammar");
  if (!g.admissible(patch.right_context.symbols))
    throw ContextInadmissible("right context violates the grammar");
  const Word window = patch.compose(std::vector<Symbol>(static_cast<std::size_t>(patch.interior_size()), 0));
  std::vector<Site> sites;
  for (Site i = patch.first; i <= patch.last; ++i) sites.push_back(i);
  std::vector<Word> out;
  for (auto& f : enumerate_fillings(g, window, sites)) out.emplace_back(patch.first, std::move(f));
  return out;
}

namespace {

std::vector<Symbol> right_candidates(const Grammar& g, const std::vector<Symbol>& w) {
  std::vector<Symbol> cand;
  std::vector<Symbol> probe = w;
  probe.push_back(0);
  const std::size_t len = static_cast<std::size_t>(g.order()) + 1;
  for (std::size_t a = 0; a < g.alphabet_size(); ++a) {
    probe.back() = static_cast<Symbol>(a);
    const auto tail = probe.size() >= len ? std::span<const Symbol>(probe).last(len) : std::span<const Symbol>(probe);
    if (g.admissible(tail)) cand.push_back(static_cast<Symbol>(a));
  }
  return cand;
}

}  // namespace

Word extend_right(const Grammar& g, const Word& prefix, std::size_t extra, std::mt19937_64& rng) {
  Word out = prefix;
  for (std::size_t t = 0; t < extra; ++t) {
    const auto cand = right_candidates(g, out.symbols);
    if (cand.empty()) throw GrammarError("no admissible right extension");
    std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
    out.symbols.push_back(cand[pick(rng)]);
  }
  return out;
}

Word extend_left(const Grammar& g, const Word& suffix, std::size_t extra, std::mt19937_64& rng) {
  Word out = suffix;
  const std::size_t len = static_cast<std::size_t>(g.order()) + 1;
  for (std::size_t t = 0; t < extra; ++t) {
    std::vector<Symbol> cand;
    std::vector<Symbol> probe;
    for (std::size_t a = 0; a < g.alphabet_size(); ++a) {
      probe.assign(1, static_cast<Symbol>(a));
      probe.insert(probe.end(), out.symbols.begin(),
                   out.symbols.begin() + static_cast<std::ptrdiff_t>(std::min(out.symbols.size(), len - 1)));
      if (g.admissible(probe)) cand.push_back(static_cast<Symbol>(a));
    }
    if (cand.empty()) throw GrammarError("no admissible left extension");
    std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
    out.symbols.insert(out.symbols.begin(), cand[pick(rng)]);
    out.start -= 1;
  }
  return out;
}

Word random_admissible_word(const Grammar& g, Site start, std::size_t length, std::mt19937_64& rng) {
  return extend_right(g, Word(start, {}), length, rng);
}

}  // namespace chainspec
