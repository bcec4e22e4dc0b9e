#include "chainspec/kernels.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>

#include "chainspec/errors.hpp"

namespace chainspec {

namespace {

TailProfile worse(const TailProfile& a, const TailProfile& b) {
  if (a.form() == TailProfile::Form::Exact && b.form() == TailProfile::Form::Exact)
    return a.memory() >= b.memory() ? a : b;
  if (a.form() == TailProfile::Form::Exact) return b;
  return a;
}

}  // namespace

// --------------------------------------------------------------- LisFamily

LisFamily::LisFamily(Alphabet alphabet, Grammar grammar, GSingleton singleton, bool stationary)
    : alphabet_(std::move(alphabet)),
      grammar_(std::move(grammar)),
      default_(std::move(singleton)),
      profile_(default_.memory),
      stationary_(stationary) {
  if (alphabet_.size() != grammar_.alphabet_size()) throw ConfigError("grammar and alphabet sizes differ");
  if (!default_.eval) throw ConfigError("singleton without evaluation function");
}

void LisFamily::set_singleton(Site i, GSingleton s) {
  profile_ = worse(profile_, s.memory);
  overrides_.insert_or_assign(i, std::move(s));
  stationary_ = false;
}

const GSingleton& LisFamily::singleton(Site i) const {
  const auto it = overrides_.find(i);
  return it == overrides_.end() ? default_ : it->second;
}

double LisFamily::f(Site i, std::span<const Symbol> past, Symbol a) const {
  const GSingleton& s = singleton(i);
  const int mem = s.memory.memory();
  if (mem > 0 && past.size() < static_cast<std::size_t>(mem))
    throw WindowTooShort("site " + std::to_string(i) + " needs " + std::to_string(mem) + " past symbols, got " +
                         std::to_string(past.size()));
  if (a < 0 || static_cast<std::size_t>(a) >= alphabet_.size()) throw InadmissibleWord("symbol out of range");
  const std::size_t m = static_cast<std::size_t>(grammar_.order());
  Symbol buf[64];
  std::vector<Symbol> big;
  const std::size_t keep = std::min(past.size(), m);
  Symbol* tail = buf;
  if (keep + 1 > 64) {
    big.resize(keep + 1);
    tail = big.data();
  }
  std::copy(past.end() - static_cast<std::ptrdiff_t>(keep), past.end(), tail);
  tail[keep] = a;
  if (!grammar_.admissible(std::span<const Symbol>(tail, keep + 1))) return 0.0;
  return s.eval(i, past, a);
}

double LisFamily::f(Site i, const Word& w) const {
  if (!w.covers(i)) throw WindowTooShort("site " + std::to_string(i) + " outside window");
  return f(i, w.view(w.start, i - 1), w.at(i));
}

std::vector<Site> LisFamily::probe_sites() const {
  std::vector<Site> out{0};
  for (const auto& kv : overrides_) out.push_back(kv.first);
  out.insert(out.end(), extra_sites_.begin(), extra_sites_.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double LisFamily::c_min() const {
  if (c_min_ >= 0.0) return c_min_;
  const std::size_t q = alphabet_.size();
  int depth = profile_.memory() >= 0 ? profile_.memory() : 10;
  while (depth > 0 && std::pow(static_cast<double>(q), depth + 1) > 65536.0) --depth;
  double lo = 1.0;
  for (Site i : probe_sites()) {
    const Word window(i - depth, std::vector<Symbol>(static_cast<std::size_t>(depth) + 1, 0));
    std::vector<Site> sites;
    for (Site t = i - depth; t <= i; ++t) sites.push_back(t);
    for (const auto& w : enumerate_fillings(grammar_, window, sites)) {
      const double v = f(i, std::span<const Symbol>(w).first(static_cast<std::size_t>(depth)), w.back());
      lo = std::min(lo, v - profile_.bound(depth) - eval_radius_);
    }
  }
  c_min_ = std::max(0.0, lo);
  return c_min_;
}

// -------------------------------------------------------------- SpecFamily

SpecFamily::SpecFamily(Alphabet alphabet, Grammar grammar, RhoSingleton singleton, std::vector<double> weights,
                       bool stationary)
    : alphabet_(std::move(alphabet)),
      grammar_(std::move(grammar)),
      default_(std::move(singleton)),
      weights_(std::move(weights)),
      stationary_(stationary) {
  if (alphabet_.size() != grammar_.alphabet_size()) throw ConfigError("grammar and alphabet sizes differ");
  if (!default_.eval) throw ConfigError("singleton without evaluation function");
  if (weights_.empty()) weights_.assign(alphabet_.size(), 1.0);
  if (weights_.size() != alphabet_.size()) throw ConfigError("one site weight per symbol expected");
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("site weights must be positive and finite");
  if (default_.range < 0) throw ConfigError("negative range");
  max_reach_ = std::max(default_.range, grammar_.order());
}

void SpecFamily::set_singleton(Site i, RhoSingleton s) {
  if (!s.eval) throw ConfigError("singleton without evaluation function");
  max_reach_ = std::max(max_reach_, std::max(s.range, grammar_.order()));
  overrides_.insert_or_assign(i, std::move(s));
  stationary_ = false;
}

const RhoSingleton& SpecFamily::singleton(Site i) const {
  const auto it = overrides_.find(i);
  return it == overrides_.end() ? default_ : it->second;
}

std::vector<Site> SpecFamily::probe_sites() const {
  std::vector<Site> out{0};
  for (const auto& kv : overrides_) out.push_back(kv.first);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int SpecFamily::reach(Site i) const { return std::max(singleton(i).range, grammar_.order()); }

double SpecFamily::rho(Site i, const Word& w) const {
  const RhoSingleton& s = singleton(i);
  const int r = std::max(s.range, grammar_.order());
  if (!w.covers(i - r, i + r))
    throw WindowTooShort("rho at site " + std::to_string(i) + " needs sites [" + std::to_string(i - r) + ", " +
                         std::to_string(i + r) + "]");
  const int m = grammar_.order();
  if (m > 0 && !grammar_.admissible(w.view(i - m, i + m))) return 0.0;
  return s.eval(w, i);
}

// ------------------------------------------------------------- operations

CertifiedValue lis_interval(const LisFamily& f, Site l, Site m, std::span<const Symbol> word, const Word& past) {
  if (m < l) return {1.0, 0.0, 0, false};
  if (word.size() != static_cast<std::size_t>(m - l + 1))
    throw InadmissibleWord("word length does not match the interval");
  if (!past.empty() && past.end() != l) throw InadmissibleWord("past must end at site " + std::to_string(l - 1));
  if (!f.grammar().admissible(past.symbols)) throw ContextInadmissible("past violates the grammar");
  const int need = f.required_depth();
  if (past.size() < static_cast<std::size_t>(need))
    throw WindowTooShort("past of length " + std::to_string(past.size()) + " does not cover memory " +
                         std::to_string(need));
  std::vector<Symbol> buf = past.symbols;
  buf.insert(buf.end(), word.begin(), word.end());
  if (!f.grammar().admissible(buf)) return {0.0, 0.0, static_cast<int>(m), false};

  double value = 1.0, radius = 0.0;
  const std::size_t p = past.size();
  for (std::size_t t = 0; t < word.size(); ++t) {
    const Site i = l + static_cast<Site>(t);
    value *= f.f(i, std::span<const Symbol>(buf).first(p + t), word[t]);
    radius += f.memory(i).bound(static_cast<int>(p + t)) + f.eval_radius();
  }
  return {value, std::min(radius, 1.0), static_cast<int>(m), false};
}

NormalizationReport check_singleton_normalization(const LisFamily& f, Site i, std::size_t probes,
                                                  std::mt19937_64& rng, double tol) {
  NormalizationReport rep;
  const int depth = f.memory(i).memory() >= 0 ? f.memory(i).memory() : 12;
  for (std::size_t p = 0; p < probes; ++p) {
    const Word past = random_admissible_word(f.grammar(), i - depth, static_cast<std::size_t>(depth), rng);
    std::vector<double> terms;
    for (std::size_t a = 0; a < f.alphabet().size(); ++a) terms.push_back(f.f(i, past.symbols, static_cast<Symbol>(a)));
    const double defect = std::fabs(pairwise_sum(terms) - 1.0);
    ++rep.probes;
    if (defect >= rep.max_defect) {
      rep.max_defect = defect;
      rep.worst = past;
    }
  }
  rep.pass = rep.max_defect <= tol;
  return rep;
}

NormalizationReport check_singleton_normalization(const SpecFamily& s, Site i, std::size_t probes,
                                                  std::mt19937_64& rng, double tol) {
  NormalizationReport rep;
  const int r = s.reach(i);
  for (std::size_t p = 0; p < probes; ++p) {
    Word w = random_admissible_word(s.grammar(), i - r, static_cast<std::size_t>(2 * r + 1), rng);
    std::vector<double> terms;
    for (std::size_t a = 0; a < s.alphabet().size(); ++a) {
      w.at(i) = static_cast<Symbol>(a);
      terms.push_back(s.gamma(i, w));
    }
    const double defect = std::fabs(pairwise_sum(terms) - 1.0);
    ++rep.probes;
    if (defect >= rep.max_defect) {
      rep.max_defect = defect;
      rep.worst = w;
    }
  }
  rep.pass = rep.max_defect <= tol;
  return rep;
}

namespace {

// rho of rest + {k} with k added last, given rho of rest:
//   full shift  rho_k / lambda_k(rho_k / rho_rest)
//   otherwise   rho_rest * r(w_k) / lambda_k(r), r = rho_k / rho_rest with the
//               free symbol on rest, so that every admissible w_k is reachable
template <class RhoRest>
double add_last(const SpecFamily& s, Site k, std::span<const Site> rest, Word& w, RhoRest&& rho_rest) {
  const bool full = s.grammar().is_full_shift();
  std::vector<Symbol> saved;
  for (Site x : rest) saved.push_back(w.at(x));
  const Symbol keep = w.at(k);
  double base = 0.0;
  if (full) {
    base = s.rho(k, w);
    if (base == 0.0) return 0.0;
  } else {
    const auto z = s.grammar().free_symbol();
    if (!z) throw Unsupported("grammar has no free symbol; the volume recursion needs one");
    base = rho_rest(w);
    if (base == 0.0) return 0.0;
    for (Site x : rest) w.at(x) = *z;
  }
  auto restore = [&] {
    w.at(k) = keep;
    for (std::size_t t = 0; t < rest.size(); ++t) w.at(rest[t]) = saved[t];
  };
  std::vector<double> terms;
  double at_keep = 0.0;
  for (std::size_t a = 0; a < s.alphabet().size(); ++a) {
    w.at(k) = static_cast<Symbol>(a);
    const double rk = s.rho(k, w);
    if (rk == 0.0) continue;
    const double rs = rho_rest(w);
    if (rs == 0.0) {
      restore();
      throw PositivityViolated("rho of a sub-volume vanishes on an admissible configuration");
    }
    terms.push_back(s.weight(static_cast<Symbol>(a)) * rk / rs);
    if (static_cast<Symbol>(a) == keep) at_keep = rk / rs;
  }
  restore();
  const double den = pairwise_sum(terms);
  if (den == 0.0) throw PositivityViolated("empty normalisation in the volume recursion");
  return full ? base / den : base * at_keep / den;
}

bool window_admissible(const SpecFamily& s, const Word& w, std::span<const Site> sites) {
  Site lo = sites.front(), hi = sites.front();
  for (Site x : sites) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const int m = s.grammar().order();
  lo = std::max(lo - m, w.start);
  hi = std::min(hi + m, w.end() - 1);
  return s.grammar().admissible(w.view(lo, hi));
}

double rho_rec(const SpecFamily& s, std::span<const Site> order, Word& w) {
  if (order.size() == 1) return s.rho(order[0], w);
  const auto rest = order.first(order.size() - 1);
  return add_last(s, order.back(), rest, w, [&](Word& v) { return rho_rec(s, rest, v); });
}

}  // namespace

double rho_pair(const SpecFamily& s, Site i, Site j, const Word& w, double tol) {
  if (i == j) throw InadmissibleWord("rho_pair needs two distinct sites");
  const Site si[] = {i}, sj[] = {j};
  if (!window_admissible(s, w, si) || !window_admissible(s, w, sj)) return 0.0;
  Word buf = w;
  const double lhs = add_last(s, i, sj, buf, [&](Word& v) { return s.rho(j, v); });
  const double rhs = add_last(s, j, si, buf, [&](Word& v) { return s.rho(i, v); });
  const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
  if (std::fabs(lhs - rhs) > tol * scale) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "sites %lld,%lld: %.17g vs %.17g", static_cast<long long>(i),
                  static_cast<long long>(j), lhs, rhs);
    throw OrderConsistencyViolated(msg);
  }
  return lhs;
}

double rho_volume(const SpecFamily& s, std::span<const Site> order, const Word& w) {
  if (order.empty()) return 1.0;
  if (!window_admissible(s, w, order)) return 0.0;
  Word buf = w;
  return rho_rec(s, order, buf);
}

double gamma_volume_by_recursion(const SpecFamily& s, std::span<const Site> sites, std::span<const Symbol> interior,
                                 const Word& window) {
  if (sites.size() != interior.size()) throw InadmissibleWord("interior does not match the volume");
  if (sites.empty()) return 1.0;
  Word w = window;
  double lam = 1.0;
  for (std::size_t t = 0; t < sites.size(); ++t) {
    w.at(sites[t]) = interior[t];
    lam *= s.weight(interior[t]);
  }
  return lam * rho_volume(s, sites, w);
}

namespace {

// Sums over fillings of the free sites in [lo, hi] of the weight relative to
// the reference filling (free symbol everywhere). Track 0 is unconstrained;
// track t > 0 follows forced[t-1] (-1 = unconstrained). Every track is
// rescaled by the running total of track 0, so the returned values are the
// masses of the constrained tracks relative to the unconstrained one.
std::vector<double> relative_masses(const SpecFamily& s, const Word& window, Site lo, Site hi,
                                    const std::vector<char>& free, const std::vector<std::vector<Symbol>>& forced,
                                    Symbol z) {
  const Grammar& g = s.grammar();
  const int m = g.order();
  const std::size_t q = s.alphabet().size();
  const std::size_t tracks = forced.size() + 1;
  int width = std::max(1, s.max_reach());
  Word cfg = window;
  for (Site i = lo; i <= hi; ++i)
    if (free[static_cast<std::size_t>(i - lo)]) cfg.at(i) = z;
  const Word ref = cfg;

  // state: symbols at sites [max(lo, i-width+1), i] packed base q, most
  // recent site least significant
  std::map<std::uint64_t, std::vector<double>> states;
  states[0] = std::vector<double>(tracks, 1.0);
  std::uint64_t modulus = 1;
  for (int t = 0; t < width; ++t) modulus *= q;

  auto write_state = [&](std::uint64_t code, Site last) {
    for (int t = 0; t < width && last - t >= lo; ++t) {
      cfg.at(last - t) = static_cast<Symbol>(code % q);
      code /= q;
    }
  };

  for (Site i = lo; i <= hi; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i - lo);
    std::map<std::uint64_t, std::vector<double>> next;
    for (const auto& [code, wgt] : states) {
      write_state(code, i - 1);
      for (std::size_t a = 0; a < q; ++a) {
        const Symbol sym = static_cast<Symbol>(a);
        if (!free[idx] && sym != ref.at(i)) continue;
        cfg.at(i) = sym;
        if (m > 0 && cfg.covers(i - m) && !g.allows(cfg.view(i - m, i))) continue;
        double factor = 1.0;
        if (free[idx]) {
          const double num = s.rho(i, cfg);
          if (num == 0.0) continue;
          cfg.at(i) = z;
          const double den = s.rho(i, cfg);
          cfg.at(i) = sym;
          if (den == 0.0) throw PositivityViolated("reference configuration has zero density at site " +
                                                   std::to_string(i));
          factor = s.weight(sym) / s.weight(z) * (num / den);
        }
        const std::uint64_t nc = (code * q + a) % modulus;
        auto& slot = next[nc];
        if (slot.empty()) slot.assign(tracks, 0.0);
        slot[0] += wgt[0] * factor;
        for (std::size_t t = 1; t < tracks; ++t) {
          const Symbol f = forced[t - 1][idx];
          if (f < 0 || f == sym) slot[t] += wgt[t] * factor;
        }
      }
      cfg.at(i) = ref.at(i);
    }
    double total = 0.0;
    for (const auto& kv : next) total += kv.second[0];
    if (total == 0.0) throw ZeroDenominator("no admissible filling of the volume for this exterior");
    for (auto& kv : next)
      for (double& x : kv.second) x /= total;
    states = std::move(next);
    for (Site t = lo; t <= i; ++t) cfg.at(t) = ref.at(t);
  }

  std::vector<double> total(tracks, 0.0);
  for (const auto& [code, wgt] : states) {
    write_state(code, hi);
    bool ok = true;
    for (Site e = hi + 1; e <= hi + m && ok; ++e)
      if (cfg.covers(e - m, e)) ok = g.allows(cfg.view(e - m, e));
    if (ok)
      for (std::size_t t = 0; t < tracks; ++t) total[t] += wgt[t];
  }
  if (total[0] == 0.0) throw ZeroDenominator("no admissible filling of the volume for this exterior");
  std::vector<double> out;
  for (std::size_t t = 1; t < tracks; ++t) out.push_back(total[t] / total[0]);
  return out;
}

}  // namespace

double cylinder_probability(const SpecFamily& s, const Word& window, std::span<const Site> volume,
                            std::span<const Site> event_sites, const std::vector<std::vector<Symbol>>& event_words) {
  if (volume.empty()) {
    // event must be decided by the window itself
    for (const auto& word : event_words) {
      bool match = true;
      for (std::size_t t = 0; t < event_sites.size() && match; ++t) match = window.at(event_sites[t]) == word[t];
      if (match) return 1.0;
    }
    return 0.0;
  }
  if (!std::is_sorted(volume.begin(), volume.end())) throw InadmissibleWord("volume sites must be ascending");
  const Site lo = volume.front(), hi = volume.back();
  const int r = s.max_reach();
  if (!window.covers(lo - r, hi + r))
    throw WindowTooShort("window does not cover the volume plus reach " + std::to_string(r));
  const auto z = s.grammar().free_symbol();

  const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
  std::vector<char> free(n, 0);
  for (Site v : volume) free[static_cast<std::size_t>(v - lo)] = 1;

  if (!z) {
    // no reference filler: sum rho_Lambda lambda_Lambda over fillings
    double total = 0.0;
    const auto fills = enumerate_fillings(s.grammar(), window, volume);
    std::vector<double> terms;
    for (const auto& fill : fills) {
      Word w = window;
      for (std::size_t t = 0; t < volume.size(); ++t) w.at(volume[t]) = fill[t];
      bool hit = false;
      for (const auto& word : event_words) {
        bool match = true;
        for (std::size_t t = 0; t < event_sites.size() && match; ++t) match = w.at(event_sites[t]) == word[t];
        hit = hit || match;
      }
      if (hit) terms.push_back(gamma_volume_by_recursion(s, volume, fill, window));
    }
    total = pairwise_sum(terms);
    return total;
  }

  std::vector<std::vector<Symbol>> forced;
  for (const auto& word : event_words) {
    if (word.size() != event_sites.size()) throw InadmissibleWord("event word does not match event sites");
    std::vector<Symbol> f(n, -1);
    bool possible = true;
    for (std::size_t t = 0; t < event_sites.size(); ++t) {
      const Site e = event_sites[t];
      if (e < lo || e > hi || !free[static_cast<std::size_t>(e - lo)]) {
        possible = possible && window.at(e) == word[t];
        continue;
      }
      f[static_cast<std::size_t>(e - lo)] = word[t];
    }
    if (possible) forced.push_back(std::move(f));
  }
  const auto masses = relative_masses(s, window, lo, hi, free, forced, *z);
  return pairwise_sum(masses);
}

double gamma_volume(const SpecFamily& s, std::span<const Site> sites, std::span<const Symbol> interior,
                    const Word& window) {
  if (sites.size() != interior.size()) throw InadmissibleWord("interior does not match the volume");
  return cylinder_probability(s, window, sites, sites, {std::vector<Symbol>(interior.begin(), interior.end())});
}

namespace {

std::vector<std::vector<Symbol>> words_of_length(const Grammar& g, int length) {
  std::vector<std::vector<Symbol>> out;
  if (length <= 0) {
    out.push_back({});
    return out;
  }
  for (auto& w : enumerate_interior(g, SitePatch{Word(), 0, length - 1, Word()})) out.push_back(std::move(w.symbols));
  return out;
}

}  // namespace

Envelope volume_envelope(const SpecFamily& s, const Word& base, std::span<const Site> volume,
                         std::span<const Site> event_sites, const std::vector<std::vector<Symbol>>& event_words,
                         bool vary_left, bool vary_right, const BoundarySet& set) {
  const int r = s.max_reach();
  const Site lo = volume.front(), hi = volume.back();
  if (!base.covers(lo - r, hi + r)) throw WindowTooShort("base window does not cover the volume boundary");
  const auto words = words_of_length(s.grammar(), r);
  const std::vector<std::vector<Symbol>> none{{}};
  const auto& lefts = vary_left ? words : none;
  const auto& rights = vary_right ? words : none;

  Envelope env;
  std::vector<std::pair<std::size_t, std::size_t>> combos;
  if (lefts.size() * rights.size() <= set.budget) {
    for (std::size_t a = 0; a < lefts.size(); ++a)
      for (std::size_t b = 0; b < rights.size(); ++b) combos.emplace_back(a, b);
  } else {
    env.sampled = true;
    // constant words first (they are the extremal boundaries for ferromagnets)
    std::vector<std::size_t> lc, rc;
    auto constant = [](const std::vector<Symbol>& w) {
      return std::adjacent_find(w.begin(), w.end(), std::not_equal_to<>()) == w.end();
    };
    for (std::size_t a = 0; a < lefts.size(); ++a)
      if (constant(lefts[a])) lc.push_back(a);
    for (std::size_t b = 0; b < rights.size(); ++b)
      if (constant(rights[b])) rc.push_back(b);
    for (std::size_t a : lc)
      for (std::size_t b : rc) combos.emplace_back(a, b);
    std::mt19937_64 rng(set.seed);
    std::uniform_int_distribution<std::size_t> pl(0, lefts.size() - 1), pr(0, rights.size() - 1);
    for (std::size_t t = 0; t < set.probes; ++t) combos.emplace_back(pl(rng), pr(rng));
  }

  Word window = base;
  bool first = true;
  for (const auto& [a, b] : combos) {
    if (vary_left)
      for (int t = 0; t < r; ++t) window.at(lo - r + t) = lefts[a][static_cast<std::size_t>(t)];
    if (vary_right)
      for (int t = 0; t < r; ++t) window.at(hi + 1 + t) = rights[b][static_cast<std::size_t>(t)];
    double v = 0.0;
    try {
      v = cylinder_probability(s, window, volume, event_sites, event_words);
    } catch (const ZeroDenominator&) {
      continue;
    }
    ++env.boundaries;
    if (first) {
      env.sup = env.inf = v;
      first = false;
    } else {
      env.sup = std::max(env.sup, v);
      env.inf = std::min(env.inf, v);
    }
  }
  if (env.boundaries == 0) throw ZeroDenominator("no probed boundary admits a filling of the volume");
  return env;
}

}  // namespace chainspec
