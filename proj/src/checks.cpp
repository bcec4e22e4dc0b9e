#include "chainspec/checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "chainspec/errors.hpp"
#include "chainspec/rates.hpp"

namespace chainspec {

namespace {

void record(Check& c, double diff, double slack, const std::string& where) {
  ++c.probes;
  const double excess = diff - slack;
  c.worst = std::max(c.worst, excess);
  if (excess > c.tolerance && c.pass) {
    c.pass = false;
    std::ostringstream os;
    os << where << ": discrepancy " << diff << " exceeds " << slack + c.tolerance;
    c.detail = os.str();
  }
}

// Every admissible word on [lo, hi] when there are at most `budget` of them,
// else `probes` random ones.
std::vector<Word> windows(const Grammar& g, Site lo, Site hi, std::size_t budget, std::size_t probes,
                          std::mt19937_64& rng) {
  const auto len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<Word> out;
  if (ipow(g.alphabet_size(), len) <= budget) {
    std::vector<Site> sites;
    for (Site i = lo; i <= hi; ++i) sites.push_back(i);
    for (auto& f : enumerate_fillings(g, Word(lo, std::vector<Symbol>(len, 0)), sites)) out.emplace_back(lo, f);
    return out;
  }
  for (std::size_t t = 0; t < probes; ++t) out.push_back(random_admissible_word(g, lo, len, rng));
  return out;
}

std::vector<Site> random_subset(Site lo, Site hi, std::size_t min_size, std::size_t max_size, std::mt19937_64& rng) {
  std::vector<Site> all;
  for (Site i = lo; i <= hi; ++i) all.push_back(i);
  std::shuffle(all.begin(), all.end(), rng);
  std::uniform_int_distribution<std::size_t> pick(min_size, std::min(max_size, all.size()));
  all.resize(pick(rng));
  std::sort(all.begin(), all.end());
  return all;
}

Word with(const Word& w, std::span<const Site> sites, std::span<const Symbol> values) {
  Word v = w;
  for (std::size_t t = 0; t < sites.size(); ++t) v.at(sites[t]) = values[t];
  return v;
}

std::vector<Symbol> read(const Word& w, std::span<const Site> sites) {
  std::vector<Symbol> out;
  for (Site i : sites) out.push_back(w.at(i));
  return out;
}

double lambda_of(const SpecFamily& s, std::span<const Symbol> sym) {
  double p = 1.0;
  for (Symbol a : sym) p *= s.weight(a);
  return p;
}

std::string show(const Word& w) {
  std::ostringstream os;
  os << "[" << w.start << "]";
  for (Symbol a : w.symbols) os << a;
  return os.str();
}

// Random test function on the fillings of a site set.
struct TestFunction {
  std::map<std::vector<Symbol>, double> values;
  std::mt19937_64* rng;
  double operator()(const std::vector<Symbol>& key) {
    auto it = values.find(key);
    if (it != values.end()) return it->second;
    const double v = std::uniform_real_distribution<double>(-1.0, 1.0)(*rng);
    values.emplace(key, v);
    return v;
  }
};

}  // namespace

double path_weight(const TransferModel& tm, const Word& w) {
  const auto M = static_cast<std::size_t>(tm.memory());
  if (w.size() < M) throw WindowTooShort("word shorter than the transfer memory");
  if (!tm.grammar().admissible(w.symbols)) return 0.0;
  std::size_t state = tm.state_index(std::span<const Symbol>(w.symbols).first(M));
  double p = 1.0;
  for (std::size_t t = M; t < w.size(); ++t) {
    const long nx = tm.next(state, w.symbols[t]);
    if (nx < 0) return 0.0;
    p *= tm.weight(state, w.symbols[t]);
    state = static_cast<std::size_t>(nx);
  }
  return p;
}

Check check_lis_to_spec_oracle(const LisFamily& f, const TransferModel& chain, const Settings& settings) {
  Check c{"lis-to-spec vs transfer conditionals"};
  c.tolerance = settings.composed_tol;
  std::mt19937_64 rng(settings.seed);
  const int M = std::max({f.required_depth(), chain.memory(), f.grammar().order(), 1});
  const std::vector<std::vector<Site>> volumes = {{0}, {0, 1}, {0, 1, 2}, {0, 2}};
  for (const auto& sites : volumes) {
    const Site l = sites.front(), m = sites.back();
    const bool interval = static_cast<Site>(sites.size()) == m - l + 1;
    for (const Word& w : windows(f.grammar(), l - M, m + M, settings.budget, settings.probes, rng)) {
      const auto interior = read(w, sites);
      const auto v = lis_to_spec(f, sites, interior, w, settings.target, settings.n_max);
      double ref;
      if (interval) {
        const Site Mc = chain.memory();
        ref = two_sided_conditional(chain, l, m, interior, w.slice(l - Mc, l - 1), w.slice(m + 1, m + Mc));
      } else {
        std::vector<double> terms;
        for (const auto& fill : enumerate_fillings(f.grammar(), w, sites))
          terms.push_back(path_weight(chain, with(w, sites, fill)));
        ref = path_weight(chain, w) / pairwise_sum(terms);
      }
      record(c, std::abs(v.value - ref), v.radius, show(w));
    }
  }
  return c;
}

Check check_spec_to_lis_oracle(const SpecFamily& s, const TransferModel& chain, const Settings& settings) {
  Check c{"spec-to-lis vs chain transitions"};
  c.tolerance = settings.composed_tol;
  std::mt19937_64 rng(settings.seed);
  const int R = std::max({s.max_reach(), chain.memory(), 1});
  const auto Mc = static_cast<std::size_t>(chain.memory());
  for (const Word& past : windows(s.grammar(), -R, -1, 64, 16, rng)) {
    for (int len = 1; len <= 2; ++len) {
      std::vector<Site> sites;
      for (Site i = 0; i < len; ++i) sites.push_back(i);
      const Word probe = concat(past, Word(0, std::vector<Symbol>(static_cast<std::size_t>(len), 0)));
      for (const auto& word : enumerate_fillings(s.grammar(), probe, sites)) {
        const auto v = spec_to_lis(s, 0, len - 1, {word}, past, settings.target, settings.k_max, settings.boundary());
        const Word path = concat(past.slice(-static_cast<Site>(Mc), -1), Word(0, word));
        const double ref = path_weight(chain, path);
        record(c, std::abs(v.value - ref), v.radius, show(path));
      }
    }
  }
  return c;
}

Check check_volume_oracle(const SpecFamily& s, const std::function<double(const Word&)>& weight, int context,
                          int max_volume, double tol) {
  Check c{"volume kernels vs direct normalisation"};
  c.tolerance = tol;
  const int R = std::max(s.max_reach(), context);
  const Grammar& g = s.grammar();
  std::vector<Site> lsites;
  for (int t = 0; t < R; ++t) lsites.push_back(-R + t);
  const auto lefts = enumerate_fillings(g, Word(-R, std::vector<Symbol>(static_cast<std::size_t>(R), 0)), lsites);
  for (int L = 1; L <= max_volume; ++L) {
    std::vector<Site> sites;
    for (Site i = 0; i < L; ++i) sites.push_back(i);
    std::vector<Site> rs;
    for (int t = 0; t < R; ++t) rs.push_back(L + t);
    const auto rights = enumerate_fillings(g, Word(L, std::vector<Symbol>(static_cast<std::size_t>(R), 0)), rs);
    for (const auto& left : lefts) {
      for (const auto& right : rights) {
        const SitePatch patch{Word(-R, left), 0, L - 1, Word(L, right)};
        const auto interiors = enumerate_interior(g, patch);
        if (interiors.empty()) continue;
        const auto ref =
            finite_volume_gibbs(weight, g, patch);
        for (std::size_t k = 0; k < interiors.size(); ++k) {
          const Word window = patch.compose(interiors[k].symbols);
          const double v = gamma_volume(s, sites, interiors[k].symbols, window);
          record(c, std::abs(v - ref[k]), 0.0, show(window));
          if (L <= 4) {
            const double r = gamma_volume_by_recursion(s, sites, interiors[k].symbols, window);
            record(c, std::abs(r - ref[k]), 0.0, show(window) + " (recursion)");
          }
        }
      }
    }
  }
  return c;
}

Check check_order_independence(const SpecFamily& s, int orders, int probes, double tol, std::uint64_t seed) {
  Check c{"rho volume order independence"};
  c.tolerance = tol;
  std::mt19937_64 rng(seed);
  const int R = s.max_reach();
  for (int p = 0; p < probes; ++p) {
    const Word w = random_admissible_word(s.grammar(), -R, static_cast<std::size_t>(6 + 2 * R), rng);
    auto sites = random_subset(0, 5, 2, 5, rng);
    const double ref = rho_volume(s, sites, w);
    for (int o = 0; o < orders; ++o) {
      std::shuffle(sites.begin(), sites.end(), rng);
      const double v = rho_volume(s, sites, w);
      record(c, std::abs(v - ref) / std::max(1.0, std::abs(ref)), 0.0, show(w));
    }
  }
  return c;
}

Check check_union_identity(const SpecFamily& s, int probes, double tol, std::uint64_t seed) {
  Check c{"rho union identity"};
  c.tolerance = tol;
  std::mt19937_64 rng(seed);
  const int R = s.max_reach();
  const int gap = s.grammar().is_full_shift() ? 0 : s.grammar().order();
  int p = 0;
  while (p < probes) {
    const Word w = random_admissible_word(s.grammar(), -R, static_cast<std::size_t>(6 + 2 * R), rng);
    auto a = random_subset(0, 5, 2, 4, rng);
    std::shuffle(a.begin(), a.end(), rng);
    const std::size_t cut = std::uniform_int_distribution<std::size_t>(1, a.size() - 1)(rng);
    std::vector<Site> lam(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut)), gam(a.begin() + static_cast<std::ptrdiff_t>(cut), a.end());
    std::sort(lam.begin(), lam.end());
    std::sort(gam.begin(), gam.end());
    // with a grammar the two sets must not constrain each other directly
    bool separated = true;
    for (Site x : lam)
      for (Site y : gam)
        if (std::abs(x - y) <= gap) separated = false;
    if (!separated) continue;
    ++p;
    std::vector<Site> uni = lam;
    uni.insert(uni.end(), gam.begin(), gam.end());
    std::sort(uni.begin(), uni.end());
    std::vector<double> terms;
    for (const auto& fill : enumerate_fillings(s.grammar(), w, lam)) {
      const Word v = with(w, lam, fill);
      terms.push_back(lambda_of(s, fill) * rho_volume(s, lam, v) / rho_volume(s, gam, v));
    }
    const double lhs = rho_volume(s, uni, w) * pairwise_sum(terms);
    const double rhs = rho_volume(s, lam, w);
    record(c, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), 0.0, show(w));
  }
  return c;
}

Check check_volume_normalization(const SpecFamily& s, int probes, double tol, std::uint64_t seed) {
  Check c{"rho volume normalisation"};
  c.tolerance = tol;
  std::mt19937_64 rng(seed);
  const int R = s.max_reach();
  for (int p = 0; p < probes; ++p) {
    const Word w = random_admissible_word(s.grammar(), -R, static_cast<std::size_t>(6 + 2 * R), rng);
    const auto lam = random_subset(0, 5, 1, 5, rng);
    std::vector<double> terms;
    for (const auto& fill : enumerate_fillings(s.grammar(), w, lam))
      terms.push_back(lambda_of(s, fill) * rho_volume(s, lam, with(w, lam, fill)));
    record(c, std::abs(pairwise_sum(terms) - 1.0), 0.0, show(w));
  }
  return c;
}

Check check_singleton_absorption(const SpecFamily& s, int probes, double tol, std::uint64_t seed) {
  Check c{"singleton absorption"};
  c.tolerance = tol;
  std::mt19937_64 rng(seed);
  const int R = s.max_reach();
  for (int p = 0; p < probes; ++p) {
    const Word w = random_admissible_word(s.grammar(), -R, static_cast<std::size_t>(6 + 2 * R), rng);
    const auto vol = random_subset(0, 5, 1, 5, rng);
    const Site i = vol[std::uniform_int_distribution<std::size_t>(0, vol.size() - 1)(rng)];
    TestFunction h{{}, &rng};
    double direct = 0.0, composed = 0.0;
    const Site isite[] = {i};
    for (const auto& fill : enumerate_fillings(s.grammar(), w, vol)) {
      const Word v = with(w, vol, fill);
      const double g = lambda_of(s, fill) * rho_volume(s, vol, v);
      direct += g * h(fill);
      double inner = 0.0;
      for (const auto& a : enumerate_fillings(s.grammar(), v, isite)) {
        const Word u = with(v, isite, a);
        inner += s.gamma(i, u) * h(read(u, vol));
      }
      composed += g * inner;
    }
    record(c, std::abs(direct - composed), 0.0, show(w));
  }
  return c;
}

Check check_consistency(const SpecFamily& s, int probes, double tol, std::uint64_t seed) {
  Check c{"volume consistency"};
  c.tolerance = tol;
  std::mt19937_64 rng(seed);
  const int R = s.max_reach();
  const std::vector<Site> outer = {0, 1, 2, 3};
  for (int p = 0; p < probes; ++p) {
    const Word w = random_admissible_word(s.grammar(), -R, static_cast<std::size_t>(4 + 2 * R), rng);
    const auto inner_sites = random_subset(0, 3, 1, 3, rng);
    TestFunction h{{}, &rng};
    double direct = 0.0, composed = 0.0;
    for (const auto& fill : enumerate_fillings(s.grammar(), w, outer)) {
      const Word v = with(w, outer, fill);
      const double g = gamma_volume(s, outer, fill, v);
      direct += g * h(fill);
      double inner = 0.0;
      for (const auto& t : enumerate_fillings(s.grammar(), v, inner_sites)) {
        const Word u = with(v, inner_sites, t);
        inner += gamma_volume(s, inner_sites, t, u) * h(read(u, outer));
      }
      composed += g * inner;
    }
    record(c, std::abs(direct - composed), 0.0, show(w));
  }
  return c;
}

Check check_order_consistency(const SpecFamily& s, int probes, std::uint64_t seed) {
  Check c{"pair order consistency"};
  std::mt19937_64 rng(seed);
  const int R = s.max_reach();
  for (int p = 0; p < probes; ++p) {
    const Word w = random_admissible_word(s.grammar(), -R, static_cast<std::size_t>(6 + 2 * R), rng);
    const auto ij = random_subset(0, 5, 2, 2, rng);
    ++c.probes;
    try {
      (void)rho_pair(s, ij[0], ij[1], w);
      (void)rho_pair(s, ij[1], ij[0], w);
    } catch (const OrderConsistencyViolated& e) {
      c.pass = false;
      c.detail = e.what();
      return c;
    }
  }
  return c;
}

Check check_factorization(const LisFamily& f, int probes, double tol, std::uint64_t seed) {
  Check c{"interval factorisation"};
  c.tolerance = tol;
  std::mt19937_64 rng(seed);
  const int D = f.required_depth() > 0 ? f.required_depth() : 6;
  for (int p = 0; p < probes; ++p) {
    const Word w = random_admissible_word(f.grammar(), -D, static_cast<std::size_t>(D + 6), rng);
    const auto cut = random_subset(0, 5, 2, 2, rng);
    const Site l = cut[0], m = cut[1];
    const Site n = std::uniform_int_distribution<Site>(l, m - 1)(rng);
    const Word past = w.slice(-D, l - 1);
    const auto whole = lis_interval(f, l, m, w.view(l, m), past);
    const auto head = lis_interval(f, l, n, w.view(l, n), past);
    const auto tail = lis_interval(f, n + 1, m, w.view(n + 1, m), w.slice(-D, n));
    record(c, std::abs(whole.value - head.value * tail.value), 0.0, show(w));

    // kernel form against a random test function on [l, m]
    std::vector<Site> all, first, second;
    for (Site i = l; i <= m; ++i) {
      all.push_back(i);
      if (i <= n) first.push_back(i);
      else second.push_back(i);
    }
    TestFunction h{{}, &rng};
    const Word blank = w.slice(-D, m);
    double direct = 0.0, composed = 0.0;
    for (const auto& fill : enumerate_fillings(f.grammar(), blank.slice(-D, m), all))
      direct += lis_interval(f, l, m, fill, past).value * h(fill);
    for (const auto& u : enumerate_fillings(f.grammar(), blank.slice(-D, n), first)) {
      const Word pu = concat(past, Word(l, u));
      double inner = 0.0;
      for (const auto& v : enumerate_fillings(f.grammar(), concat(pu, Word(n + 1, std::vector<Symbol>(second.size(), 0))), second)) {
        std::vector<Symbol> uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        inner += lis_interval(f, n + 1, m, v, pu).value * h(uv);
      }
      composed += lis_interval(f, l, n, u, past).value * inner;
    }
    record(c, std::abs(direct - composed), 0.0, show(w) + " (kernel)");
  }
  return c;
}

Check check_normalization(const LisFamily& f, std::size_t probes, double tol, std::uint64_t seed) {
  Check c{"lis singleton normalisation"};
  c.tolerance = tol;
  std::mt19937_64 rng(seed);
  for (Site i : f.probe_sites()) {
    const auto r = check_singleton_normalization(f, i, probes, rng, tol);
    c.probes += r.probes;
    c.worst = std::max(c.worst, r.max_defect);
    if (!r.pass && c.pass) {
      c.pass = false;
      c.detail = "site " + std::to_string(i) + " at " + show(r.worst);
    }
  }
  return c;
}

Check check_normalization(const SpecFamily& s, std::size_t probes, double tol, std::uint64_t seed) {
  Check c{"spec singleton normalisation"};
  c.tolerance = tol;
  std::mt19937_64 rng(seed);
  for (Site i : s.probe_sites()) {
    const auto r = check_singleton_normalization(s, i, probes, rng, tol);
    c.probes += r.probes;
    c.worst = std::max(c.worst, r.max_defect);
    if (!r.pass && c.pass) {
      c.pass = false;
      c.detail = "site " + std::to_string(i) + " at " + show(r.worst);
    }
  }
  return c;
}

Check check_ratio_increments(const LisFamily& f, int probes, double tol, std::uint64_t seed) {
  Check c{"ratio increments vs oscillation"};
  c.tolerance = tol;
  if (!f.grammar().is_full_shift()) {
    // single-site flips may leave the grammar while block changes do not
    c.detail = "not applicable under a grammar";
    return c;
  }
  std::mt19937_64 rng(seed);
  const int D = f.required_depth() > 0 ? f.required_depth() : 4;
  const int steps = 8;
  for (int p = 0; p < probes; ++p) {
    const auto lam = random_subset(0, 2, 1, 2, rng);
    const Site l = lam.front(), m = lam.back();
    const Word w = random_admissible_word(f.grammar(), l - D, static_cast<std::size_t>(m - l + 1 + D + steps), rng);
    const auto interior = read(w, lam);
    double prev = f_ratio(f, lam, m, interior, w);
    for (Site n = m; n < m + steps; ++n) {
      const double next = f_ratio(f, lam, n + 1, interior, w);
      const double bound = oscillation(f, n + 1, lam, w.slice(w.start, n + 1)).ratio_upper();
      record(c, std::abs(next - prev), bound, show(w) + " n=" + std::to_string(n));
      prev = next;
    }
  }
  return c;
}

Check check_radius_monotone(const LisFamily& f, int probes, std::uint64_t seed) {
  Check c{"certified radius monotone"};
  c.tolerance = 1e-12;
  if (!f.profile().summable()) {
    c.detail = "profile not summable";
    return c;
  }
  std::mt19937_64 rng(seed);
  const int D = f.required_depth() > 0 ? f.required_depth() : 4;
  const int steps = 12;
  for (int p = 0; p < probes; ++p) {
    const auto lam = random_subset(0, 2, 1, 2, rng);
    const Site l = lam.front(), m = lam.back();
    const Word w = random_admissible_word(f.grammar(), l - D, static_cast<std::size_t>(m - l + 1 + D + steps), rng);
    const auto interior = read(w, lam);
    std::vector<double> F, r;
    for (Site n = m; n <= m + steps; ++n) {
      F.push_back(f_ratio(f, lam, n, interior, w));
      r.push_back(future_tail(f, lam, n));
    }
    for (std::size_t a = 0; a < F.size(); ++a) {
      if (a > 0) record(c, r[a] - r[a - 1], 0.0, show(w) + " radius");
      for (std::size_t b = a + 1; b < F.size(); ++b)
        record(c, std::abs(F[b] - F[a]), r[a] + r[b], show(w));
    }
  }
  return c;
}

Check check_grammar_lis(const LisFamily& f, std::uint64_t seed) {
  Check c{"lis respects the grammar"};
  const Grammar& g = f.grammar();
  if (g.is_full_shift()) {
    c.detail = "full shift";
    return c;
  }
  const std::size_t q = g.alphabet_size();
  const int D = std::max(f.required_depth(), g.order() + 1);
  const std::size_t len = static_cast<std::size_t>(D + 1);
  std::mt19937_64 rng(seed);
  for (std::size_t code = 0; code < ipow(q, len); ++code) {
    std::vector<Symbol> sym(len);
    std::size_t x = code;
    for (std::size_t t = 0; t < len; ++t, x /= q) sym[len - 1 - t] = static_cast<Symbol>(x % q);
    if (g.admissible(sym)) continue;
    const Word past(-D, std::vector<Symbol>(sym.begin(), sym.end() - 1));
    if (g.admissible(past.symbols)) {
      record(c, f.f(0, past.symbols, sym.back()), 0.0, show(Word(-D, sym)));
    }
    // an inadmissible word on [0, 2] after an admissible past
    const Word pre = random_admissible_word(g, -D, static_cast<std::size_t>(D), rng);
    std::vector<Symbol> three(sym.end() - std::min<std::ptrdiff_t>(3, static_cast<std::ptrdiff_t>(len)), sym.end());
    if (!g.admissible(three)) {
      const auto v = lis_interval(f, 0, static_cast<Site>(three.size()) - 1, three, pre);
      record(c, v.value, 0.0, show(Word(0, three)) + " interval");
      const Word w = extend_right(g, concat(pre, Word(0, std::vector<Symbol>())), three.size() + 3, rng);
      std::vector<Site> sites;
      for (std::size_t t = 0; t < three.size(); ++t) sites.push_back(static_cast<Site>(t));
      if (f.profile().summable()) {
        const double F = f_ratio(f, sites, static_cast<Site>(three.size()) + 2, three, w);
        record(c, F, 0.0, show(Word(0, three)) + " ratio");
      }
    }
  }
  return c;
}

Check check_grammar_spec(const SpecFamily& s, const Settings& settings, std::uint64_t seed) {
  Check c{"spec respects the grammar"};
  const Grammar& g = s.grammar();
  if (g.is_full_shift()) {
    c.detail = "full shift";
    return c;
  }
  std::mt19937_64 rng(seed);
  const int R = std::max(s.max_reach(), 1);
  const std::vector<Site> sites = {0, 1, 2};
  const std::size_t q = g.alphabet_size();
  for (int p = 0; p < 8; ++p) {
    const Word w = random_admissible_word(g, -R, static_cast<std::size_t>(3 + 2 * R), rng);
    const Word past = w.slice(-R, -1);
    for (std::size_t code = 0; code < ipow(q, 3); ++code) {
      std::vector<Symbol> sym = {static_cast<Symbol>(code / (q * q)), static_cast<Symbol>(code / q % q),
                                 static_cast<Symbol>(code % q)};
      const Word v = with(w, sites, sym);
      if (g.admissible(v.symbols)) continue;
      record(c, gamma_volume(s, sites, sym, v), 0.0, show(v) + " volume");
      record(c, rho_volume(s, sites, v), 0.0, show(v) + " rho");
      if (!g.admissible(sym)) {
        const auto cv = spec_to_lis(s, 0, 2, {sym}, past, settings.target, settings.k_max, settings.boundary());
        record(c, cv.value, 0.0, show(v) + " spec-to-lis");
      }
    }
  }
  return c;
}

Check check_enumeration_counts(const Grammar& g, int max_length) {
  Check c{"admissible word counts"};
  const std::size_t q = g.alphabet_size();
  for (int n = 1; n <= max_length; ++n) {
    const auto len = static_cast<std::size_t>(n);
    const auto words = enumerate_interior(g, SitePatch{Word(0, {}), 0, n - 1, Word(n, {})});
    std::size_t brute = 0;
    for (std::size_t code = 0; code < ipow(q, len); ++code) {
      std::vector<Symbol> sym(len);
      std::size_t x = code;
      for (std::size_t t = 0; t < len; ++t, x /= q) sym[len - 1 - t] = static_cast<Symbol>(x % q);
      if (g.admissible(sym)) ++brute;
    }
    record(c, std::abs(static_cast<double>(words.size()) - static_cast<double>(brute)), 0.0,
           "length " + std::to_string(n));
  }
  return c;
}

Check check_spread_monotone(const SpecFamily& s, int depth, const BoundarySet& set) {
  Check c{"boundary spread monotone"};
  std::vector<std::pair<Site, Site>> volumes;
  for (Site d = 0; d <= depth; ++d) volumes.emplace_back(-d, d);
  const Site ev[] = {0};
  for (Symbol a = 0; a < static_cast<Symbol>(s.alphabet().size()); ++a) {
    const auto trace = spread_trace(s, ev, {{a}}, volumes, set);
    ++c.probes;
    c.worst = std::max(c.worst, trace.back().spread());
    if (!envelopes_monotone(trace) && c.pass) {
      c.pass = false;
      c.detail = "symbol " + s.alphabet().label(a) + " envelope not monotone";
    }
  }
  return c;
}

Check check_global_kernel(const SpecFamily& s, const Settings& settings) {
  Check c{"global kernel vs spec-to-lis"};
  c.tolerance = settings.composed_tol;
  std::mt19937_64 rng(settings.seed);
  const int R = std::max(s.max_reach(), 1);
  const Site ev[] = {0};
  for (const Word& past : windows(s.grammar(), -R, -1, 16, 8, rng)) {
    for (const auto& a : enumerate_fillings(s.grammar(), concat(past, Word(0, {0})), ev)) {
      const auto g = global_kernel(s, Region{Region::Kind::RightHalfLine, 0, {}}, ev, {a}, past, settings.k_max,
                                   settings.target, settings.boundary());
      const auto v = spec_to_lis(s, 0, 0, {a}, past, settings.target, settings.k_max, settings.boundary());
      record(c, std::abs(g.value - v.value), g.radius + v.radius, show(past));
    }
  }
  return c;
}

Check check_invariant_measure(const TransferModel& chain) {
  Check c{"invariant measure residual"};
  c.tolerance = 1e-12;
  const auto pi = invariant_measure(chain);
  std::vector<double> next(pi.size(), 0.0);
  for (std::size_t s = 0; s < pi.size(); ++s)
    for (Symbol a = 0; a < static_cast<Symbol>(chain.alphabet_size()); ++a) {
      const long nx = chain.next(s, a);
      if (nx >= 0) next[static_cast<std::size_t>(nx)] += pi[s] * chain.weight(s, a);
    }
  double res = 0.0;
  for (std::size_t s = 0; s < pi.size(); ++s) res += std::abs(next[s] - pi[s]);
  record(c, res, 0.0, "pi P - pi");
  record(c, std::abs(std::accumulate(pi.begin(), pi.end(), 0.0) - 1.0), 0.0, "mass");
  return c;
}

}  // namespace chainspec
