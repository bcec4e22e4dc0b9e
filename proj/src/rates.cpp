#include "chainspec/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "chainspec/errors.hpp"

namespace chainspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Windows {
  std::vector<std::vector<Symbol>> words;
  bool sampled = false;
};

// Admissible words on [start, start + length), exhaustive within budget.
Windows windows(const Grammar& g, Site start, std::size_t length, const BoundarySet& set) {
  Windows out;
  if (length == 0) {
    out.words.emplace_back();
    return out;
  }
  const std::size_t q = g.alphabet_size();
  if (std::pow(static_cast<double>(q), static_cast<double>(length)) <= static_cast<double>(set.budget)) {
    std::vector<Site> sites;
    for (std::size_t t = 0; t < length; ++t) sites.push_back(start + static_cast<Site>(t));
    out.words = enumerate_fillings(g, Word(start, std::vector<Symbol>(length, 0)), sites);
    return out;
  }
  out.sampled = true;
  for (Symbol a = 0; a < static_cast<Symbol>(q); ++a) {
    std::vector<Symbol> w(length, a);
    if (g.admissible(w)) out.words.push_back(std::move(w));
  }
  std::mt19937_64 rng(set.seed);
  for (std::size_t p = 0; p < set.probes; ++p) out.words.push_back(random_admissible_word(g, start, length, rng).symbols);
  return out;
}

int log_budget(std::size_t q, std::size_t budget) {
  int L = 0;
  double n = 1.0;
  while (n * static_cast<double>(q) <= static_cast<double>(budget) && L < 24) {
    n *= static_cast<double>(q);
    ++L;
  }
  return std::max(L, 1);
}

double eval_error(const LisFamily& f, Site i, const Word& w) {
  return f.memory(i).bound(static_cast<int>(i - w.start)) + f.eval_radius();
}

double tv(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) s += std::fabs(x[a] - y[a]);
  return 0.5 * s;
}

std::vector<double> lis_row(const LisFamily& f, Site i, std::span<const Symbol> past) {
  std::vector<double> row(f.alphabet().size());
  for (std::size_t a = 0; a < row.size(); ++a) row[a] = f.f(i, past, static_cast<Symbol>(a));
  return row;
}

std::vector<double> spec_row(const SpecFamily& s, Site i, Word w) {
  std::vector<double> row(s.alphabet().size());
  for (std::size_t a = 0; a < row.size(); ++a) {
    w.at(i) = static_cast<Symbol>(a);
    row[a] = s.gamma(i, w);
  }
  return row;
}

bool some_center_admissible(const Grammar& g, Word w, Site i) {
  for (Symbol a = 0; a < static_cast<Symbol>(g.alphabet_size()); ++a) {
    w.at(i) = a;
    if (g.admissible(w.symbols)) return true;
  }
  return false;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

std::string trajectory(const std::vector<double>& v, std::size_t show = 8) {
  std::ostringstream o;
  o.precision(4);
  o << "[";
  for (std::size_t i = 0; i < v.size() && i < show; ++i) o << (i ? " " : "") << v[i];
  if (v.size() > show) o << " ... " << v.back();
  o << "]";
  return o.str();
}

CertifiedValue upper_as_certified(double value, double upper, int n, bool sampled) {
  return {value, upper == kInf ? kInf : std::max(0.0, upper - value), n, sampled};
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Inapplicable: return "inapplicable";
  }
  return "?";
}

int default_depth(const LisFamily& f, std::size_t budget) {
  const int mem = f.profile().memory();
  if (mem >= 0) return mem;
  return std::min(12, log_budget(f.alphabet().size(), budget));
}

// ------------------------------------------------------------- variations

PastStats past_stats(const LisFamily& f, Site i, int k, int depth, const BoundarySet& set) {
  const Grammar& g = f.grammar();
  const std::size_t q = f.alphabet().size();
  const int M = f.memory(i).memory();
  const int D = std::max({depth, k, M, 0});
  const Site start = i - D;

  std::vector<std::vector<Symbol>> pasts;
  bool sampled = false;
  if (std::pow(static_cast<double>(q), D) <= static_cast<double>(set.budget)) {
    pasts = windows(g, start, static_cast<std::size_t>(D), set).words;
  } else {
    // suffixes of length k, each with several left extensions
    sampled = true;
    Windows suff = windows(g, i - k, static_cast<std::size_t>(k), set);
    if (suff.words.size() > set.probes) suff.words.resize(set.probes);
    std::mt19937_64 rng(set.seed);
    const std::size_t per = set.probes / 4 + 1;
    for (const auto& s : suff.words)
      for (std::size_t r = 0; r < per; ++r)
        pasts.push_back(extend_left(g, Word(i - k, s), static_cast<std::size_t>(D - k), rng).symbols);
  }

  std::map<std::vector<Symbol>, std::vector<std::vector<double>>> groups;
  for (const auto& p : pasts) {
    std::vector<Symbol> key(p.end() - k, p.end());
    groups[key].push_back(lis_row(f, i, p));
  }

  const auto mask_admissible = [&](const std::vector<Symbol>& suffix, Symbol a) {
    std::vector<Symbol> t(suffix.end() - std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(suffix.size()), g.order()),
                          suffix.end());
    t.push_back(a);
    return g.admissible(t);
  };

  double var = 0.0, log_var = 0.0, max_tv = 0.0;
  std::size_t pair_work = 0;
  for (const auto& [key, rows] : groups) pair_work += rows.size() * rows.size();
  const bool pairwise = q > 2 && pair_work <= (1u << 22);
  for (const auto& [key, rows] : groups) {
    for (Symbol a = 0; a < static_cast<Symbol>(q); ++a) {
      // with k >= order the suffix decides admissibility of a
      if (k >= g.order() && !mask_admissible(key, a)) continue;
      double lo = kInf, hi = -kInf;
      for (const auto& r : rows) {
        const double v = r[static_cast<std::size_t>(a)];
        if (k < g.order() && v == 0.0) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo > hi) continue;
      var = std::max(var, hi - lo);
      if (hi > 0.0) log_var = std::max(log_var, lo > 0.0 ? std::log(hi) - std::log(lo) : kInf);
    }
    if (pairwise)
      for (std::size_t x = 0; x < rows.size(); ++x)
        for (std::size_t y = x + 1; y < rows.size(); ++y) max_tv = std::max(max_tv, tv(rows[x], rows[y]));
  }
  if (q == 2) max_tv = var;
  else if (!pairwise) max_tv = std::min(1.0, 0.5 * static_cast<double>(q) * var);

  const double e = f.memory(i).bound(D) + f.eval_radius();
  const double c = f.c_min();
  PastStats out;
  out.var = {var, 2.0 * e, D, sampled};
  out.log_var = {log_var, e == 0.0 ? 0.0 : (c > 0.0 ? 2.0 * e / c : kInf), D, sampled};
  out.overlap = {1.0 - max_tv, static_cast<double>(q) * e, D, sampled};
  return out;
}

CertifiedValue var_k(const LisFamily& f, Site i, int k, int depth, const BoundarySet& set) {
  return past_stats(f, i, k, depth, set).var;
}

// ------------------------------------------------------------- Dobrushin

double DobrushinRow::sum() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.second.value;
  return s;
}

double DobrushinRow::upper() const {
  double s = tail;
  for (const auto& e : entries) s += e.second.value + e.second.radius;
  return s;
}

double DobrushinRow::lower() const {
  double s = 0.0;
  for (const auto& e : entries) s += std::max(0.0, e.second.value - e.second.radius);
  return s;
}

const DobrushinRow& DobrushinMatrix::row(Site i) const {
  for (const auto& r : rows)
    if (r.site == i) return r;
  throw Unsupported("no Dobrushin row computed for site " + std::to_string(i));
}

CertifiedValue DobrushinMatrix::entry(Site i, Site j) const {
  const DobrushinRow& r = row(i);
  for (const auto& e : r.entries)
    if (e.first == j) return e.second;
  return {0.0, r.tail, 0, r.sampled};
}

double DobrushinMatrix::max_row_upper() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.upper());
  return m;
}

DobrushinMatrix dobrushin_matrix(const LisFamily& f, std::span<const Site> sites, int depth, const BoundarySet& set) {
  const Grammar& g = f.grammar();
  const std::size_t q = f.alphabet().size();
  DobrushinMatrix out;
  for (Site i : sites) {
    const int M = f.memory(i).memory();
    const int D = std::max({depth, M, 1});
    const Windows ws = windows(g, i - D, static_cast<std::size_t>(D), set);
    std::vector<double> c(static_cast<std::size_t>(D) + 1, 0.0);
    for (const auto& p : ws.words) {
      const auto base = lis_row(f, i, p);
      std::vector<Symbol> flip = p;
      for (int d = 1; d <= D; ++d) {
        const std::size_t pos = static_cast<std::size_t>(D - d);
        for (Symbol b = 0; b < static_cast<Symbol>(q); ++b) {
          if (b == p[pos]) continue;
          flip[pos] = b;
          if (g.admissible(flip)) c[static_cast<std::size_t>(d)] = std::max(c[static_cast<std::size_t>(d)], tv(base, lis_row(f, i, flip)));
        }
        flip[pos] = p[pos];
      }
    }
    DobrushinRow row;
    row.site = i;
    row.sampled = ws.sampled;
    const double e = f.memory(i).bound(D) + f.eval_radius();
    for (int d = 1; d <= D; ++d)
      row.entries.push_back({i - d, {c[static_cast<std::size_t>(d)], static_cast<double>(q) * e, D, ws.sampled}});
    row.tail = 0.5 * static_cast<double>(q) * f.memory(i).tail_sum(D);
    out.rows.push_back(std::move(row));
  }
  return out;
}

DobrushinMatrix dobrushin_matrix(const SpecFamily& s, std::span<const Site> sites, const BoundarySet& set) {
  const Grammar& g = s.grammar();
  const std::size_t q = s.alphabet().size();
  DobrushinMatrix out;
  for (Site i : sites) {
    const int R = std::max(1, s.reach(i));
    const Site lo = i - R;
    const Windows ws = windows(g, lo, static_cast<std::size_t>(2 * R + 1), set);
    std::vector<double> c(static_cast<std::size_t>(2 * R + 1), 0.0);
    for (const auto& sym : ws.words) {
      const Word w(lo, sym);
      const auto base = spec_row(s, i, w);
      Word flip = w;
      for (Site j = lo; j <= i + R; ++j) {
        if (j == i) continue;
        for (Symbol b = 0; b < static_cast<Symbol>(q); ++b) {
          if (b == w.at(j)) continue;
          flip.at(j) = b;
          if (some_center_admissible(g, flip, i)) {
            auto& slot = c[static_cast<std::size_t>(j - lo)];
            slot = std::max(slot, tv(base, spec_row(s, i, flip)));
          }
        }
        flip.at(j) = w.at(j);
      }
    }
    DobrushinRow row;
    row.site = i;
    row.sampled = ws.sampled;
    for (Site j = lo; j <= i + R; ++j)
      if (j != i)
        row.entries.push_back({j, {c[static_cast<std::size_t>(j - lo)], static_cast<double>(q) * s.eval_radius(), R, ws.sampled}});
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ------------------------------------------------------------ oscillation

double OscillationPair::ratio_upper() const {
  const double lo = c.value - c.radius;
  if (!(lo > 0.0)) return kInf;
  return (delta.value + delta.radius) / lo;
}

OscillationPair oscillation(const LisFamily& f, Site k, std::span<const Site> lambda, const Word& w) {
  const Grammar& g = f.grammar();
  if (!w.covers(k)) throw WindowTooShort("window must contain site " + std::to_string(k));
  for (Site j : lambda)
    if (!w.covers(j) || j > k) throw WindowTooShort("window must cover the set inside the past of k");
  const double e = eval_error(f, k, w);
  double c = kInf;
  Word tmp = w;
  for (const auto& fill : enumerate_fillings(g, w, lambda)) {
    for (std::size_t t = 0; t < lambda.size(); ++t) tmp.at(lambda[t]) = fill[t];
    c = std::min(c, f.f(k, tmp));
  }
  if (c == kInf) c = 0.0;
  const double base = f.f(k, w);
  double delta = 0.0;
  for (Site j : lambda) {
    double sup = 0.0;
    tmp = w;
    for (Symbol b = 0; b < static_cast<Symbol>(f.alphabet().size()); ++b) {
      if (b == w.at(j)) continue;
      tmp.at(j) = b;
      if (g.admissible(tmp.symbols)) sup = std::max(sup, std::fabs(base - f.f(k, tmp)));
    }
    delta += sup;
  }
  const int n = static_cast<int>(k - w.start);
  return {{c, e, n, false}, {delta, 2.0 * e * static_cast<double>(lambda.size()), n, false}};
}

OscillationPair oscillation(const SpecFamily& s, Site k, Site j, const Word& w) {
  const Grammar& g = s.grammar();
  double c = kInf, delta = 0.0;
  const double base = s.gamma(k, w);
  Word tmp = w;
  for (Symbol b = 0; b < static_cast<Symbol>(s.alphabet().size()); ++b) {
    tmp.at(j) = b;
    if (!g.admissible(tmp.symbols)) continue;
    const double v = s.gamma(k, tmp);
    c = std::min(c, v);
    delta = std::max(delta, std::fabs(base - v));
  }
  if (c == kInf) c = 0.0;
  const double e = s.eval_radius();
  return {{c, e, 0, false}, {delta, 2.0 * e, 0, false}};
}

CertifiedValue sup_ratio(const LisFamily& f, Site k, std::span<const Site> lambda, int depth,
                         const BoundarySet& set) {
  Site start = k - std::max(depth, std::max(0, f.memory(k).memory()));
  for (Site j : lambda) start = std::min(start, j);
  const Windows ws = windows(f.grammar(), start, static_cast<std::size_t>(k - start + 1), set);
  double value = 0.0, upper = 0.0;
  for (const auto& sym : ws.words) {
    const auto p = oscillation(f, k, lambda, Word(start, sym));
    if (p.c.value > 0.0) value = std::max(value, p.delta.value / p.c.value);
    upper = std::max(upper, p.delta.value + p.delta.radius == 0.0 ? 0.0 : p.ratio_upper());
  }
  return upper_as_certified(value, upper, static_cast<int>(k - start), ws.sampled);
}

CertifiedValue sup_ratio(const SpecFamily& s, Site k, Site j, const BoundarySet& set) {
  const int R = s.reach(k);
  const Site lo = std::min(k - R, j), hi = std::max(k + R, j);
  const Windows ws = windows(s.grammar(), lo, static_cast<std::size_t>(hi - lo + 1), set);
  double value = 0.0, upper = 0.0;
  for (const auto& sym : ws.words) {
    const auto p = oscillation(s, k, j, Word(lo, sym));
    if (p.c.value > 0.0) value = std::max(value, p.delta.value / p.c.value);
    upper = std::max(upper, p.delta.value + p.delta.radius == 0.0 ? 0.0 : p.ratio_upper());
  }
  return upper_as_certified(value, upper, static_cast<int>(hi - lo), ws.sampled);
}

// ------------------------------------------------------- GF / EGF series

namespace {

// Window start for sup_ratio at site k covering `lo`, or nothing when the
// window would exceed the exhaustive budget.
std::optional<int> measurable_depth(const LisFamily& f, Site k, Site lo, const BoundarySet& set) {
  const int M = f.memory(k).memory();
  const int L = log_budget(f.alphabet().size(), set.budget);
  if (M >= 0) {
    const Site start = std::min(lo, k - M);
    if (k - start + 1 > L) return std::nullopt;
    return M;
  }
  // tail profile: use the longest window the budget allows
  const int depth = L - 1;
  if (k - depth > lo) return std::nullopt;
  return depth;
}

}  // namespace

SeriesCertificate gf_certificate(const LisFamily& f, std::span<const Site> lambda, const Settings& settings) {
  SeriesCertificate out;
  if (lambda.empty()) {
    out.verdict = Verdict::Holds;
    return out;
  }
  const BoundarySet set = settings.boundary();
  const Site l = lambda.front(), m = lambda.back();
  const double cmin = f.c_min();
  if (!(cmin > 0.0)) {
    out.verdict = Verdict::Inconclusive;
    out.detail = "non-nullness not certified (c_min lower bound is 0)";
    return out;
  }
  const int M = f.profile().memory();
  Site k = m;
  double sum = 0.0;
  for (; k <= m + settings.k_max; ++k) {
    if (M >= 0 && k - M > m) break;  // f_k no longer sees Lambda
    const auto depth = measurable_depth(f, k, l, set);
    if (!depth) break;
    const auto r = sup_ratio(f, k, lambda, *depth, set);
    out.sampled = out.sampled || r.sampled;
    out.terms.push_back(r.upper());
    sum += r.upper();
    out.partial.push_back(sum);
  }
  double tail = 0.0;
  if (!(M >= 0 && k - M > m))
    for (Site j : lambda) tail += f.profile().tail_sum(static_cast<int>(k - 1 - j)) / cmin;
  out.tail = tail;
  out.bound = sum + tail;
  if (std::isfinite(out.bound)) {
    out.verdict = Verdict::Holds;
    out.detail = "sum of eps_k over k >= " + std::to_string(m) + " is at most " + fmt(out.bound) + " (measured " +
                 std::to_string(out.terms.size()) + " terms, tail " + fmt(tail) + ")";
  } else {
    out.verdict = Verdict::Inconclusive;
    out.detail = "profile " + f.profile().describe() + " gives no finite tail; partial sums " + trajectory(out.partial);
  }
  return out;
}

SeriesCertificate egf_certificate(const LisFamily& f, Site j, const Settings& settings) {
  SeriesCertificate out;
  const BoundarySet set = settings.boundary();
  const double cmin = f.c_min();
  if (!(cmin > 0.0)) {
    out.verdict = Verdict::Inconclusive;
    out.detail = "non-nullness not certified";
    return out;
  }
  const TailProfile& p = f.profile();
  const int M = p.memory();
  const Site lam[1] = {j};
  double sup = 0.0;
  for (Site k = j; k <= j + settings.k_max; ++k) {
    if (M >= 0 && k - M > j) break;
    const auto depth = measurable_depth(f, k, j, set);
    if (!depth) break;
    const auto r = sup_ratio(f, k, lam, *depth, set);
    out.sampled = out.sampled || r.sampled;
    out.terms.push_back(r.upper());
    sup = std::max(sup, r.upper());
  }
  if (M >= 0) {
    out.verdict = Verdict::Holds;
    out.a = kInf;
    out.bound = sup;
    out.detail = "ratios vanish beyond distance " + std::to_string(M) + ": any a > 1";
  } else if (p.form() == TailProfile::Form::Geometric) {
    out.a = p.a();
    double weighted = 0.0;
    for (std::size_t t = 0; t < out.terms.size(); ++t)
      weighted = std::max(weighted, std::pow(out.a, static_cast<double>(t)) * out.terms[t]);
    out.bound = std::max(weighted, p.c() * p.a() / cmin);
    out.verdict = Verdict::Holds;
    out.detail = "a = " + fmt(out.a) + " from the geometric profile; a^{k-j} ratio_k <= " + fmt(out.bound);
  } else {
    out.verdict = Verdict::Inconclusive;
    out.detail = "profile " + p.describe() + " is not geometric; measured ratios " + trajectory(out.terms);
  }
  return out;
}

SeriesCertificate egf_certificate(const SpecFamily& s, Site j, const Settings& settings) {
  SeriesCertificate out;
  const int R = s.reach(j);
  double sup = 0.0;
  for (Site k = j - R; k <= j + R; ++k) {
    const auto r = sup_ratio(s, k, j, settings.boundary());
    out.sampled = out.sampled || r.sampled;
    out.terms.push_back(r.upper());
    sup = std::max(sup, r.upper());
  }
  out.verdict = std::isfinite(sup) ? Verdict::Holds : Verdict::Inconclusive;
  out.a = kInf;
  out.bound = sup;
  out.detail = std::isfinite(sup) ? "range " + std::to_string(R) + ": ratios vanish beyond it, any a > 1"
                                  : "c_j(gamma_k) not certified positive";
  return out;
}

// ------------------------------------------------------------ non-nullness

NonNullReport non_null_report(const LisFamily& f, int max_length, const BoundarySet& set) {
  NonNullReport out;
  const Grammar& g = f.grammar();
  const std::size_t q = f.alphabet().size();
  const int D = std::min(default_depth(f, set.budget), 8);
  double lo = kInf, rad = 0.0;
  bool sampled = false;
  for (Site i : f.probe_sites()) {
    const int Di = std::max(D, std::max(0, f.memory(i).memory()));
    const Windows ws = windows(g, i - Di, static_cast<std::size_t>(Di) + 1, set);
    sampled = sampled || ws.sampled;
    for (const auto& w : ws.words) {
      const double v = f.f(i, std::span<const Symbol>(w).first(static_cast<std::size_t>(Di)), w.back());
      if (v < lo) {
        lo = v;
        out.detail = "min at site " + std::to_string(i) + " window " + f.alphabet().format_word(w);
      }
    }
    rad = std::max(rad, f.memory(i).bound(Di) + f.eval_radius());
  }
  out.min_value = {lo, rad, D, sampled};
  out.non_null = lo - rad > 0.0;

  // weak non-nullness: some sigma on each interval with f > 0 after every past
  out.weakly_non_null = true;
  out.checked_length = max_length;
  for (Site i : f.probe_sites()) {
    for (int L = 1; L <= max_length && out.weakly_non_null; ++L) {
      const int Di = std::max(D, std::max(0, f.required_depth()));
      const Windows sig = windows(g, i, static_cast<std::size_t>(L), set);
      const Windows pasts = windows(g, i - Di, static_cast<std::size_t>(Di), set);
      bool found = false;
      for (const auto& s : sig.words) {
        bool ok = true;
        for (const auto& p : pasts.words) {
          std::vector<Symbol> all = p;
          all.insert(all.end(), s.begin(), s.end());
          if (!g.admissible(all)) continue;
          const auto v = lis_interval(f, i, i + L - 1, s, Word(i - Di, p));
          if (!(v.lower() > 0.0)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          found = true;
          break;
        }
      }
      (void)q;
      if (!found) {
        out.weakly_non_null = false;
        out.detail += "; no interval word of length " + std::to_string(L) + " at site " + std::to_string(i) +
                      " is certified positive after every past";
      }
    }
  }
  return out;
}

// ------------------------------------------------------ boundary uniformity

namespace {

// f_[n,m](A | xi) for every past xi of depth Dp, with A on [l, m].
std::vector<double> interval_masses(const LisFamily& f, Site n, Site l, std::span<const Symbol> A, int Dp,
                                    const std::vector<std::vector<Symbol>>& pasts) {
  const Grammar& g = f.grammar();
  const std::size_t q = f.alphabet().size();
  const int M = f.profile().memory();
  const std::size_t key = M >= 0 ? static_cast<std::size_t>(std::max(M, g.order())) : std::size_t(-1);
  const Site m = l + static_cast<Site>(A.size()) - 1;
  std::vector<double> out;
  out.reserve(pasts.size());
  for (const auto& xi : pasts) {
    std::map<std::vector<Symbol>, double> cur{{xi, 1.0}};
    (void)Dp;
    for (Site t = n; t <= m; ++t) {
      std::map<std::vector<Symbol>, double> next;
      for (const auto& [ctx, mass] : cur) {
        for (Symbol a = 0; a < static_cast<Symbol>(q); ++a) {
          if (t >= l && a != A[static_cast<std::size_t>(t - l)]) continue;
          const double p = f.f(t, ctx, a);
          if (p == 0.0) continue;
          std::vector<Symbol> nc = ctx;
          nc.push_back(a);
          if (key != std::size_t(-1) && nc.size() > key) nc.erase(nc.begin(), nc.end() - static_cast<std::ptrdiff_t>(key));
          next[nc] += mass * p;
        }
      }
      cur = std::move(next);
    }
    double s = 0.0;
    for (const auto& kv : cur) s += kv.second;
    out.push_back(s);
  }
  return out;
}

}  // namespace

UniformityReport one_sided_uniformity(const LisFamily& f, int max_cylinder, int max_volume, const BoundarySet& set) {
  UniformityReport out;
  out.K = kInf;
  const Grammar& g = f.grammar();
  const std::size_t q = f.alphabet().size();
  const int M = f.profile().memory();
  int Dp = M >= 0 ? std::max(M, g.order()) : std::min(default_depth(f, set.budget), 6);
  if (M < 0) max_volume = std::min(max_volume, 8);
  for (Site l : f.probe_sites()) {
    for (int L = 1; L <= max_cylinder; ++L) {
      const Windows cyl = windows(g, l, static_cast<std::size_t>(L), set);
      out.sampled = out.sampled || cyl.sampled;
      for (const auto& A : cyl.words) {
        ++out.cylinders;
        double best = 0.0;
        for (Site n = l; l - n + L <= max_volume; --n) {
          const Windows pasts = windows(g, n - Dp, static_cast<std::size_t>(Dp), set);
          out.sampled = out.sampled || pasts.sampled;
          const auto F = interval_masses(f, n, l, A, Dp, pasts.words);
          const auto [lo, hi] = std::minmax_element(F.begin(), F.end());
          double r = 0.0;
          for (Site t = n; t < l + L; ++t)
            r += 0.5 * static_cast<double>(q) * (f.memory(t).bound(static_cast<int>(Dp + (t - n)))) +
                 static_cast<double>(q) * f.eval_radius();
          const double ratio = *hi + r > 0.0 ? std::max(0.0, (*lo - r) / (*hi + r)) : 0.0;
          best = std::max(best, ratio);
        }
        if (best < out.K) {
          out.K = best;
          out.worst = "site " + std::to_string(l) + " cylinder " + f.alphabet().format_word(A);
        }
      }
    }
  }
  if (out.K == kInf) out.K = 0.0;
  return out;
}

UniformityReport boundary_uniformity(const SpecFamily& s, int max_cylinder, int max_volume, const BoundarySet& set) {
  UniformityReport out;
  out.K = kInf;
  const Grammar& g = s.grammar();
  const int R = s.max_reach();
  const Symbol filler = g.free_symbol().value_or(0);
  for (Site l : s.probe_sites()) {
    for (int L = 1; L <= max_cylinder; ++L) {
      const Windows cyl = windows(g, l, static_cast<std::size_t>(L), set);
      for (const auto& A : cyl.words) {
        ++out.cylinders;
        std::vector<Site> ev;
        for (int t = 0; t < L; ++t) ev.push_back(l + t);
        double best = 0.0;
        for (int a = 0; a + L <= max_volume; ++a) {
          for (int b = 0; a + b + L <= max_volume; ++b) {
            const Site lo = l - a, hi = l + L - 1 + b;
            std::vector<Site> vol;
            for (Site t = lo; t <= hi; ++t) vol.push_back(t);
            const Word base(lo - R, std::vector<Symbol>(static_cast<std::size_t>(hi - lo + 1 + 2 * R), filler));
            const Envelope env = volume_envelope(s, base, vol, ev, {A}, true, true, set);
            out.sampled = out.sampled || env.sampled;
            const double r = s.eval_radius() * static_cast<double>(vol.size());
            const double ratio = env.sup + r > 0.0 ? std::max(0.0, (env.inf - r) / (env.sup + r)) : 0.0;
            best = std::max(best, ratio);
          }
        }
        if (best < out.K) {
          out.K = best;
          out.worst = "site " + std::to_string(l) + " cylinder " + s.alphabet().format_word(A);
        }
      }
    }
  }
  if (out.K == kInf) out.K = 0.0;
  return out;
}

// --------------------------------------------------------------- criteria

namespace {

// Lower bound on prod_{k >= 1} (1 - x_k) from upper bounds x_1..x_K and a
// bound on sum_{k > K} x_k.
double product_lower(const std::vector<double>& x, double tail, std::vector<double>* partial) {
  double p = 1.0;
  for (double v : x) {
    p *= (1.0 - v);
    if (partial) partial->push_back(p);
    if (p <= 0.0) return 0.0;
  }
  return std::max(0.0, p * (1.0 - tail));
}

}  // namespace

std::vector<CriterionResult> lis_criteria(const LisFamily& f, const Settings& settings) {
  std::vector<CriterionResult> out;
  const BoundarySet set = settings.boundary();
  const std::size_t q = f.alphabet().size();
  const double qh = 0.5 * static_cast<double>(q);
  const TailProfile& prof = f.profile();
  const int M = prof.memory();
  const int D = default_depth(f, set.budget);
  const double cmin = f.c_min();

  const NonNullReport nn = non_null_report(f, 3, set);
  out.push_back({"non-null",
                 nn.non_null ? Verdict::Holds
                             : (nn.min_value.value == 0.0 && nn.min_value.radius == 0.0 ? Verdict::Fails
                                                                                         : Verdict::Inconclusive),
                 nn.non_null ? nn.min_value.lower() : 0.0,
                 "inf f_i over admissible windows = " + fmt(nn.min_value.value) + " +- " + fmt(nn.min_value.radius) +
                     " (" + nn.detail + ")",
                 nn.min_value.sampled});
  out.push_back({"weakly-non-null", nn.weakly_non_null ? Verdict::Holds : Verdict::Inconclusive, 0.0,
                 "checked on intervals of length <= " + std::to_string(nn.checked_length), nn.min_value.sampled});

  // var_k, var_k(log f), Delta_k at site 0
  const int K = M >= 0 ? std::max(M, 1) : D;
  std::vector<double> var_up, logvar_up, overlap_lo;
  bool sampled = false;
  for (int k = 0; k <= K; ++k) {
    const PastStats ps = past_stats(f, 0, k, D, set);
    sampled = sampled || ps.var.sampled;
    var_up.push_back(std::min(ps.var.upper(), prof.bound(k)));
    logvar_up.push_back(cmin > 0.0 ? std::min(ps.log_var.upper(), prof.bound(k) / cmin) : ps.log_var.upper());
    overlap_lo.push_back(std::max(ps.overlap.lower(), 1.0 - qh * prof.bound(k)));
  }
  const std::string semantics = " (sup over pasts truncated at depth " + std::to_string(D) + ", tail from profile " +
                                prof.describe() + ")";

  const auto stationary_only = [&](const std::string& name) {
    out.push_back({name, Verdict::Inapplicable, 0.0, "requires the stationary tag", false});
  };

  // Harris
  if (!f.stationary()) {
    stationary_only("harris");
  } else {
    std::vector<double> x(var_up.begin() + 1, var_up.end());
    for (double& v : x) v *= qh;
    std::vector<double> partial;
    const double tail = qh * prof.tail_sum(K + 1);
    const double P = product_lower(x, tail, &partial);
    if (P > 0.0 && nn.weakly_non_null)
      out.push_back({"harris", Verdict::Holds, P,
                     "terms of the series stay above " + fmt(P) + ", so it diverges" + semantics, sampled});
    else
      out.push_back({"harris", Verdict::Inconclusive, 0.0, "partial products " + trajectory(partial) + semantics,
                     sampled});
  }

  // Berbee
  if (!f.stationary()) {
    stationary_only("berbee");
  } else {
    double S = 0.0;
    for (std::size_t k = 1; k < logvar_up.size(); ++k) S += logvar_up[k];
    S += cmin > 0.0 ? prof.tail_sum(K + 1) / cmin : kInf;
    if (nn.non_null && std::isfinite(S))
      out.push_back({"berbee", Verdict::Holds, std::exp(-S),
                     "sum var_k(log f_0) <= " + fmt(S) + ", terms stay above exp(-S)" + semantics, sampled});
    else
      out.push_back({"berbee", Verdict::Inconclusive, 0.0,
                     "no finite bound on sum var_k(log f_0); measured " + trajectory(logvar_up) + semantics, sampled});
  }

  // Stenflo
  if (!f.stationary()) {
    stationary_only("stenflo");
  } else {
    std::vector<double> x;
    for (std::size_t k = 1; k < overlap_lo.size(); ++k) x.push_back(1.0 - overlap_lo[k]);
    std::vector<double> partial;
    const double P = product_lower(x, qh * prof.tail_sum(K + 1), &partial);
    std::vector<double> deltas(overlap_lo.begin() + 1, overlap_lo.end());
    if (P > 0.0 && nn.non_null)
      out.push_back({"stenflo", Verdict::Holds, P,
                     "Delta_k >= " + trajectory(deltas) + ", products stay above " + fmt(P) + semantics, sampled});
    else
      out.push_back({"stenflo", Verdict::Inconclusive, 0.0, "partial products " + trajectory(partial) + semantics,
                     sampled});
  }

  // Johansson-Oberg
  if (!f.stationary()) {
    stationary_only("johansson-oberg");
  } else {
    double S = 0.0;
    for (double v : logvar_up) S += v * v;
    S += cmin > 0.0 ? prof.tail_sum_sq(K + 1) / (cmin * cmin) : kInf;
    if (nn.non_null && std::isfinite(S))
      out.push_back({"johansson-oberg", Verdict::Holds, S, "sum var_k(log f_0)^2 <= " + fmt(S) + semantics, sampled});
    else
      out.push_back({"johansson-oberg", Verdict::Inconclusive, 0.0,
                     "profile is not square summable; measured " + trajectory(logvar_up) + semantics, sampled});
  }

  // one-sided Dobrushin
  {
    const auto sites = f.probe_sites();
    const DobrushinMatrix C = dobrushin_matrix(f, sites, D, set);
    double worst = 0.0, worst_lo = 0.0;
    Site wi = sites.front();
    bool samp = false;
    for (const auto& r : C.rows) {
      samp = samp || r.sampled;
      if (r.upper() >= worst) {
        worst = r.upper();
        wi = r.site;
      }
      worst_lo = std::max(worst_lo, r.lower());
    }
    const bool continuous = prof.bound(1000) < 1e-3;
    const std::string d = "max_i sum_{j<i} C_ij <= " + fmt(worst) + " (site " + std::to_string(wi) +
                          ", half-L1 variation distance)";
    if (worst < 1.0 && continuous)
      out.push_back({"one-sided-dobrushin", Verdict::Holds, 1.0 - worst, d, samp});
    else if (worst_lo >= 1.0)
      out.push_back({"one-sided-dobrushin", Verdict::Fails, worst_lo - 1.0, d, samp});
    else
      out.push_back({"one-sided-dobrushin", Verdict::Inconclusive, 0.0, d, samp});
  }

  // one-sided boundary uniformity
  {
    const UniformityReport u = one_sided_uniformity(f, 4, 12, set);
    const std::string d = "K >= " + fmt(u.K) + " over " + std::to_string(u.cylinders) +
                          " cylinders of length <= 4 (worst: " + u.worst + ")";
    out.push_back({"one-sided-boundary-uniformity", u.K > 0.0 ? Verdict::Holds : Verdict::Inconclusive, u.K, d,
                   u.sampled});
  }

  // GF for Lambda = {0}, EGF at j = 0
  {
    const Site lam[1] = {0};
    const SeriesCertificate gf = gf_certificate(f, lam, settings);
    out.push_back({"good-future", gf.verdict, gf.verdict == Verdict::Holds ? gf.bound : 0.0, gf.detail, gf.sampled});
    const SeriesCertificate egf = egf_certificate(f, 0, settings);
    out.push_back({"exponentially-good-future", egf.verdict, egf.verdict == Verdict::Holds ? egf.a : 0.0, egf.detail,
                   egf.sampled});
  }
  return out;
}

std::vector<CriterionResult> spec_criteria(const SpecFamily& s, const Settings& settings) {
  std::vector<CriterionResult> out;
  const BoundarySet set = settings.boundary();
  const auto sites = s.probe_sites();

  {
    double lo = kInf;
    bool samp = false;
    for (Site i : sites) {
      const int R = s.reach(i);
      const Windows ws = windows(s.grammar(), i - R, static_cast<std::size_t>(2 * R + 1), set);
      samp = samp || ws.sampled;
      for (const auto& w : ws.words) lo = std::min(lo, s.gamma(i, Word(i - R, w)));
    }
    const double l = lo - s.eval_radius();
    out.push_back({"non-null", l > 0.0 ? Verdict::Holds : (lo == 0.0 ? Verdict::Fails : Verdict::Inconclusive),
                   l > 0.0 ? l : 0.0, "inf gamma_i over admissible windows = " + fmt(lo), samp});
  }
  {
    const DobrushinMatrix C = dobrushin_matrix(s, sites, set);
    double worst = 0.0, worst_lo = 0.0;
    Site wi = sites.front();
    bool samp = false;
    for (const auto& r : C.rows) {
      samp = samp || r.sampled;
      if (r.upper() >= worst) {
        worst = r.upper();
        wi = r.site;
      }
      worst_lo = std::max(worst_lo, r.lower());
    }
    const std::string d = "max_i sum_{j!=i} C_ij = " + fmt(worst) + " (site " + std::to_string(wi) +
                          ", half-L1 variation distance)";
    if (worst < 1.0)
      out.push_back({"dobrushin", Verdict::Holds, 1.0 - worst, d, samp});
    else if (worst_lo >= 1.0)
      out.push_back({"dobrushin", Verdict::Fails, worst_lo - 1.0, d, samp});
    else
      out.push_back({"dobrushin", Verdict::Inconclusive, 0.0, d, samp});
  }
  {
    const UniformityReport u = boundary_uniformity(s, 4, 12, set);
    const std::string d = "K >= " + fmt(u.K) + " over " + std::to_string(u.cylinders) +
                          " cylinders of length <= 4, volumes of length <= 12 (worst: " + u.worst + ")";
    out.push_back({"boundary-uniformity", u.K > 0.0 ? Verdict::Holds : Verdict::Inconclusive, u.K, d, u.sampled});
  }
  {
    const SeriesCertificate egf = egf_certificate(s, 0, settings);
    out.push_back({"exponentially-good-future", egf.verdict, egf.verdict == Verdict::Holds ? egf.a : 0.0, egf.detail,
                   egf.sampled});
  }
  return out;
}

// ------------------------------------------------------ continuity rates

namespace {

// Windows on [lo, hi]: every admissible word on [s0, s1], the rest filled
// with constant symbols or seeded random extensions.
std::vector<Word> probe_windows(const Grammar& g, Site lo, Site hi, Site s0, Site s1, const BoundarySet& set) {
  std::vector<Word> out;
  const Windows core = windows(g, s0, static_cast<std::size_t>(s1 - s0 + 1), set);
  const std::size_t q = g.alphabet_size();
  std::mt19937_64 rng(set.seed);
  for (const auto& c : core.words) {
    for (Symbol x = 0; x < static_cast<Symbol>(q); ++x) {
      std::vector<Symbol> w(static_cast<std::size_t>(s0 - lo), x);
      w.insert(w.end(), c.begin(), c.end());
      w.insert(w.end(), static_cast<std::size_t>(hi - s1), x);
      if (g.admissible(w)) out.emplace_back(lo, std::move(w));
    }
    for (int r = 0; r < 2; ++r) {
      Word w = extend_left(g, Word(s0, c), static_cast<std::size_t>(s0 - lo), rng);
      out.push_back(extend_right(g, w, static_cast<std::size_t>(hi - s1), rng));
    }
  }
  return out;
}

// Sites to the right needed by lis_to_spec for this target.
Site future_reach(const LisFamily& f, std::span<const Site> lambda, double target, int n_max) {
  Site n = lambda.back();
  while (future_tail(f, lambda, n) > target) {
    if (n - lambda.back() >= n_max) throw TailNotSummable("target not reachable within n_max");
    ++n;
  }
  return n;
}

// Measured sup_{omega, sigma = omega off j} |v(omega) - v(sigma)|; every probe
// must satisfy diff <= bound + radii.
template <class Eval>
void measure_flips(const Grammar& g, const std::vector<Word>& probes, Site j, Eval eval, RateCheck& rc) {
  double best = 0.0, best_r = 0.0;
  bool pass = true;
  const double limit = rc.bound.upper();
  for (const Word& w : probes) {
    const CertifiedValue v = eval(w);
    Word s = w;
    for (Symbol b = 0; b < static_cast<Symbol>(g.alphabet_size()); ++b) {
      if (b == w.at(j)) continue;
      s.at(j) = b;
      if (!g.admissible(s.symbols)) continue;
      const CertifiedValue u = eval(s);
      const double d = std::fabs(v.value - u.value), r = v.radius + u.radius;
      ++rc.probes;
      if (d > best) {
        best = d;
        best_r = r;
      }
      if (d > limit + r) pass = false;
    }
    s.at(j) = w.at(j);
  }
  rc.measured = {best, best_r, 0, false};
  rc.pass = pass;
}

// 1 - prod_{i} (1 - u_i)/(1 + u_i) from measured upper values and a bound
// on the remaining sum of u_i.
CertifiedValue product_bound(const std::vector<double>& value, const std::vector<double>& upper, double tail) {
  const auto prod = [](const std::vector<double>& u) {
    double p = 1.0;
    for (double x : u) p *= x >= 1.0 ? 0.0 : (1.0 - x) / (1.0 + x);
    return p;
  };
  const double v = 1.0 - prod(value);
  const double up = std::min(1.0, 1.0 - prod(upper) * std::max(0.0, 1.0 - 2.0 * tail));
  return {v, std::max(0.0, up - v), static_cast<int>(value.size()), false};
}

std::vector<Site> interval(Site l, Site m) {
  std::vector<Site> s;
  for (Site t = l; t <= m; ++t) s.push_back(t);
  return s;
}

}  // namespace

RateCheck rate_check_future(std::shared_ptr<const LisFamily> f, Site l, Site m, Site j, const Settings& settings) {
  if (j <= m) throw Unsupported("future check needs j > m");
  RateCheck rc;
  rc.label = "future site " + std::to_string(j) + " of [" + std::to_string(l) + "," + std::to_string(m) + "]";
  const BoundarySet set = settings.boundary();
  const auto lambda = interval(l, m);
  const double cmin = f->c_min();
  const int M = f->profile().memory();

  // 2 sum_{i >= j} sup c_Lambda(f_i)^{-1} delta_Lambda(f_i)
  double val = 0.0, up = 0.0;
  Site i = j;
  bool sampled = false;
  for (; i <= j + settings.k_max; ++i) {
    if (M >= 0 && i - M > m) break;
    const auto depth = measurable_depth(*f, i, l, set);
    if (!depth) break;
    const auto r = sup_ratio(*f, i, lambda, *depth, set);
    sampled = sampled || r.sampled;
    val += r.value;
    up += r.upper();
  }
  double tail = 0.0;
  if (!(M >= 0 && i - M > m))
    for (Site t : lambda) tail += f->profile().tail_sum(static_cast<int>(i - 1 - t)) / cmin;
  rc.bound = {2.0 * val, 2.0 * (up - val + tail), static_cast<int>(i - j), sampled};

  const Site n = future_reach(*f, lambda, settings.target, settings.n_max);
  const Site lo = l - 12, hi = std::max(n, j) + 1;
  Site s0 = l, s1 = j;
  while (s1 - s0 + 1 < 6) --s0;
  const auto probes = probe_windows(f->grammar(), lo, hi, s0, s1, set);
  measure_flips(
      f->grammar(), probes, j,
      [&](const Word& w) {
        return lis_to_spec(*f, lambda, w.view(l, m), w, settings.target, settings.n_max);
      },
      rc);
  return rc;
}

RateCheck rate_check_past(std::shared_ptr<const LisFamily> f, Site l, Site m, Site j, const Settings& settings) {
  if (j >= l) throw Unsupported("past check needs j < l");
  RateCheck rc;
  rc.label = "past site " + std::to_string(j) + " of [" + std::to_string(l) + "," + std::to_string(m) + "]";
  const BoundarySet set = settings.boundary();
  const auto lambda = interval(l, m);
  const double cmin = f->c_min();
  const int M = f->profile().memory();
  const Site jj[1] = {j};

  std::vector<double> val, up;
  Site i = l;
  bool sampled = false;
  for (; i <= l + settings.k_max; ++i) {
    if (M >= 0 && i - M > j) break;
    const auto depth = measurable_depth(*f, i, j, set);
    if (!depth) break;
    const auto r = sup_ratio(*f, i, jj, *depth, set);
    sampled = sampled || r.sampled;
    val.push_back(r.value);
    up.push_back(r.upper());
  }
  const double tail = (M >= 0 && i - M > j) ? 0.0 : f->profile().tail_sum(static_cast<int>(i - 1 - j)) / cmin;
  rc.bound = product_bound(val, up, tail);
  rc.bound.sampled = sampled;

  const Site n = future_reach(*f, lambda, settings.target, settings.n_max);
  const Site lo = j - 12, hi = n + 1;
  Site s0 = j, s1 = m;
  while (s1 - s0 + 1 < 6) --s0;
  const auto probes = probe_windows(f->grammar(), lo, hi, s0, s1, set);
  measure_flips(
      f->grammar(), probes, j,
      [&](const Word& w) {
        return lis_to_spec(*f, lambda, w.view(l, m), w, settings.target, settings.n_max);
      },
      rc);
  return rc;
}

RateCheck rate_check_spec(std::shared_ptr<const SpecFamily> gamma, Site l, Site m, Site j,
                          const Settings& settings) {
  if (j >= l) throw Unsupported("chain check needs j < l");
  RateCheck rc;
  rc.label = "past site " + std::to_string(j) + " of [" + std::to_string(l) + "," + std::to_string(m) + "], f^gamma";
  const BoundarySet set = settings.boundary();
  const Grammar& g = gamma->grammar();
  // finite range: the product over i has finitely many factors below 1
  std::vector<double> val, up;
  for (Site i = l; i <= j + gamma->max_reach(); ++i) {
    const auto r = sup_ratio(*gamma, i, j, set);
    val.push_back(r.value);
    up.push_back(r.upper());
  }
  rc.bound = product_bound(val, up, 0.0);

  const int R = std::max(1, gamma->max_reach());
  const Site lo = std::min(j, l - R) - 12;
  Site s0 = j, s1 = m;
  while (s1 - s0 + 1 < 6) --s0;
  const auto probes = probe_windows(g, lo, m, std::max(s0, lo), s1, set);
  measure_flips(
      g, probes, j,
      [&](const Word& w) {
        const auto in = w.view(l, m);
        return spec_to_lis(*gamma, l, m, {std::vector<Symbol>(in.begin(), in.end())}, w.slice(w.start, l - 1),
                           settings.target, settings.k_max, set);
      },
      rc);
  return rc;
}

RateCheck rate_check_chain(std::shared_ptr<const LisFamily> f, Site l, Site m, Site j, const Settings& settings) {
  if (j >= l) throw Unsupported("chain check needs j < l");
  RateCheck rc;
  rc.label = "past site " + std::to_string(j) + " of [" + std::to_string(l) + "," + std::to_string(m) + "], f^gamma";
  const BoundarySet set = settings.boundary();
  const auto lambda = interval(l, m);
  const Grammar& g = f->grammar();
  const int M = f->profile().memory();

  if (M >= 0) {
    RateCheck rc2 = rate_check_spec(lis_induced_spec(f), l, m, j, settings);
    rc2.label = rc.label;
    return rc2;
  }

  // Tail profile: gamma^f singletons through lis_to_spec, with the effect of
  // sites outside the window bounded by the profile.
  const double cmin = f->c_min();
  if (!(cmin > 0.0)) throw PositivityViolated("c_min is not certified positive");
  const TailProfile& p = f->profile();
  const double q = static_cast<double>(f->alphabet().size());
  const double c_gamma = 1.0 / (1.0 + (q - 1.0) / cmin * std::exp(p.tail_sum(0) / cmin));
  const int L = log_budget(f->alphabet().size(), set.budget);
  std::vector<double> val, up;
  Site i = l;
  bool sampled = false;
  for (; i <= l + settings.k_max; ++i) {
    const int Dp = static_cast<int>(i - j) + 1;
    const int Df = L - 1 - Dp;
    if (Df < 2) break;
    const Site a = i - Dp, b = i + Df;
    const Site site[1] = {i};
    const Site n = future_reach(*f, site, settings.target, settings.n_max);
    const double outside = 2.0 / cmin * (p.double_tail_sum(Dp) + p.double_tail_sum(Df));
    const Windows ws = windows(g, a, static_cast<std::size_t>(b - a + 1), set);
    sampled = sampled || ws.sampled;
    double v = 0.0, u = 0.0;
    for (const auto& core : ws.words) {
      std::vector<Symbol> sym = core;
      const Symbol fill = g.free_symbol().value_or(0);
      sym.insert(sym.end(), static_cast<std::size_t>(std::max<Site>(0, n + 1 - b)), fill);
      Word w(a, sym);
      if (!g.admissible(w.symbols)) continue;
      const auto eval = [&](const Word& x) {
        auto cv = lis_to_spec(*f, site, x.view(i, i), x, settings.target, settings.n_max);
        cv.radius += outside;
        return cv;
      };
      const CertifiedValue base = eval(w);
      double c = base.value, cr = base.radius, d = 0.0, dr = 0.0;
      Word s = w;
      for (Symbol x = 0; x < static_cast<Symbol>(q); ++x) {
        if (x == w.at(j)) continue;
        s.at(j) = x;
        if (!g.admissible(s.symbols)) continue;
        const CertifiedValue o = eval(s);
        if (o.value < c) {
          c = o.value;
          cr = o.radius;
        }
        if (std::fabs(base.value - o.value) > d) {
          d = std::fabs(base.value - o.value);
          dr = base.radius + o.radius;
        }
      }
      s.at(j) = w.at(j);
      if (c > 0.0) v = std::max(v, d / c);
      u = std::max(u, c - cr > 0.0 ? (d + dr) / (c - cr) : kInf);
    }
    val.push_back(v);
    up.push_back(u);
  }
  const double tail = 2.0 / (cmin * c_gamma) * p.double_tail_sum(static_cast<int>(i - 1 - j));
  rc.bound = product_bound(val, up, tail);
  rc.bound.sampled = sampled;

  // f^gamma = f here; measure delta_j(f_Lambda) over pasts of depth 12
  const Site lo = l - 12;
  Site s0 = j, s1 = m;
  while (s1 - s0 + 1 < 6) --s0;
  const auto probes = probe_windows(g, lo, m, std::max(lo, s0), s1, set);
  measure_flips(
      g, probes, j,
      [&](const Word& w) { return lis_interval(*f, l, m, w.view(l, m), w.slice(w.start, l - 1)); }, rc);
  return rc;
}

ProductTailCheck product_tail_check(double c, double a, double m, int k) {
  ProductTailCheck out;
  out.M = 2.0 * m;
  double prod = 1.0;
  for (int i = k;; ++i) {
    const double u = m * c * std::pow(a, -static_cast<double>(i));
    const double factor = (1.0 - u) / (1.0 + u);
    if (factor == 1.0) break;
    prod *= factor;
  }
  out.lhs = 1.0 - prod;
  out.rhs = out.M * c * std::pow(a, -static_cast<double>(k - 1)) / std::log(a);
  out.pass = out.lhs <= out.rhs;
  return out;
}

}  // namespace chainspec
