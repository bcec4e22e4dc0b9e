#include "chainspec/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "chainspec/errors.hpp"

namespace chainspec {

namespace {

double product(const LisFamily& f, const Word& w, Site l, Site n) {
  double p = 1.0;
  for (Site k = l; k <= n && p != 0.0; ++k) p *= f.f(k, w.view(w.start, k - 1), w.at(k));
  return p;
}

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

double f_ratio(const LisFamily& f, std::span<const Site> sites, Site n, std::span<const Symbol> interior,
               const Word& exterior) {
  if (sites.empty()) return 1.0;
  if (sites.size() != interior.size()) throw InadmissibleWord("interior does not match the volume");
  if (!std::is_sorted(sites.begin(), sites.end())) throw InadmissibleWord("volume sites must be ascending");
  const Site l = sites.front(), m = sites.back();
  if (n < m) throw InadmissibleWord("truncation n must be at least max(Lambda)");
  const int depth = f.required_depth();
  if (!exterior.covers(l - depth, n))
    throw WindowTooShort("exterior must cover [" + std::to_string(l - depth) + ", " + std::to_string(n) + "]");
  Word w = exterior.slice(exterior.start, n);
  for (std::size_t t = 0; t < sites.size(); ++t) w.at(sites[t]) = interior[t];

  const double num = f.grammar().admissible(w.symbols) ? product(f, w, l, n) : 0.0;
  std::vector<double> terms;
  for (const auto& fill : enumerate_fillings(f.grammar(), w, sites)) {
    Word v = w;
    for (std::size_t t = 0; t < sites.size(); ++t) v.at(sites[t]) = fill[t];
    terms.push_back(product(f, v, l, n));
  }
  const double den = pairwise_sum(terms);
  if (den == 0.0) throw ZeroDenominator("every interior has zero weight (nullness on this exterior)");
  return num / den;
}

double future_tail(const LisFamily& f, std::span<const Site> sites, Site n) {
  const TailProfile& p = f.profile();
  double sum = 0.0;
  for (Site j : sites) sum += p.tail_sum(static_cast<int>(n - j));
  if (sum == 0.0) return 0.0;
  if (!std::isfinite(sum)) return sum;
  const double c = f.c_min();
  if (c <= 0.0) return std::numeric_limits<double>::infinity();
  return sum / c;
}

CertifiedValue lis_to_spec(const LisFamily& f, std::span<const Site> sites, std::span<const Symbol> interior,
                           const Word& exterior, double target, int n_max) {
  if (sites.empty()) return {1.0, 0.0, 0, false};
  const Site m = sites.back(), l = sites.front();
  if (!f.profile().summable())
    throw TailNotSummable("profile " + f.profile().describe() + " cannot certify any radius");
  if (f.profile().memory() < 0 && !f.grammar().is_full_shift())
    throw Unsupported("future tail under a grammar is certified only for exact memory");
  Site n = m;
  double tail = future_tail(f, sites, n);
  while (tail > target) {
    if (n - m >= n_max)
      throw TailNotSummable("tail bound " + std::to_string(tail) + " still above target at n_max");
    ++n;
    tail = future_tail(f, sites, n);
  }
  if (!exterior.covers(n))
    throw WindowTooShort("certifying the target needs the exterior up to site " + std::to_string(n));
  const double v = f_ratio(f, sites, n, interior, exterior);
  double radius = tail;
  if (f.eval_radius() > 0.0) {
    // every factor carries a relative error of at most rho
    const double c = f.c_min();
    const double rho = c > 0.0 ? f.eval_radius() / c : 1.0;
    const double factors = static_cast<double>(n - l + 1);
    radius += rho < 1.0 ? v * (std::pow((1.0 + rho) / (1.0 - rho), factors) - 1.0) : 1.0;
  }
  return {v, std::min(radius, 1.0), static_cast<int>(n), false};
}

CertifiedValue spec_to_lis(const SpecFamily& s, Site l, Site m, const std::vector<std::vector<Symbol>>& event,
                           const Word& past, double target, int k_max, const BoundarySet& set) {
  const int r = s.max_reach();
  if (!past.empty() && past.end() != l) throw InadmissibleWord("past must end at site " + std::to_string(l - 1));
  if (past.size() < static_cast<std::size_t>(r))
    throw WindowTooShort("past must cover the reach " + std::to_string(r));
  if (!s.grammar().admissible(past.symbols)) throw ContextInadmissible("past violates the grammar");
  std::vector<Site> event_sites;
  for (Site i = l; i <= m; ++i) event_sites.push_back(i);
  if (event.empty()) return {0.0, 0.0, 0, false};
  const Symbol filler = s.grammar().free_symbol().value_or(0);
  double last = 1.0;
  // the spread is nonincreasing in k, so doubling loses nothing but time
  for (int k = 1;; k = std::min(2 * k, k_max)) {
    const Site hi = m + k;
    std::vector<Site> vol;
    for (Site i = l; i <= hi; ++i) vol.push_back(i);
    Word base = past;
    base.symbols.insert(base.symbols.end(), static_cast<std::size_t>(hi - l + 1 + r), filler);
    const Envelope env = volume_envelope(s, base, vol, event_sites, event, false, true, set);
    last = env.spread();
    if (last <= 2.0 * target) return {env.midpoint(), 0.5 * last, k, env.sampled};
    if (k >= k_max) break;
  }
  char msg[160];
  std::snprintf(msg, sizeof msg, "spread %.3e still above 2*target=%.3e at k_max=%d", last, 2.0 * target, k_max);
  throw SpreadNotContracting(msg);
}

std::shared_ptr<SpecFamily> lis_induced_spec(std::shared_ptr<const LisFamily> f) {
  const int M = f->profile().memory();
  if (M < 0) throw Unsupported("the induced specification is built for exact-memory families only");
  if (f->eval_radius() > 0.0) throw Unsupported("the induced specification needs exactly evaluable singletons");
  RhoSingleton rho;
  rho.range = M;
  rho.eval = [f, M](const Word& w, Site i) {
    const Site sites[1] = {i};
    const Symbol a[1] = {w.at(i)};
    return f_ratio(*f, sites, i + M, a, w);
  };
  return std::make_shared<SpecFamily>(f->alphabet(), f->grammar(), rho, std::vector<double>{}, f->stationary());
}

std::shared_ptr<LisFamily> spec_induced_lis(std::shared_ptr<const SpecFamily> s, const Settings& settings) {
  const int r = s->max_reach();
  auto cache = std::make_shared<std::map<std::pair<Site, std::vector<Symbol>>, double>>();
  const bool stationary = s->stationary();
  const BoundarySet set = settings.boundary();
  const double target = settings.target;
  const int k_max = settings.k_max;
  GSingleton g;
  g.memory = TailProfile::exact(r);
  g.eval = [s, cache, stationary, set, target, k_max, r](Site i, std::span<const Symbol> past, Symbol a) {
    std::pair<Site, std::vector<Symbol>> key{stationary ? 0 : i, {past.end() - r, past.end()}};
    key.second.push_back(a);
    const auto it = cache->find(key);
    if (it != cache->end()) return it->second;
    const Word w(i - r, std::vector<Symbol>(past.end() - r, past.end()));
    const double v = spec_to_lis(*s, i, i, {{a}}, w, target, k_max, set).value;
    cache->emplace(std::move(key), v);
    return v;
  };
  auto f = std::make_shared<LisFamily>(s->alphabet(), s->grammar(), g, stationary);
  f->set_eval_radius(target);
  for (Site i : s->probe_sites())
    for (Site d = -r; d <= r; ++d) f->add_probe_site(i + d);
  return f;
}

RoundtripReport roundtrip_cb(std::shared_ptr<const LisFamily> f, const Settings& settings) {
  auto gamma = lis_induced_spec(f);
  const int r = std::max(gamma->max_reach(), f->required_depth());
  const std::size_t q = f->alphabet().size();
  RoundtripReport rep;
  for (Site i : f->probe_sites()) {
    for (const auto& ctx : words_of_length(f->grammar(), r)) {
      const Word past(i - r, ctx);
      for (std::size_t a = 0; a < q; ++a) {
        RoundtripProbe p;
        p.label = "site=" + std::to_string(i) + " past=" + f->alphabet().format_word(ctx) +
                  " symbol=" + f->alphabet().label(static_cast<Symbol>(a));
        p.original = f->f(i, ctx, static_cast<Symbol>(a));
        const CertifiedValue v = spec_to_lis(*gamma, i, i, {{static_cast<Symbol>(a)}}, past, settings.target,
                                             settings.k_max, settings.boundary());
        p.recovered = v.value;
        p.radius = v.radius;
        p.pass = p.discrepancy() <= p.radius + settings.composed_tol;
        rep.max_discrepancy = std::max(rep.max_discrepancy, p.discrepancy());
        rep.max_radius = std::max(rep.max_radius, p.radius);
        rep.pass = rep.pass && p.pass;
        rep.probes.push_back(std::move(p));
      }
    }
  }
  return rep;
}

RoundtripReport roundtrip_bc(std::shared_ptr<const SpecFamily> s, const Settings& settings) {
  auto f = spec_induced_lis(s, settings);
  const int r = s->max_reach();
  RoundtripReport rep;
  for (Site i : s->probe_sites()) {
    for (const auto& nb : words_of_length(s->grammar(), 2 * r + 1)) {
      const Word w(i - r, nb);
      const Site sites[1] = {i};
      const Symbol a[1] = {w.at(i)};
      RoundtripProbe p;
      p.label = "site=" + std::to_string(i) + " window=" + s->alphabet().format_word(nb);
      p.original = gamma_volume(*s, sites, a, w);
      const CertifiedValue v = lis_to_spec(*f, sites, a, w, settings.target, settings.n_max);
      p.recovered = v.value;
      p.radius = v.radius;
      p.pass = p.discrepancy() <= p.radius + settings.composed_tol;
      rep.max_discrepancy = std::max(rep.max_discrepancy, p.discrepancy());
      rep.max_radius = std::max(rep.max_radius, p.radius);
      rep.pass = rep.pass && p.pass;
      rep.probes.push_back(std::move(p));
    }
  }
  return rep;
}

CertifiedValue global_kernel(const SpecFamily& s, const Region& region, std::span<const Site> event_sites,
                             const std::vector<std::vector<Symbol>>& event_words, const Word& omega, int depth,
                             double target, const BoundarySet& set) {
  const int r = s.max_reach();
  const Symbol filler = s.grammar().free_symbol().value_or(0);
  Site ev_lo = std::numeric_limits<Site>::max(), ev_hi = std::numeric_limits<Site>::min();
  for (Site e : event_sites) {
    ev_lo = std::min(ev_lo, e);
    ev_hi = std::max(ev_hi, e);
  }
  Envelope env;
  int used = 0;
  for (int d = 0; d <= depth; ++d) {
    std::vector<Site> vol;
    Word base;
    bool vary_left = false, vary_right = false;
    switch (region.kind) {
      case Region::Kind::RightHalfLine: {
        const Site a = region.edge;
        if (!event_sites.empty() && ev_lo < a) throw InadmissibleWord("event outside the region");
        const Site hi = std::max(a, event_sites.empty() ? a : ev_hi) + d;
        for (Site i = a; i <= hi; ++i) vol.push_back(i);
        base = omega.slice(omega.start, a - 1);
        if (base.size() < static_cast<std::size_t>(r)) throw WindowTooShort("omega must cover the left exterior");
        base.symbols.insert(base.symbols.end(), static_cast<std::size_t>(hi - a + 1 + r), filler);
        vary_right = true;
        break;
      }
      case Region::Kind::LeftHalfLine: {
        const Site b = region.edge;
        if (!event_sites.empty() && ev_hi > b) throw InadmissibleWord("event outside the region");
        const Site lo = std::min(b, event_sites.empty() ? b : ev_lo) - d;
        for (Site i = lo; i <= b; ++i) vol.push_back(i);
        const Word right = omega.slice(b + 1, omega.end() - 1);
        if (right.size() < static_cast<std::size_t>(r)) throw WindowTooShort("omega must cover the right exterior");
        base = Word(lo - r, std::vector<Symbol>(static_cast<std::size_t>(b - lo + 1 + r), filler));
        base = concat(base, right);
        vary_left = true;
        break;
      }
      case Region::Kind::Cofinite: {
        if (event_sites.empty() && region.removed.empty()) throw InadmissibleWord("empty cofinite window");
        Site lo = ev_lo, hi = ev_hi;
        for (Site x : region.removed) {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
        lo -= d;
        hi += d;
        base = Word(lo - r, std::vector<Symbol>(static_cast<std::size_t>(hi - lo + 1 + 2 * r), filler));
        for (Site i = lo; i <= hi; ++i) {
          if (std::find(region.removed.begin(), region.removed.end(), i) != region.removed.end()) {
            base.at(i) = omega.at(i);
          } else {
            vol.push_back(i);
          }
        }
        for (Site e : event_sites)
          if (std::find(region.removed.begin(), region.removed.end(), e) != region.removed.end())
            throw InadmissibleWord("event outside the region");
        vary_left = vary_right = true;
        break;
      }
    }
    env = volume_envelope(s, base, vol, event_sites, event_words, vary_left, vary_right, set);
    used = d;
    if (target > 0.0 && env.spread() <= 2.0 * target) break;
  }
  if (target > 0.0 && env.spread() > 2.0 * target) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "spread %.3e still above 2*target=%.3e at depth %d", env.spread(), 2.0 * target,
                  depth);
    throw SpreadNotContracting(msg);
  }
  return {env.midpoint(), 0.5 * env.spread(), used, env.sampled};
}

}  // namespace chainspec
