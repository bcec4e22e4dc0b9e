#include "chainspec/oracle.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "chainspec/errors.hpp"

namespace chainspec {

TransferModel::TransferModel(Grammar grammar, int memory, const WeightFn& weight)
    : grammar_(std::move(grammar)), memory_(memory) {
  if (memory_ < 0) throw ConfigError("negative memory");
  const std::size_t q = grammar_.alphabet_size();
  if (memory_ == 0) {
    states_.push_back({});
  } else {
    for (auto& w : enumerate_interior(grammar_, SitePatch{Word(), 0, memory_ - 1, Word()}))
      states_.push_back(std::move(w.symbols));
  }
  weights_.assign(states_.size() * q, 0.0);
  next_.assign(states_.size() * q, -1);
  std::vector<Symbol> buf;
  for (std::size_t s = 0; s < states_.size(); ++s) {
    for (std::size_t a = 0; a < q; ++a) {
      buf = states_[s];
      buf.push_back(static_cast<Symbol>(a));
      const std::size_t m = static_cast<std::size_t>(grammar_.order());
      const auto tail = std::span<const Symbol>(buf).last(std::min(buf.size(), m + 1));
      if (!grammar_.admissible(tail)) continue;
      const double w = weight(states_[s], static_cast<Symbol>(a));
      if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("transfer weights must be finite and nonnegative");
      weights_[s * q + a] = w;
      if (memory_ == 0) {
        next_[s * q + a] = 0;
      } else {
        next_[s * q + a] = static_cast<long>(state_index(std::span<const Symbol>(buf).subspan(1)));
      }
    }
  }
}

std::size_t TransferModel::state_index(std::span<const Symbol> state) const {
  if (state.size() != static_cast<std::size_t>(memory_)) throw InadmissibleContext("state of wrong length");
  // states_ is in lexicographic order
  const auto it = std::lower_bound(states_.begin(), states_.end(), state, [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
  if (it == states_.end() || !std::equal(it->begin(), it->end(), state.begin(), state.end()))
    throw InadmissibleContext("state is not admissible");
  return static_cast<std::size_t>(it - states_.begin());
}

bool TransferModel::row_stochastic(double tol) const {
  const std::size_t q = alphabet_size();
  for (std::size_t s = 0; s < states_.size(); ++s) {
    double sum = 0.0;
    for (std::size_t a = 0; a < q; ++a) sum += weights_[s * q + a];
    if (std::fabs(sum - 1.0) > tol) return false;
  }
  return true;
}

bool TransferModel::irreducible() const {
  // strong connectivity of the positive-weight graph: reach all from 0 forwards and backwards
  const std::size_t n = states_.size(), q = alphabet_size();
  for (int dir = 0; dir < 2; ++dir) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t s = stack.back();
      stack.pop_back();
      for (std::size_t t = 0; t < n; ++t) {
        if (seen[t]) continue;
        bool edge = false;
        for (std::size_t a = 0; a < q && !edge; ++a) {
          if (dir == 0) edge = next_[s * q + a] == static_cast<long>(t) && weights_[s * q + a] > 0.0;
          else edge = next_[t * q + a] == static_cast<long>(s) && weights_[t * q + a] > 0.0;
        }
        if (edge) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
    for (char c : seen)
      if (!c) return false;
  }
  return true;
}

std::vector<double> invariant_measure(const TransferModel& tm) {
  if (!tm.row_stochastic(1e-12)) throw ConfigError("invariant_measure needs a row-stochastic model");
  if (!tm.irreducible()) throw NotIrreducible("the admissible state graph is not strongly connected");
  const std::size_t n = tm.states().size(), q = tm.alphabet_size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < 10000000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t a = 0; a < q; ++a) {
        const long t = tm.next(s, static_cast<Symbol>(a));
        if (t >= 0) next[static_cast<std::size_t>(t)] += pi[s] * tm.weight(s, static_cast<Symbol>(a));
      }
    double residual = 0.0, total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      residual += std::fabs(next[s] - pi[s]);
      next[s] = 0.5 * (next[s] + pi[s]);
      total += next[s];
    }
    for (double& x : next) x /= total;
    pi.swap(next);
    if (residual <= 1e-14) return pi;
  }
  throw NotIrreducible("power iteration did not converge");
}

Perron perron(const TransferModel& tm) {
  if (!tm.irreducible()) throw NotIrreducible("the admissible state graph is not strongly connected");
  const std::size_t n = tm.states().size(), q = tm.alphabet_size();
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (std::size_t a = 0; a < q; ++a) {
        const long t = tm.next(s, static_cast<Symbol>(a));
        if (t >= 0) acc += tm.weight(s, static_cast<Symbol>(a)) * v[static_cast<std::size_t>(t)];
      }
      out[s] = acc;
    }
  };
  std::vector<double> v(n, 1.0 / static_cast<double>(n)), tv(n);
  for (int it = 0; it < 10000000; ++it) {
    apply(v, tv);
    // lazy step (T + I) keeps periodic graphs convergent
    double norm = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      tv[s] += v[s];
      norm += tv[s];
    }
    double change = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      tv[s] /= norm;
      change += std::fabs(tv[s] - v[s]);
    }
    v.swap(tv);
    if (change <= 1e-15) break;
  }
  apply(v, tv);
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    num += tv[s];
    den += v[s];
  }
  return {num / den, v};
}

TransferModel doob_chain(const TransferModel& tm) {
  const Perron p = perron(tm);
  const TransferModel* src = &tm;
  return TransferModel(tm.grammar(), tm.memory(), [src, &p](std::span<const Symbol> state, Symbol a) {
    const std::size_t s = src->state_index(state);
    const long t = src->next(s, a);
    if (t < 0) return 0.0;
    return src->weight(s, a) * p.right[static_cast<std::size_t>(t)] / (p.eigenvalue * p.right[s]);
  });
}

double two_sided_conditional(const TransferModel& tm, Site l, Site m, std::span<const Symbol> interior,
                             const Word& left, const Word& right) {
  if (m < l) return 1.0;
  const std::size_t M = static_cast<std::size_t>(tm.memory());
  if (left.size() < M || right.size() < M)
    throw InadmissibleContext("contexts must cover the memory " + std::to_string(M));
  if (left.end() != l || right.start != m + 1) throw InadmissibleContext("contexts do not abut the interval");
  if (!tm.grammar().admissible(left.symbols) || !tm.grammar().admissible(right.symbols))
    throw InadmissibleContext("context violates the grammar");
  const SitePatch patch{left, l, m, right};
  auto path_weight = [&](const std::vector<Symbol>& x) {
    // walk from the last M symbols of the left context through x and right
    std::vector<Symbol> seq(left.symbols.end() - static_cast<std::ptrdiff_t>(M), left.symbols.end());
    seq.insert(seq.end(), x.begin(), x.end());
    seq.insert(seq.end(), right.symbols.begin(), right.symbols.end());
    double w = 1.0;
    std::size_t state = tm.state_index(std::span<const Symbol>(seq).first(M));
    for (std::size_t t = M; t < seq.size(); ++t) {
      const long nx = tm.next(state, seq[t]);
      if (nx < 0) return 0.0;
      w *= tm.weight(state, seq[t]);
      state = static_cast<std::size_t>(nx);
    }
    return w;
  };
  std::vector<double> all;
  double target = 0.0;
  const std::vector<Symbol> want(interior.begin(), interior.end());
  for (const auto& w : enumerate_interior(tm.grammar(), patch)) {
    const double x = path_weight(w.symbols);
    all.push_back(x);
    if (w.symbols == want) target = x;
  }
  const double total = pairwise_sum(all);
  if (total == 0.0) throw InadmissibleContext("no interior has positive weight between these contexts");
  return target / total;
}

std::vector<double> finite_volume_gibbs(const std::function<double(const Word& configuration)>& weight,
                                        const Grammar& g, const SitePatch& patch, std::size_t budget) {
  const double count = std::pow(static_cast<double>(g.alphabet_size()), static_cast<double>(patch.interior_size()));
  if (count > static_cast<double>(budget))
    throw BudgetExceeded("volume of " + std::to_string(patch.interior_size()) + " sites exceeds the budget");
  std::vector<double> w;
  for (const auto& x : enumerate_interior(g, patch)) w.push_back(weight(patch.compose(x.symbols)));
  const double total = pairwise_sum(w);
  if (!(total > 0.0)) throw ZeroDenominator("all interior weights vanish");
  for (double& x : w) x /= total;
  return w;
}

TransferModel ising_transfer(double beta, double field, const std::vector<double>& weights, const Grammar& g) {
  if (g.alphabet_size() != 2) throw ConfigError("the Ising transfer model needs two symbols");
  std::vector<double> lam = weights.empty() ? std::vector<double>{1.0, 1.0} : weights;
  return TransferModel(g, std::max(1, g.order()), [=](std::span<const Symbol> state, Symbol a) {
    const double s = state.back() == 0 ? -1.0 : 1.0;
    const double x = a == 0 ? -1.0 : 1.0;
    return lam[static_cast<std::size_t>(a)] * std::exp(beta * s * x + field * x);
  });
}

std::vector<Envelope> spread_trace(const SpecFamily& s, std::span<const Site> event_sites,
                                   const std::vector<std::vector<Symbol>>& event_words,
                                   const std::vector<std::pair<Site, Site>>& volumes, const BoundarySet& probes,
                                   const Word* fixed_left) {
  const int r = s.max_reach();
  const Symbol filler = s.grammar().free_symbol().value_or(0);
  std::vector<Envelope> out;
  for (const auto& [lo, hi] : volumes) {
    std::vector<Site> vol;
    for (Site i = lo; i <= hi; ++i) vol.push_back(i);
    Word base(lo - r, std::vector<Symbol>(static_cast<std::size_t>(hi - lo + 1 + 2 * r), filler));
    if (fixed_left) base = concat(fixed_left->slice(fixed_left->start, lo - 1), base.slice(lo, hi + r));
    out.push_back(volume_envelope(s, base, vol, event_sites, event_words, fixed_left == nullptr, true, probes));
  }
  return out;
}

bool envelopes_monotone(const std::vector<Envelope>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double slack = 8.0 * DBL_EPSILON;
    if (trace[k].sup > trace[k - 1].sup + slack) return false;
    if (trace[k].inf < trace[k - 1].inf - slack) return false;
  }
  return true;
}

}  // namespace chainspec
