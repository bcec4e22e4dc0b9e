#include "chainspec/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "chainspec/checks.hpp"
#include "chainspec/errors.hpp"
#include "chainspec/model.hpp"
#include "chainspec/rates.hpp"

namespace chainspec {

namespace {

std::string g17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string g10(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string quote(const std::string& s) {
  const bool plain = !s.empty() && s.find_first_of(" \t\"\\=") == std::string::npos;
  if (plain) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Record& Record::text(const std::string& key, const std::string& value) {
  fields_.push_back({key, key + "=" + quote(value), key + " " + value});
  return *this;
}

Record& Record::integer(const std::string& key, long long value) {
  const std::string v = std::to_string(value);
  fields_.push_back({key, key + "=" + v, key + " " + v});
  return *this;
}

Record& Record::flag(const std::string& key, bool value) {
  const std::string v = value ? "true" : "false";
  fields_.push_back({key, key + "=" + v, key + " " + v});
  return *this;
}

Record& Record::exact(const std::string& key, double value) {
  fields_.push_back({key, key + "=" + g17(value) + " " + key + ".radius=exact", key + " " + g10(value)});
  return *this;
}

Record& Record::real(const std::string& key, double value, double radius, bool sampled) {
  if (radius == 0.0 && !sampled) return exact(key, value);
  std::string m = key + "=" + g17(value) + " " + key + ".radius=" + g17(radius);
  std::string h = key + " " + g10(value) + " +/- " + g10(radius);
  if (sampled) {
    m += " " + key + ".sampled=true";
    h += " (sampled)";
  }
  fields_.push_back({key, m, h});
  return *this;
}

Record& Record::certified(const std::string& key, const CertifiedValue& v) {
  real(key, v.value, v.radius, v.sampled);
  if (v.n_used > 0) integer(key + ".n", v.n_used);
  return *this;
}

std::string Record::machine() const {
  std::string out = "record=" + type_;
  for (const auto& f : fields_) out += " " + f.machine;
  return out;
}

std::string Record::human() const {
  std::string out = type_ + ":";
  for (std::size_t i = 0; i < fields_.size(); ++i) out += (i ? ", " : " ") + fields_[i].human;
  return out;
}

namespace {

class Inapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string model_path;
  std::string format = "text";
  std::optional<double> tolerance, target;
  std::optional<int> n_max, k_max;
  std::optional<std::size_t> budget, probes;
  std::optional<std::uint64_t> seed;
  // command-specific
  std::string past, word, window, sites = "0";
  long long site = 0, start = 0;
  bool has_start = false;
  int length = 1;
};

struct Context {
  Options opt;
  std::optional<Model> loaded;
  std::deque<Record> records;  // stable references while appending
  int status = kExitPass;

  Model& model() { return *loaded; }
  const Model& model() const { return *loaded; }
  Record& add(const std::string& type) { return records.emplace_back(type); }
  void fail() { status = std::max(status, kExitFail); }
  const Settings& settings() const { return loaded->settings; }
  const Alphabet& alphabet() const { return loaded->alphabet; }
  std::string fmt(std::span<const Symbol> w) const { return w.empty() ? "-" : loaded->alphabet.format_word(w); }
};

// ---- sides ----------------------------------------------------------------

std::shared_ptr<const LisFamily> lis_side(Context& ctx, std::string& side) {
  if (ctx.model().lis) {
    side = "native";
    return ctx.model().lis;
  }
  side = "c(spec)";
  return spec_induced_lis(ctx.model().gibbs, ctx.settings());
}

std::shared_ptr<const SpecFamily> spec_side(Context& ctx, std::string& side) {
  if (ctx.model().gibbs) {
    side = "native";
    return ctx.model().gibbs;
  }
  if (ctx.model().lis->required_depth() == 0 && ctx.model().lis->profile().memory() < 0)
    throw Inapplicable("a " + ctx.model().spec.kind +
                       " model induces an infinite-range b(f); spec-side commands need finite range");
  side = "b(lis)";
  return lis_induced_spec(ctx.model().lis);
}

// ---- probes -----------------------------------------------------------------

std::vector<Word> admissible_words(const Grammar& g, Site lo, std::size_t len, std::size_t limit,
                                   std::size_t probes, std::uint64_t seed) {
  std::vector<Word> out;
  if (len == 0) return {Word(lo, {})};
  if (ipow(g.alphabet_size(), len) <= limit) {
    std::vector<Site> sites;
    for (std::size_t t = 0; t < len; ++t) sites.push_back(lo + static_cast<Site>(t));
    for (auto& f : enumerate_fillings(g, Word(lo, std::vector<Symbol>(len, 0)), sites)) out.emplace_back(lo, f);
    return out;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < probes; ++t) out.push_back(random_admissible_word(g, lo, len, rng));
  return out;
}

Word parse_at(const Context& ctx, const std::string& text, Site start) {
  Word w(start, ctx.alphabet().parse_word(text));
  if (!ctx.model().grammar.admissible(w.symbols)) throw InadmissibleWord("'" + text + "' violates the grammar");
  return w;
}

std::vector<Site> parse_sites(const std::string& text) {
  std::vector<Site> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--sites: '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw ConfigError("--sites: empty site list");
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw ConfigError("--sites: repeated site");
  return out;
}

int past_depth(const LisFamily& f) { return f.required_depth() > 0 ? f.required_depth() : 4; }

void compare(Context& ctx, Record& r, const CertifiedValue& v, double oracle) {
  const double diff = std::fabs(v.value - oracle);
  const bool ok = diff <= v.radius + ctx.settings().composed_tol;
  r.exact("oracle", oracle).exact("diff", diff).flag("pass", ok);
  if (!ok) ctx.fail();
}

// ---- commands -----------------------------------------------------------------

void cmd_eval_lis(Context& ctx) {
  std::string side;
  const auto f = lis_side(ctx, side);
  ctx.add("side").text("lis", side).text("profile", f->profile().describe());
  const Site i = ctx.opt.site;
  const int D = past_depth(*f);
  std::vector<Word> pasts;
  if (!ctx.opt.past.empty()) {
    const auto sym = ctx.alphabet().parse_word(ctx.opt.past);
    pasts.push_back(parse_at(ctx, ctx.opt.past, i - static_cast<Site>(sym.size())));
  } else {
    pasts = admissible_words(f->grammar(), i - D, static_cast<std::size_t>(D), 256, ctx.settings().probes,
                             ctx.settings().seed);
  }
  const auto& chain = ctx.model().chain;
  for (const Word& past : pasts) {
    std::vector<std::vector<Symbol>> words;
    if (!ctx.opt.word.empty()) {
      words.push_back(ctx.alphabet().parse_word(ctx.opt.word));
    } else {
      for (Symbol a = 0; a < static_cast<Symbol>(ctx.alphabet().size()); ++a) words.push_back({a});
    }
    for (const auto& w : words) {
      const Site m = i + static_cast<Site>(w.size()) - 1;
      const auto v = lis_interval(*f, i, m, w, past);
      auto& r = ctx.add("eval").integer("site", i).text("past", ctx.fmt(past.symbols)).text("word", ctx.fmt(w));
      r.certified("value", v);
      const bool stationary_chain = chain && (ctx.model().lis || ctx.model().gibbs->stationary());
      if (stationary_chain && past.size() >= static_cast<std::size_t>(chain->memory())) {
        const Word path = concat(past.slice(i - chain->memory(), i - 1), Word(i, w));
        compare(ctx, r, v, path_weight(*chain, path));
      }
    }
  }
}

void cmd_eval_spec(Context& ctx) {
  std::string side;
  const auto s = spec_side(ctx, side);
  ctx.add("side").text("spec", side).integer("reach", s->max_reach());
  const Site i = ctx.opt.site;
  const int R = s->max_reach();
  std::vector<Word> windows;
  if (!ctx.opt.window.empty()) {
    windows.push_back(parse_at(ctx, ctx.opt.window, ctx.opt.has_start ? ctx.opt.start : i - R));
    if (!windows.back().covers(i - R, i + R)) throw WindowTooShort("window must cover the reach around the site");
  } else {
    windows = admissible_words(s->grammar(), i - R, static_cast<std::size_t>(2 * R + 1), 1024,
                               ctx.settings().probes, ctx.settings().seed);
  }
  const auto& chain = ctx.model().chain;
  for (const Word& w : windows) {
    const CertifiedValue v{s->gamma(i, w), s->eval_radius(), 0, false};
    auto& r = ctx.add("eval").integer("site", i).integer("start", w.start).text("window", ctx.fmt(w.symbols));
    r.certified("value", v);
    const Site Mc = chain ? chain->memory() : 0;
    if (chain && s->stationary() && w.covers(i - Mc, i + Mc)) {
      const Symbol a = w.at(i);
      compare(ctx, r, v, two_sided_conditional(*chain, i, i, std::span<const Symbol>(&a, 1), w.slice(i - Mc, i - 1),
                                               w.slice(i + 1, i + Mc)));
    }
  }
}

void cmd_lis_to_spec(Context& ctx) {
  std::string side;
  const auto f = lis_side(ctx, side);
  const auto sites = parse_sites(ctx.opt.sites);
  const Site l = sites.front(), m = sites.back();
  const Settings& st = ctx.settings();
  if (!f->profile().summable())
    throw TailNotSummable("profile " + f->profile().describe() + " cannot certify any radius");
  Site n = m;
  while (future_tail(*f, sites, n) > st.target) {
    if (n - m >= st.n_max) throw TailNotSummable("tail bound still above target at n_max");
    ++n;
  }
  ctx.add("side").text("lis", side).integer("n", n);
  const int D = past_depth(*f);
  std::vector<Word> windows;
  if (!ctx.opt.window.empty()) {
    windows.push_back(parse_at(ctx, ctx.opt.window, ctx.opt.has_start ? ctx.opt.start : l - D));
  } else {
    windows = admissible_words(f->grammar(), l - D, static_cast<std::size_t>(n - l + 1 + D), 1024, st.probes, st.seed);
  }
  for (const Word& w : windows) {
    std::vector<Symbol> interior;
    for (Site x : sites) interior.push_back(w.at(x));
    const auto v = lis_to_spec(*f, sites, interior, w, st.target, st.n_max);
    auto& r = ctx.add("conditional").text("sites", ctx.opt.sites).integer("start", w.start);
    r.text("window", ctx.fmt(w.symbols)).certified("value", v);
    if (ctx.model().gibbs) {
      const int R = ctx.model().gibbs->max_reach();
      if (w.covers(l - R, m + R)) compare(ctx, r, v, gamma_volume(*ctx.model().gibbs, sites, interior, w));
    } else if (ctx.model().chain) {
      std::vector<double> terms;
      for (const auto& fill : enumerate_fillings(f->grammar(), w, sites)) {
        Word u = w;
        for (std::size_t t = 0; t < sites.size(); ++t) u.at(sites[t]) = fill[t];
        terms.push_back(path_weight(*ctx.model().chain, u));
      }
      compare(ctx, r, v, path_weight(*ctx.model().chain, w) / pairwise_sum(terms));
    }
  }
}

void cmd_spec_to_lis(Context& ctx) {
  std::string side;
  const auto s = spec_side(ctx, side);
  const Settings& st = ctx.settings();
  const auto& chain = ctx.model().chain;
  const int R = std::max({s->max_reach(), chain ? chain->memory() : 0, 1});
  const int L = ctx.opt.length;
  if (L < 1) throw ConfigError("--length must be positive");
  ctx.add("side").text("spec", side).integer("reach", s->max_reach());
  std::vector<Word> pasts;
  if (!ctx.opt.past.empty()) {
    const auto sym = ctx.alphabet().parse_word(ctx.opt.past);
    pasts.push_back(parse_at(ctx, ctx.opt.past, -static_cast<Site>(sym.size())));
  } else {
    pasts = admissible_words(s->grammar(), -R, static_cast<std::size_t>(R), 64, st.probes, st.seed);
  }
  std::vector<Site> sites;
  for (Site t = 0; t < L; ++t) sites.push_back(t);
  for (const Word& past : pasts) {
    const Word blank = concat(past, Word(0, std::vector<Symbol>(static_cast<std::size_t>(L), 0)));
    for (const auto& word : enumerate_fillings(s->grammar(), blank, sites)) {
      const auto v = spec_to_lis(*s, 0, L - 1, {word}, past, st.target, st.k_max, st.boundary());
      auto& r = ctx.add("transition").text("past", ctx.fmt(past.symbols)).text("word", ctx.fmt(word));
      r.certified("value", v);
      if (chain && s->stationary() && past.size() >= static_cast<std::size_t>(chain->memory()))
        compare(ctx, r, v, path_weight(*chain, concat(past.slice(-chain->memory(), -1), Word(0, word))));
    }
  }
}

void emit_roundtrip(Context& ctx, const std::string& which, const RoundtripReport& rep) {
  for (const auto& p : rep.probes) {
    auto& r = ctx.add("probe").text("map", which).text("label", p.label).exact("original", p.original);
    r.real("recovered", p.recovered, p.radius).exact("discrepancy", p.discrepancy()).flag("pass", p.pass);
  }
  ctx.add("roundtrip")
      .text("map", which)
      .integer("probes", static_cast<long long>(rep.probes.size()))
      .exact("max_discrepancy", rep.max_discrepancy)
      .exact("max_radius", rep.max_radius)
      .flag("pass", rep.pass);
  if (!rep.pass) ctx.fail();
}

void cmd_roundtrip(Context& ctx) {
  bool any = false;
  if (ctx.model().lis) {
    if (ctx.model().lis->profile().memory() < 0)
      throw Inapplicable("c(b(f)) needs a finite-range b(f); the " + ctx.model().spec.kind +
                         " model has a tail profile");
    emit_roundtrip(ctx, "c(b(f))", roundtrip_cb(ctx.model().lis, ctx.settings()));
    any = true;
  }
  if (ctx.model().gibbs) {
    emit_roundtrip(ctx, "b(c(gamma))", roundtrip_bc(ctx.model().gibbs, ctx.settings()));
    any = true;
  }
  if (!any) throw Inapplicable("model has no family");
}

void emit_check(Context& ctx, const std::function<Check()>& fn) {
  try {
    const Check c = fn();
    auto& r = ctx.add("check").text("name", c.name).flag("pass", c.pass).integer("probes", static_cast<long long>(c.probes));
    r.exact("worst", c.worst).exact("tolerance", c.tolerance);
    if (!c.detail.empty()) r.text("detail", c.detail);
    if (!c.pass) ctx.fail();
  } catch (const Error& e) {
    ctx.add("check").text("error", e.kind()).text("message", e.what());
    ctx.status = std::max(ctx.status, kExitInput);
  }
}

void spec_identity_checks(Context& ctx, const SpecFamily& s) {
  const Settings& st = ctx.settings();
  const double tol = st.composed_tol;
  if (ctx.model().weight && s.stationary())
    emit_check(ctx, [&] { return check_volume_oracle(s, ctx.model().weight, ctx.model().weight_context, 6, tol); });
  emit_check(ctx, [&] { return check_order_independence(s, 20, 20, tol, st.seed); });
  emit_check(ctx, [&] { return check_union_identity(s, 100, tol, st.seed); });
  emit_check(ctx, [&] { return check_volume_normalization(s, 100, tol, st.seed); });
  emit_check(ctx, [&] { return check_singleton_absorption(s, 100, tol, st.seed); });
  emit_check(ctx, [&] { return check_consistency(s, 20, tol, st.seed); });
  emit_check(ctx, [&] { return check_order_consistency(s, 100, st.seed); });
}

void cmd_reconstruct(Context& ctx) {
  std::string side;
  const auto s = spec_side(ctx, side);
  ctx.add("side").text("spec", side).integer("reach", s->max_reach());
  spec_identity_checks(ctx, *s);
}

void emit_criteria(Context& ctx, const std::string& side, const std::vector<CriterionResult>& results) {
  for (const auto& c : results) {
    auto& r = ctx.add("criterion").text("side", side).text("name", c.name).text("verdict", to_string(c.verdict));
    r.real("margin", c.margin, 0.0, c.sampled);
    if (!c.detail.empty()) r.text("detail", c.detail);
  }
}

void cmd_criteria(Context& ctx) {
  if (ctx.model().lis) emit_criteria(ctx, "lis", lis_criteria(*ctx.model().lis, ctx.settings()));
  if (ctx.model().gibbs) emit_criteria(ctx, "spec", spec_criteria(*ctx.model().gibbs, ctx.settings()));
}

void emit_rate_check(Context& ctx, const RateCheck& rc) {
  auto& r = ctx.add("rate-check").text("case", rc.label);
  r.certified("bound", rc.bound).certified("measured", rc.measured);
  r.integer("probes", static_cast<long long>(rc.probes)).flag("pass", rc.pass);
  if (!rc.pass) ctx.fail();
}

void cmd_rates(Context& ctx) {
  const Settings& st = ctx.settings();
  const BoundarySet set = st.boundary();
  if (const auto& f = ctx.model().lis) {
    const int D = default_depth(*f, st.budget);
    auto& head = ctx.add("lis").text("profile", f->profile().describe()).integer("depth", D);
    head.real("c_min", f->c_min(), 0.0);
    for (int k = 0; k <= std::min(D, 8); ++k) ctx.add("var").integer("k", k).certified("value", var_k(*f, 0, k, D, set));
    const auto sites = f->probe_sites();
    const auto mat = dobrushin_matrix(*f, sites, D, set);
    for (const auto& row : mat.rows) {
      for (const auto& [j, cv] : row.entries)
        if (cv.value != 0.0 || cv.radius != 0.0)
          ctx.add("dobrushin").text("side", "lis").integer("i", row.site).integer("j", j).certified("value", cv);
      ctx.add("dobrushin-row").text("side", "lis").integer("i", row.site).exact("sum", row.sum())
          .exact("upper", row.upper()).exact("tail", row.tail);
    }
    const Site lam[] = {0};
    for (Site k = 1; k <= 6; ++k)
      ctx.add("oscillation").text("side", "lis").integer("k", k).text("set", "0").certified("sup_ratio",
                                                                                             sup_ratio(*f, k, lam, D, set));
    if (f->profile().summable()) {
      emit_rate_check(ctx, rate_check_future(f, 0, 0, 2, st));
      emit_rate_check(ctx, rate_check_past(f, 0, 0, -2, st));
      emit_rate_check(ctx, rate_check_chain(f, 0, 0, -2, st));
    } else {
      ctx.add("rate-check").text("case", "all").text("status", "Inapplicable").text("reason", "tail profile not summable");
    }
  }
  if (const auto& s = ctx.model().gibbs) {
    ctx.add("spec").integer("reach", s->max_reach());
    const auto sites = s->probe_sites();
    const auto mat = dobrushin_matrix(*s, sites, set);
    for (const auto& row : mat.rows) {
      for (const auto& [j, cv] : row.entries)
        if (cv.value != 0.0 || cv.radius != 0.0)
          ctx.add("dobrushin").text("side", "spec").integer("i", row.site).integer("j", j).certified("value", cv);
      ctx.add("dobrushin-row").text("side", "spec").integer("i", row.site).exact("sum", row.sum())
          .exact("upper", row.upper()).exact("tail", row.tail);
    }
    const int R = std::max(s->max_reach(), 1);
    for (Site j = -R - 1; j <= R + 1; ++j) {
      if (j == 0) continue;
      ctx.add("oscillation").text("side", "spec").integer("k", 0).integer("j", j).certified("sup_ratio",
                                                                                          sup_ratio(*s, 0, j, set));
    }
    emit_rate_check(ctx, rate_check_spec(s, 0, 0, -2, st));
  }
}

void cmd_oracle_check(Context& ctx) {
  const Settings& st = ctx.settings();
  const auto& m = ctx.model();
  emit_check(ctx, [&] { return check_enumeration_counts(m.grammar, 12); });
  if (m.chain) emit_check(ctx, [&] { return check_invariant_measure(*m.chain); });
  if (const auto& f = m.lis) {
    emit_check(ctx, [&] { return check_normalization(*f, st.probes, st.identity_tol, st.seed); });
    emit_check(ctx, [&] { return check_factorization(*f, 20, st.identity_tol, st.seed); });
    emit_check(ctx, [&] { return check_grammar_lis(*f, st.seed); });
    if (f->profile().summable()) {
      emit_check(ctx, [&] { return check_ratio_increments(*f, 20, st.identity_tol, st.seed); });
      emit_check(ctx, [&] { return check_radius_monotone(*f, 10, st.seed); });
    }
    if (m.chain) emit_check(ctx, [&] { return check_lis_to_spec_oracle(*f, *m.chain, st); });
  }
  std::shared_ptr<const SpecFamily> s = m.gibbs;
  if (!s && m.lis && m.lis->profile().memory() >= 0) s = lis_induced_spec(m.lis);
  if (s) {
    emit_check(ctx, [&] { return check_normalization(*s, st.probes, st.identity_tol, st.seed); });
    emit_check(ctx, [&] { return check_grammar_spec(*s, st, st.seed); });
    emit_check(ctx, [&] { return check_spread_monotone(*s, 10, st.boundary()); });
    spec_identity_checks(ctx, *s);
    if (m.chain) emit_check(ctx, [&] { return check_spec_to_lis_oracle(*s, *m.chain, st); });
    emit_check(ctx, [&] { return check_global_kernel(*s, st); });
  } else {
    ctx.add("check").text("name", "spec side").text("status", "Inapplicable")
        .text("reason", "infinite-range specification");
  }
}

const std::vector<std::pair<std::string, std::string>>& command_table() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"eval-lis", "evaluate interval kernels f_[i,m](word | past)"},
      {"eval-spec", "evaluate single-site kernels gamma_i(. | window)"},
      {"lis-to-spec", "certified gamma^f_Lambda on windows"},
      {"spec-to-lis", "certified f^gamma_[0,L-1] for every past"},
      {"roundtrip", "c(b(f)) against f and b(c(gamma)) against gamma"},
      {"reconstruct", "volume densities from singletons and their identities"},
      {"criteria", "uniqueness criteria with verdicts and margins"},
      {"rates", "variations, Dobrushin coefficients, oscillations and rate checks"},
      {"oracle-check", "full cross-validation suite"},
  };
  return table;
}

using Handler = void (*)(Context&);

Handler handler_for(const std::string& name) {
  if (name == "eval-lis") return cmd_eval_lis;
  if (name == "eval-spec") return cmd_eval_spec;
  if (name == "lis-to-spec") return cmd_lis_to_spec;
  if (name == "spec-to-lis") return cmd_spec_to_lis;
  if (name == "roundtrip") return cmd_roundtrip;
  if (name == "reconstruct") return cmd_reconstruct;
  if (name == "criteria") return cmd_criteria;
  if (name == "rates") return cmd_rates;
  if (name == "oracle-check") return cmd_oracle_check;
  return nullptr;
}

void apply_flags(const Options& o, Settings& s) {
  if (o.tolerance) {
    if (!(*o.tolerance > 0.0)) throw ConfigError("--tolerance must be positive");
    s.composed_tol = *o.tolerance;
  }
  if (o.target) {
    if (!(*o.target > 0.0)) throw ConfigError("--target must be positive");
    s.target = *o.target;
  }
  if (o.n_max) s.n_max = *o.n_max;
  if (o.k_max) s.k_max = *o.k_max;
  if (o.budget) s.budget = *o.budget;
  if (o.probes) s.probes = *o.probes;
  if (o.seed) s.seed = *o.seed;
  if (s.n_max < 1 || s.k_max < 1) throw ConfigError("--n-max and --k-max must be positive");
  if (s.budget < 1 || s.probes < 1) throw ConfigError("--budget and --probes must be positive");
}

void print(const std::deque<Record>& records, bool machine, std::ostream& out) {
  for (const auto& r : records) out << (machine ? r.machine() : r.human()) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"chainspec: chains and Gibbs specifications on a finite alphabet"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "report format")->check(CLI::IsMember({"text", "machine"}));
  app.add_option("--tolerance", opt.tolerance, "tolerance for oracle comparisons");
  app.add_option("--target", opt.target, "radius requested from limit operations");
  app.add_option("--n-max", opt.n_max, "largest future truncation beyond the volume");
  app.add_option("--k-max", opt.k_max, "largest right extension for spec-to-lis");
  app.add_option("--budget", opt.budget, "exhaustive enumeration budget");
  app.add_option("--probes", opt.probes, "random probes when the budget is exceeded");
  app.add_option("--seed", opt.seed, "seed for sampled probes");
  for (const auto& [name, help] : command_table()) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("model", opt.model_path, "model file")->required();
    const bool lis_like = name == "eval-lis";
    if (lis_like || name == "spec-to-lis") sub->add_option("--past", opt.past, "past word ending before the first site");
    if (lis_like) {
      sub->add_option("--word", opt.word, "word starting at the site");
      sub->add_option("--site", opt.site, "first site");
    }
    if (name == "eval-spec") sub->add_option("--site", opt.site, "site");
    if (name == "eval-spec" || name == "lis-to-spec") {
      sub->add_option("--window", opt.window, "conditioning window");
      sub->add_option("--start", opt.start, "first site of --window")->each([&](const std::string&) {
        opt.has_start = true;
      });
    }
    if (name == "lis-to-spec") sub->add_option("--sites", opt.sites, "comma-separated volume");
    if (name == "spec-to-lis") sub->add_option("--length", opt.length, "interval length");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  for (const auto* sub : app.get_subcommands()) opt.command = sub->get_name();
  const bool machine = opt.format == "machine";

  std::string echo;
  for (const auto& a : args) echo += (echo.empty() ? "" : " ") + a;
  Context ctx{opt, std::nullopt, {}, kExitPass};
  ctx.add("command").text("argv", echo).text("command", opt.command);
  std::string error_kind, error_message;
  try {
    ctx.loaded.emplace(build_model(load_model(opt.model_path)));
    apply_flags(opt, ctx.model().settings);
    const auto& spec = ctx.model().spec;
    ctx.add("model").text("name", spec.name).text("kind", spec.kind).flag("stationary", spec.stationary)
        .integer("symbols", static_cast<long long>(ctx.model().alphabet.size()))
        .integer("grammar_order", ctx.model().grammar.order());
    handler_for(opt.command)(ctx);
  } catch (const Inapplicable& e) {
    error_kind = "Inapplicable";
    error_message = e.what();
  } catch (const Error& e) {
    error_kind = e.kind();
    error_message = e.what();
  }
  int status = ctx.status;
  if (!error_kind.empty()) {
    ctx.add("error").text("kind", error_kind).text("message", error_message);
    status = kExitInput;
    err << "error: " << error_message << '\n';
  }
  const char* names[] = {"pass", "fail", "input-error"};
  ctx.add("summary").text("command", opt.command).text("status", names[status]).integer("exit", status);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char clock[32];
  std::snprintf(clock, sizeof clock, "%.6f", secs);
  ctx.add("wall_clock").text("seconds", clock);
  print(ctx.records, machine, out);
  return status;
}

}  // namespace chainspec
