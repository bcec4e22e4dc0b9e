#include "chainspec/model.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chainspec/checks.hpp"
#include "chainspec/errors.hpp"

namespace chainspec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double number(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw ConfigError("field '" + field + "': '" + t + "' is not a finite number");
  return v;
}

long integer(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) throw ConfigError("field '" + field + "': '" + t + "' is not an integer");
  return v;
}

std::vector<double> numbers(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& t : tokens(text)) out.push_back(number(field, t));
  return out;
}

}  // namespace

const std::string* ModelSpec::parameter(const std::string& key) const {
  for (const auto& kv : parameters)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

ModelSpec parse_model(const std::string& text, const std::string& source) {
  ModelSpec spec;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  std::set<std::string> seen;
  auto fail = [&](const std::string& msg) -> ConfigError {
    return ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  bool have_kind = false, have_symbols = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known{"model", "alphabet", "grammar", "parameters", "tolerances"};
      if (!known.count(section)) throw fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (section.empty()) throw fail("key '" + key + "' outside any section");
    if (key.empty()) throw fail("empty key");
    const std::string field = section + "." + key;
    if (!seen.insert(field).second) throw fail("duplicate field '" + field + "'");
    if (section == "model") {
      if (key == "name") spec.name = value;
      else if (key == "kind") {
        static const std::set<std::string> kinds{"markov-chain", "ising-spec", "iid", "renewal-g", "custom-table"};
        if (!kinds.count(value)) throw fail("unknown kind '" + value + "'");
        spec.kind = value;
        have_kind = true;
      } else if (key == "stationary") {
        if (value != "true" && value != "false") throw fail("stationary must be true or false");
        spec.stationary = value == "true";
      } else throw fail("unknown field '" + field + "'");
    } else if (section == "alphabet") {
      if (key != "symbols") throw fail("unknown field '" + field + "'");
      spec.symbols = tokens(value);
      if (spec.symbols.empty()) throw fail("empty alphabet");
      have_symbols = true;
    } else if (section == "grammar") {
      if (key == "order") {
        try {
          spec.grammar_order = static_cast<int>(integer(field, value));
        } catch (const ConfigError& e) {
          throw fail(e.what());
        }
        if (spec.grammar_order < 0) throw fail("grammar order must be nonnegative");
      } else if (key == "forbidden") {
        for (const auto& w : split(value, ','))
          if (!w.empty()) spec.forbidden.push_back(w);
      } else throw fail("unknown field '" + field + "'");
    } else if (section == "parameters") {
      spec.parameters.emplace_back(key, value);
    } else {
      spec.tolerances.emplace_back(key, value);
    }
  }
  if (!have_kind) throw ConfigError(source + ": missing field 'model.kind'");
  if (!have_symbols) throw ConfigError(source + ": missing field 'alphabet.symbols'");
  return spec;
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

std::string serialize_model(const ModelSpec& spec) {
  std::ostringstream out;
  out << "[model]\n";
  if (!spec.name.empty()) out << "name = " << spec.name << "\n";
  out << "kind = " << spec.kind << "\n";
  out << "stationary = " << (spec.stationary ? "true" : "false") << "\n\n";
  out << "[alphabet]\nsymbols =";
  for (const auto& s : spec.symbols) out << " " << s;
  out << "\n\n[grammar]\norder = " << spec.grammar_order << "\n";
  if (!spec.forbidden.empty()) {
    out << "forbidden = ";
    for (std::size_t i = 0; i < spec.forbidden.size(); ++i) out << (i ? ", " : "") << spec.forbidden[i];
    out << "\n";
  }
  if (!spec.parameters.empty()) {
    out << "\n[parameters]\n";
    for (const auto& [k, v] : spec.parameters) out << k << " = " << v << "\n";
  }
  if (!spec.tolerances.empty()) {
    out << "\n[tolerances]\n";
    for (const auto& [k, v] : spec.tolerances) out << k << " = " << v << "\n";
  }
  return out.str();
}

void apply_tolerances(const KeyValues& kv, Settings& s) {
  for (const auto& [k, v] : kv) {
    const std::string field = "tolerances." + k;
    if (k == "identity") s.identity_tol = number(field, v);
    else if (k == "composed") s.composed_tol = number(field, v);
    else if (k == "target") s.target = number(field, v);
    else if (k == "n_max") s.n_max = static_cast<int>(integer(field, v));
    else if (k == "k_max") s.k_max = static_cast<int>(integer(field, v));
    else if (k == "budget") s.budget = static_cast<std::size_t>(integer(field, v));
    else if (k == "probes") s.probes = static_cast<std::size_t>(integer(field, v));
    else if (k == "seed") s.seed = static_cast<std::uint64_t>(integer(field, v));
    else throw ConfigError("unknown field '" + field + "'");
  }
  if (!(s.target > 0.0)) throw ConfigError("field 'tolerances.target' must be positive");
  if (s.k_max < 1 || s.n_max < 0) throw ConfigError("k_max must be >= 1 and n_max >= 0");
}

namespace {

const std::string& require(const ModelSpec& spec, const std::string& key) {
  const std::string* v = spec.parameter(key);
  if (!v) throw ConfigError("missing field 'parameters." + key + "'");
  return *v;
}

void check_keys(const ModelSpec& spec, const std::set<std::string>& allowed, const std::string& prefix_ok = "") {
  for (const auto& kv : spec.parameters) {
    if (allowed.count(kv.first)) continue;
    if (!prefix_ok.empty() && kv.first.rfind(prefix_ok, 0) == 0) continue;
    throw ConfigError("unknown field 'parameters." + kv.first + "' for kind " + spec.kind);
  }
}

// One row of transition probabilities indexed by symbol.
std::vector<double> probability_row(const std::string& field, const std::string& text, std::size_t q) {
  auto row = numbers(field, text);
  if (row.size() != q)
    throw ConfigError("field '" + field + "': expected " + std::to_string(q) + " entries, got " +
                      std::to_string(row.size()));
  double sum = 0.0;
  for (double x : row) {
    if (x < 0.0 || x > 1.0) throw ConfigError("field '" + field + "': entries must lie in [0, 1]");
    sum += x;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw ConfigError("field '" + field + "': entries sum to " + std::to_string(sum));
  return row;
}

// Rejects positive probability on transitions the grammar forbids.
void check_row_grammar(const std::string& field, const Grammar& g, std::span<const Symbol> ctx,
                       const std::vector<double>& row) {
  std::vector<Symbol> buf(ctx.begin(), ctx.end());
  buf.push_back(0);
  const std::size_t m = static_cast<std::size_t>(g.order());
  for (std::size_t a = 0; a < row.size(); ++a) {
    buf.back() = static_cast<Symbol>(a);
    const auto tail = std::span<const Symbol>(buf).last(std::min(buf.size(), m + 1));
    if (row[a] > 0.0 && !g.admissible(tail))
      throw ConfigError("field '" + field + "': positive probability on a forbidden transition");
  }
}

bool compact(const Alphabet& a) {
  for (const auto& l : a.labels())
    if (l.size() != 1) return false;
  return true;
}

std::string context_key(const Alphabet& a, std::span<const Symbol> ctx) {
  std::string out;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i && !compact(a)) out += '_';
    out += a.label(ctx[i]);
  }
  return out;
}

}  // namespace

Model build_model(const ModelSpec& spec) {
  Alphabet alphabet(spec.symbols);
  const std::size_t q = alphabet.size();
  std::vector<std::vector<Symbol>> forbidden;
  for (const auto& w : spec.forbidden) {
    std::vector<Symbol> word;
    try {
      word = alphabet.parse_word(w);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("field 'grammar.forbidden': ") + e.what());
    }
    forbidden.push_back(std::move(word));
  }
  Grammar grammar = [&] {
    try {
      return Grammar::from_forbidden(q, spec.grammar_order, forbidden);
    } catch (const GrammarError& e) {
      throw ConfigError(std::string("field 'grammar.forbidden': ") + e.what());
    }
  }();

  Settings settings;
  apply_tolerances(spec.tolerances, settings);
  Model model{spec, alphabet, grammar, settings, nullptr, nullptr, std::nullopt, std::nullopt, {}, 0};

  if (spec.kind == "markov-chain") {
    check_keys(spec, {"matrix"});
    const auto rows = split(require(spec, "matrix"), ';');
    if (rows.size() != q)
      throw ConfigError("field 'parameters.matrix': expected " + std::to_string(q) + " rows, got " +
                        std::to_string(rows.size()));
    std::vector<std::vector<double>> P;
    for (std::size_t s = 0; s < q; ++s) {
      const std::string field = "parameters.matrix row " + std::to_string(s + 1);
      P.push_back(probability_row(field, rows[s], q));
      const Symbol ctx[1] = {static_cast<Symbol>(s)};
      if (grammar.admissible(ctx)) check_row_grammar(field, grammar, ctx, P.back());
    }
    if (grammar.order() > 1) throw ConfigError("field 'grammar.order': a one-step chain needs order <= 1");
    GSingleton g;
    g.memory = TailProfile::exact(1);
    g.eval = [P](Site, std::span<const Symbol> past, Symbol a) {
      return P[static_cast<std::size_t>(past.back())][static_cast<std::size_t>(a)];
    };
    model.lis = std::make_shared<LisFamily>(alphabet, grammar, g, spec.stationary);
    model.transfer.emplace(grammar, 1, [P](std::span<const Symbol> st, Symbol a) {
      return P[static_cast<std::size_t>(st.back())][static_cast<std::size_t>(a)];
    });
    model.chain = model.transfer;
  } else if (spec.kind == "custom-table") {
    check_keys(spec, {"order"}, "row.");
    const long M = integer("parameters.order", require(spec, "order"));
    if (M < 1 || M > 12) throw ConfigError("field 'parameters.order': memory must lie in 1..12");
    if (grammar.order() > M) throw ConfigError("field 'grammar.order': must not exceed the table order");
    auto table = std::make_shared<std::map<std::vector<Symbol>, std::vector<double>>>();
    for (auto& ctx : enumerate_interior(grammar, SitePatch{Word(), 0, static_cast<Site>(M) - 1, Word()})) {
      const std::string key = "row." + context_key(alphabet, ctx.symbols);
      const std::string* v = spec.parameter(key);
      if (!v) throw ConfigError("missing field 'parameters." + key + "'");
      auto row = probability_row("parameters." + key, *v, q);
      check_row_grammar("parameters." + key, grammar, ctx.symbols, row);
      table->emplace(ctx.symbols, std::move(row));
    }
    if (table->size() != spec.parameters.size() - 1)
      throw ConfigError("field 'parameters': rows given for inadmissible contexts");
    GSingleton g;
    g.memory = TailProfile::exact(static_cast<int>(M));
    g.eval = [table, M](Site, std::span<const Symbol> past, Symbol a) {
      const std::vector<Symbol> ctx(past.end() - M, past.end());
      return table->at(ctx)[static_cast<std::size_t>(a)];
    };
    model.lis = std::make_shared<LisFamily>(alphabet, grammar, g, spec.stationary);
    model.transfer.emplace(grammar, static_cast<int>(M), [table](std::span<const Symbol> st, Symbol a) {
      return table->at(std::vector<Symbol>(st.begin(), st.end()))[static_cast<std::size_t>(a)];
    });
    model.chain = model.transfer;
  } else if (spec.kind == "iid") {
    check_keys(spec, {"p"});
    if (!grammar.is_full_shift()) throw ConfigError("field 'grammar.forbidden': iid models need the full shift");
    const auto p = probability_row("parameters.p", require(spec, "p"), q);
    for (double x : p)
      if (x <= 0.0) throw ConfigError("field 'parameters.p': probabilities must be positive");
    GSingleton g;
    g.memory = TailProfile::exact(0);
    g.eval = [p](Site, std::span<const Symbol>, Symbol a) { return p[static_cast<std::size_t>(a)]; };
    model.lis = std::make_shared<LisFamily>(alphabet, grammar, g, spec.stationary);
    RhoSingleton r;
    r.range = 0;
    r.eval = [p](const Word& w, Site i) { return p[static_cast<std::size_t>(w.at(i))]; };
    model.gibbs = std::make_shared<SpecFamily>(alphabet, grammar, r, std::vector<double>{}, spec.stationary);
    model.transfer.emplace(grammar, 0, [p](std::span<const Symbol>, Symbol a) { return p[static_cast<std::size_t>(a)]; });
    model.chain = model.transfer;
  } else if (spec.kind == "renewal-g") {
    check_keys(spec, {"p_inf", "amplitude", "ratio", "exponent"});
    if (q != 2) throw ConfigError("field 'alphabet.symbols': renewal models need two symbols");
    if (!grammar.is_full_shift()) throw ConfigError("field 'grammar.forbidden': renewal models need the full shift");
    const double p_inf = number("parameters.p_inf", require(spec, "p_inf"));
    const double amp = number("parameters.amplitude", require(spec, "amplitude"));
    const std::string* ratio = spec.parameter("ratio");
    const std::string* expo = spec.parameter("exponent");
    if ((ratio == nullptr) == (expo == nullptr))
      throw ConfigError("missing field 'parameters.ratio' (or 'parameters.exponent', exactly one of them)");
    if (p_inf <= 0.0 || amp < 0.0 || p_inf + amp >= 1.0)
      throw ConfigError("field 'parameters.amplitude': need 0 < p_inf and p_inf + amplitude < 1");
    GSingleton g;
    if (ratio) {
      const double rr = number("parameters.ratio", *ratio);
      if (!(rr > 0.0 && rr < 1.0)) throw ConfigError("field 'parameters.ratio': must lie in (0, 1)");
      g.memory = TailProfile::geometric(amp, 1.0 / rr);
      g.eval = [p_inf, amp, rr](Site, std::span<const Symbol> past, Symbol a) {
        std::size_t run = 0;
        while (run < past.size() && past[past.size() - 1 - run] == 1) ++run;
        const double up = p_inf + amp * std::pow(rr, static_cast<double>(run));
        return a == 1 ? up : 1.0 - up;
      };
    } else {
      const double e = number("parameters.exponent", *expo);
      if (!(e > 0.0)) throw ConfigError("field 'parameters.exponent': must be positive");
      g.memory = TailProfile::power(amp, e);
      g.eval = [p_inf, amp, e](Site, std::span<const Symbol> past, Symbol a) {
        std::size_t run = 0;
        while (run < past.size() && past[past.size() - 1 - run] == 1) ++run;
        const double up = p_inf + amp * std::pow(static_cast<double>(run) + 1.0, -e);
        return a == 1 ? up : 1.0 - up;
      };
    }
    model.lis = std::make_shared<LisFamily>(alphabet, grammar, g, spec.stationary);
  } else if (spec.kind == "ising-spec") {
    check_keys(spec, {"beta", "field", "weights", "perturb.site", "perturb.symbol", "perturb.factor"});
    if (q != 2) throw ConfigError("field 'alphabet.symbols': Ising models need two symbols");
    if (grammar.order() > 1) throw ConfigError("field 'grammar.order': Ising models support order <= 1");
    const double beta = number("parameters.beta", require(spec, "beta"));
    const double h = spec.parameter("field") ? number("parameters.field", *spec.parameter("field")) : 0.0;
    std::vector<double> lam{1.0, 1.0};
    if (const auto* w = spec.parameter("weights")) {
      lam = numbers("parameters.weights", *w);
      if (lam.size() != 2) throw ConfigError("field 'parameters.weights': expected 2 entries");
      for (double x : lam)
        if (!(x > 0.0)) throw ConfigError("field 'parameters.weights': weights must be positive");
    }
    const Grammar gr = grammar;
    auto rho_fn = [beta, h, lam, gr](const Word& w, Site i) {
      auto spin = [](Symbol s) { return s == 0 ? -1.0 : 1.0; };
      const double local = beta * (spin(w.at(i - 1)) + spin(w.at(i + 1))) + h;
      double z = 0.0;
      Word probe = w;
      for (Symbol a = 0; a < 2; ++a) {
        probe.at(i) = a;
        if (gr.order() > 0 && !gr.admissible(probe.view(i - 1, i + 1))) continue;
        z += lam[static_cast<std::size_t>(a)] * std::exp(spin(a) * local);
      }
      return std::exp(spin(w.at(i)) * local) / z;
    };
    RhoSingleton r;
    r.range = 1;
    r.eval = rho_fn;
    auto fam = std::make_shared<SpecFamily>(alphabet, grammar, r, lam, spec.stationary);
    if (spec.parameter("perturb.site") || spec.parameter("perturb.symbol") || spec.parameter("perturb.factor")) {
      const Site site = integer("parameters.perturb.site", require(spec, "perturb.site"));
      Symbol sym = 0;
      try {
        sym = alphabet.index_of(require(spec, "perturb.symbol"));
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("field 'parameters.perturb.symbol': ") + e.what());
      }
      const double factor = number("parameters.perturb.factor", require(spec, "perturb.factor"));
      if (!(factor > 0.0)) throw ConfigError("field 'parameters.perturb.factor': must be positive");
      RhoSingleton p;
      p.range = 1;
      // deliberately not renormalised: a negative control for order consistency
      p.eval = [rho_fn, sym, factor](const Word& w, Site i) {
        const double v = rho_fn(w, i);
        return w.at(i) == sym ? v * factor : v;
      };
      fam->set_singleton(site, p);
    } else {
      model.transfer.emplace(ising_transfer(beta, h, lam, grammar));
      model.chain.emplace(doob_chain(*model.transfer));
    }
    model.gibbs = fam;
  }
  if (model.transfer) {
    const TransferModel tm = *model.transfer;
    model.weight = [tm](const Word& w) { return path_weight(tm, w); };
    model.weight_context = tm.memory();
  }
  return model;
}

}  // namespace chainspec
