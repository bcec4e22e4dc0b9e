#include "chainspec/certified.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chainspec/errors.hpp"

namespace chainspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sum_{n >= n0} n^{-p} for n0 >= 1, p > 1
double zeta_tail(double n0, double p) { return std::pow(n0, -p) + std::pow(n0, 1.0 - p) / (p - 1.0); }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

TailProfile TailProfile::exact(int memory) {
  if (memory < 0) throw ConfigError("memory must be nonnegative");
  TailProfile t;
  t.form_ = Form::Exact;
  t.memory_ = memory;
  return t;
}

TailProfile TailProfile::geometric(double c, double a) {
  if (!(c >= 0.0) || !(a > 1.0)) throw ConfigError("geometric profile needs c >= 0 and a > 1");
  TailProfile t;
  t.form_ = Form::Geometric;
  t.c_ = c;
  t.a_ = a;
  return t;
}

TailProfile TailProfile::power(double c, double p) {
  if (!(c >= 0.0) || !(p > 0.0)) throw ConfigError("power profile needs c >= 0 and p > 0");
  TailProfile t;
  t.form_ = Form::Power;
  t.c_ = c;
  t.p_ = p;
  return t;
}

TailProfile TailProfile::table(std::vector<double> entries) {
  if (entries.empty()) throw ConfigError("table profile needs at least one entry");
  for (double e : entries)
    if (!(e >= 0.0)) throw ConfigError("table profile entries must be nonnegative");
  TailProfile t;
  t.form_ = Form::Table;
  t.entries_ = std::move(entries);
  return t;
}

double TailProfile::bound(int k) const {
  if (k < 0) return 1.0;
  double b = 0.0;
  switch (form_) {
    case Form::Exact: b = k < memory_ ? 1.0 : 0.0; break;
    case Form::Geometric: b = c_ * std::pow(a_, -static_cast<double>(k)); break;
    case Form::Power: b = c_ * std::pow(static_cast<double>(k) + 1.0, -p_); break;
    case Form::Table:
      b = static_cast<std::size_t>(k) < entries_.size() ? entries_[static_cast<std::size_t>(k)] : entries_.back();
      break;
  }
  return std::min(1.0, b);
}

bool TailProfile::summable() const noexcept {
  switch (form_) {
    case Form::Exact:
    case Form::Geometric: return true;
    case Form::Power: return p_ > 1.0 || c_ == 0.0;
    case Form::Table: return entries_.back() == 0.0;
  }
  return false;
}

bool TailProfile::square_summable() const noexcept {
  if (form_ == Form::Power) return 2.0 * p_ > 1.0 || c_ == 0.0;
  return summable();
}

double TailProfile::tail_sum(int from) const {
  double s = 0.0;
  if (from < 0) {
    s += static_cast<double>(-from);
    from = 0;
  }
  if (!summable()) return kInf;
  switch (form_) {
    case Form::Exact: return s + std::max(0, memory_ - from);
    case Form::Table: {
      for (std::size_t k = static_cast<std::size_t>(from); k < entries_.size(); ++k) s += std::min(1.0, entries_[k]);
      return s;
    }
    case Form::Geometric:
    case Form::Power: {
      int k = from;
      while (bound(k) >= 1.0 && c_ > 0.0) {
        s += 1.0;
        ++k;
      }
      if (c_ == 0.0) return s;
      if (form_ == Form::Geometric) return s + c_ * std::pow(a_, -static_cast<double>(k)) / (1.0 - 1.0 / a_);
      return s + c_ * zeta_tail(static_cast<double>(k) + 1.0, p_);
    }
  }
  return kInf;
}

double TailProfile::tail_sum_sq(int from) const {
  double s = 0.0;
  if (from < 0) {
    s += static_cast<double>(-from);
    from = 0;
  }
  if (!square_summable()) return kInf;
  switch (form_) {
    case Form::Exact: return s + std::max(0, memory_ - from);
    case Form::Table: {
      for (std::size_t k = static_cast<std::size_t>(from); k < entries_.size(); ++k) {
        const double b = std::min(1.0, entries_[k]);
        s += b * b;
      }
      return s;
    }
    case Form::Geometric:
    case Form::Power: {
      int k = from;
      while (bound(k) >= 1.0 && c_ > 0.0) {
        s += 1.0;
        ++k;
      }
      if (c_ == 0.0) return s;
      if (form_ == Form::Geometric)
        return s + c_ * c_ * std::pow(a_, -2.0 * k) / (1.0 - 1.0 / (a_ * a_));
      return s + c_ * c_ * zeta_tail(static_cast<double>(k) + 1.0, 2.0 * p_);
    }
  }
  return kInf;
}

double TailProfile::double_tail_sum(int from) const {
  double s = 0.0;
  while (from < 0) {
    s += tail_sum(from);
    ++from;
  }
  if (!summable()) return kInf;
  switch (form_) {
    case Form::Exact: {
      for (int k = from; k < memory_; ++k) s += memory_ - k;
      return s;
    }
    case Form::Table: {
      if (entries_.back() != 0.0) return kInf;
      for (std::size_t k = static_cast<std::size_t>(from); k < entries_.size(); ++k) s += tail_sum(static_cast<int>(k));
      return s;
    }
    case Form::Geometric: {
      int k = from;
      while (bound(k) >= 1.0 && c_ > 0.0) {
        s += tail_sum(k);
        ++k;
      }
      if (c_ == 0.0) return s;
      const double r = 1.0 - 1.0 / a_;
      return s + c_ * std::pow(a_, -static_cast<double>(k)) / (r * r);
    }
    case Form::Power: {
      if (c_ == 0.0) return s;
      if (p_ <= 2.0) return kInf;
      int k = from;
      while (bound(k) >= 1.0) {
        s += tail_sum(k);
        ++k;
      }
      // tail_sum(j) <= C[(j+1)^{-p} + (j+1)^{1-p}/(p-1)] for j >= k
      const double n0 = static_cast<double>(k) + 1.0;
      return s + c_ * (zeta_tail(n0, p_) + zeta_tail(n0, p_ - 1.0) / (p_ - 1.0));
    }
  }
  return kInf;
}

std::string TailProfile::describe() const {
  switch (form_) {
    case Form::Exact: return "exact(" + std::to_string(memory_) + ")";
    case Form::Geometric: return "geometric(" + fmt(c_) + ", " + fmt(a_) + ")";
    case Form::Power: return "power(" + fmt(c_) + ", " + fmt(p_) + ")";
    case Form::Table: {
      std::string s = "table(";
      for (std::size_t i = 0; i < entries_.size(); ++i) s += (i ? " " : "") + fmt(entries_[i]);
      return s + ")";
    }
  }
  return "?";
}

}  // namespace chainspec
