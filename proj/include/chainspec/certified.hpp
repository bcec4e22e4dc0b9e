#pragma once

#include <string>
#include <vector>

namespace chainspec {

// A numeric value with a rigorous bound on its distance to the quantity it
// approximates. n_used is the truncation depth that produced it.
struct CertifiedValue {
  double value = 0.0;
  double radius = 0.0;
  int n_used = 0;
  bool sampled = false;  // radius certified only over a sampled probe set

  bool exact() const noexcept { return radius == 0.0 && !sampled; }
  double lower() const noexcept { return value - radius; }
  double upper() const noexcept { return value + radius; }
};

// Certified upper bound k -> var_k for the dependence of a kernel on sites
// more than k steps away.
class TailProfile {
 public:
  enum class Form { Exact, Geometric, Power, Table };

  static TailProfile exact(int memory);
  // C * a^{-k}, a > 1
  static TailProfile geometric(double c, double a);
  // C * (k+1)^{-p}
  static TailProfile power(double c, double p);
  // entries[k]; the last entry is repeated for larger k
  static TailProfile table(std::vector<double> entries);

  Form form() const noexcept { return form_; }
  // -1 unless form() == Exact
  int memory() const noexcept { return form_ == Form::Exact ? memory_ : -1; }
  double c() const noexcept { return c_; }
  double a() const noexcept { return a_; }
  double p() const noexcept { return p_; }
  const std::vector<double>& entries() const noexcept { return entries_; }

  // Upper bound on var_k, capped at 1.
  double bound(int k) const;
  bool summable() const noexcept;
  bool square_summable() const noexcept;
  // sum_{k >= from} bound(k); +inf when not summable
  double tail_sum(int from) const;
  // sum_{k >= from} bound(k)^2
  double tail_sum_sq(int from) const;
  // sum_{k >= from} tail_sum(k)
  double double_tail_sum(int from) const;

  std::string describe() const;

 private:
  TailProfile() = default;

  Form form_ = Form::Exact;
  int memory_ = 0;
  double c_ = 0.0, a_ = 1.0, p_ = 0.0;
  std::vector<double> entries_;
};

}  // namespace chainspec
