#pragma once

#include <cstddef>
#include <vector>

namespace htsim {

// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& o);
  size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;
  double stderr_mean() const;

 private:
  size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// |mean_a - mean_b| in units of the combined standard error.
double two_sample_z(const RunningStats& a, const RunningStats& b);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// tau = alpha * log(L / L0)
struct LogFit {
  double alpha, alpha_se, L0, r2;
};
LogFit fit_log(const std::vector<double>& L, const std::vector<double>& tau);

// tau = a * x^b
struct PowerFit {
  double a, b, b_se, r2;
};
PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& tau);

}  // namespace htsim
