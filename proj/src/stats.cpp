#include "htsim/stats.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace htsim {

void RunningStats::add(double x) {
  ++n_;
  double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  double n = static_cast<double>(n_ + o.n_);
  double d = o.mean_ - mean_;
  mean_ += d * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

double RunningStats::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::stderr_mean() const {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double two_sample_z(const RunningStats& a, const RunningStats& b) {
  double se = std::hypot(a.stderr_mean(), b.stderr_mean());
  double d = std::abs(a.mean() - b.mean());
  if (se == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return d / se;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit needs >= 2 matched points");
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
  if (n > 2) {
    double s2 = sse / static_cast<double>(n - 2);
    f.slope_se = std::sqrt(s2 / sxx);
    double sumx2 = 0;
    for (double xi : x) sumx2 += xi * xi;
    f.intercept_se = std::sqrt(s2 * sumx2 / (static_cast<double>(n) * sxx));
  }
  return f;
}

LogFit fit_log(const std::vector<double>& L, const std::vector<double>& tau) {
  std::vector<double> lx;
  for (double l : L) lx.push_back(std::log(l));
  LinearFit f = fit_line(lx, tau);
  LogFit out;
  out.alpha = f.slope;
  out.alpha_se = f.slope_se;
  out.L0 = f.slope != 0 ? std::exp(-f.intercept / f.slope) : 0.0;
  out.r2 = f.r2;
  return out;
}

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& tau) {
  std::vector<double> lx, ly;
  for (double v : x) lx.push_back(std::log(v));
  for (double v : tau) ly.push_back(std::log(v));
  LinearFit f = fit_line(lx, ly);
  return {std::exp(f.intercept), f.slope, f.slope_se, f.r2};
}

}  // namespace htsim
