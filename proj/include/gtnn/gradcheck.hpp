#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace gtnn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
};

/// Compares an analytic gradient against central finite differences
/// (f(θ+h·eᵢ) − f(θ−h·eᵢ)) / 2h coordinate by coordinate.
///
/// The discrepancy is measured relative to max(1, |analytic|, |numeric|),
/// which behaves like a true relative error for O(1)-and-larger entries and
/// degrades to an absolute error where the gradient is too small for finite
/// differences to resolve. Throws on non-finite f evaluations.
inline GradCheckResult grad_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> theta,
                                  std::span<const double> analytic, double h) {
  if (theta.size() != analytic.size())
    throw std::invalid_argument("grad_check: size mismatch");
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be positive");
  std::vector<double> point(theta.begin(), theta.end());
  GradCheckResult result;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double fp = f(point);
    point[i] = saved - h;
    const double fm = f(point);
    point[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("grad_check: non-finite function value");
    const double numeric = (fp - fm) / (2.0 * h);
    const double scale = std::max({1.0, std::fabs(numeric), std::fabs(analytic[i])});
    const double rel = std::fabs(numeric - analytic[i]) / scale;
    if (rel > result.max_rel_error) {
      result.max_rel_error = rel;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace gtnn
