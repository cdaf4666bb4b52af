#include "dledger/sim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace dledger::sim {

double mean(const std::vector<double>& xs)
{
  if (xs.empty())
    return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs)
{
  if (xs.size() < 2)
    return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs)
    ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double coefficient_of_variation(const std::vector<double>& xs)
{
  const double m = mean(xs);
  return m == 0.0 ? 0.0 : stddev(xs) / std::abs(m);
}

MannKendall mann_kendall(const std::vector<double>& series)
{
  MannKendall r;
  const auto n = series.size();
  if (n < 3)
    return r;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = series[j] - series[i];
      r.s += (d > 0) - (d < 0);
    }
  std::map<double, std::size_t> ties;
  for (double x : series)
    ++ties[x];
  const double nd = static_cast<double>(n);
  double var = nd * (nd - 1) * (2 * nd + 5);
  for (auto [v, t] : ties) {
    const double td = static_cast<double>(t);
    var -= td * (td - 1) * (2 * td + 5);
  }
  r.variance = var / 18.0;
  if (r.variance <= 0.0)
    return r;
  if (r.s > 0)
    r.z = (r.s - 1) / std::sqrt(r.variance);
  else if (r.s < 0)
    r.z = (r.s + 1) / std::sqrt(r.variance);
  r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  return r;
}

std::vector<double> tail(const std::vector<double>& xs, double from)
{
  auto start = static_cast<std::size_t>(std::floor(static_cast<double>(xs.size()) * from));
  return {xs.begin() + static_cast<std::ptrdiff_t>(std::min(start, xs.size())), xs.end()};
}

} // namespace dledger::sim
