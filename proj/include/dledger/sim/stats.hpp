#pragma once

#include <vector>

namespace dledger::sim {

double mean(const std::vector<double>& xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(const std::vector<double>& xs);
/// stddev / |mean|.
double coefficient_of_variation(const std::vector<double>& xs);

struct MannKendall
{
  double s = 0.0;
  double variance = 0.0;
  double z = 0.0;
  double p_value = 1.0; // two-sided

  bool trend(double alpha = 0.05) const { return p_value < alpha; }
};

/// Mann-Kendall trend test with the tie-corrected variance and continuity
/// correction, normal approximation.
MannKendall mann_kendall(const std::vector<double>& series);

/// Tail of `xs` starting at fraction `from` of its length.
std::vector<double> tail(const std::vector<double>& xs, double from = 0.5);

} // namespace dledger::sim
