#include "dledger/sim/oracle.hpp"

#include <string>

namespace dledger::sim {

double predicted_tailing(std::size_t n, double lambda_system, double T)
{
  if (n < 2)
    throw std::invalid_argument("n must be at least 2");
  const double nd = static_cast<double>(n);
  return nd * lambda_system * T / (nd - 1.0);
}

double predicted_approvals(std::uint32_t w_confirm, std::size_t entities)
{
  if (w_confirm == 0)
    throw std::invalid_argument("W_confirm must be positive");
  if (w_confirm > entities)
    throw WConfirmExceedsN("W_confirm " + std::to_string(w_confirm) + " exceeds N " +
                           std::to_string(entities));
  // Each term is N / (N - i), so W = 1 gives exactly 1. Largest terms first.
  const double n = static_cast<double>(entities);
  double sum = 0.0;
  for (std::uint32_t i = w_confirm; i-- > 0;)
    sum += n / (n - static_cast<double>(i));
  return sum;
}

double confirmation_bound(std::size_t entities, std::uint32_t w_confirm, std::size_t n, double T)
{
  if (n < 2)
    throw std::invalid_argument("n must be at least 2");
  const double nd = static_cast<double>(n);
  return predicted_approvals(w_confirm, entities) * nd * T / (nd - 1.0);
}

} // namespace dledger::sim
