#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace dledger::sim {

class WConfirmExceedsN : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Expected steady-state tailing count: n * lambda * T / (n - 1), where
/// lambda is the system-wide record rate and T the propagation delay.
double predicted_tailing(std::size_t n, double lambda_system, double T);

/// Expected number of approvals until W distinct entities out of N have
/// approved a record: N * sum_{i=0}^{W-1} 1 / (N - i).
double predicted_approvals(std::uint32_t w_confirm, std::size_t entities);

/// Upper bound on confirmation time: predicted_approvals * n * T / (n - 1).
double confirmation_bound(std::size_t entities, std::uint32_t w_confirm, std::size_t n, double T);

} // namespace dledger::sim
