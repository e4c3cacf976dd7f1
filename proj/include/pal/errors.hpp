#pragma once

#include <stdexcept>
#include <string>

namespace pal {

/// Invalid model or distribution parameters (negative rates, row sums above one, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller-supplied object violates a documented contract (non-Lipschitz g,
/// coupling inconsistent with its declared marginal, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A computation would exceed a configured memory or enumeration budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rejection sampler fell below its acceptance floor.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pal
