#pragma once

#include <stdexcept>
#include <string>

namespace hlab {

/// Invalid configuration text or parameters that violate a documented invariant.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A theorem's hypothesis failed its audit; no margin is meaningful.
class HypothesisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Internal numerical failure: stability limit, divergence, non-convergence.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace hlab
