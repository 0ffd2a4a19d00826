#pragma once

#include <stdexcept>
#include <string>

namespace outlier {

// Bad input or a violated precondition. The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical or mathematical failure: non-convergence, an assumption on the
// potential that does not hold, a degenerate configuration. Exit code 2.
class MathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace outlier
