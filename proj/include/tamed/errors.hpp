#pragma once

#include <stdexcept>
#include <string>

namespace tamed {

// Invalid user input: bad problem name, inconsistent grids, violated delay
// bounds. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant (e.g. a history read past the filled frontier).
// The CLI maps this to exit code 3.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tamed
