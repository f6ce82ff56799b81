#pragma once

#include <stdexcept>
#include <string>

namespace uie {

// Reasons a numerical routine can give up.
enum class errc {
  no_convergence,    // iteration cap hit before tolerance
  degenerate,        // breakdown (zero norm, vanishing beta, zero density)
  ill_conditioned,   // result failed its own consistency check
  multi_cut_support, // single-interval equilibrium assumption violated
  unbounded_weight,  // truncation interval widening never terminated
  degenerate_edge,   // edge density vanishes faster than a square root
};

class NumericalError : public std::runtime_error {
 public:
  NumericalError(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

// Precondition violations keep the standard type so callers can treat the
// library like any stdlib facility.
using InvalidArgument = std::invalid_argument;

}  // namespace uie
