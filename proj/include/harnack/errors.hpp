#ifndef HARNACK_ERRORS_HPP
#define HARNACK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace harnack {

/// A caller broke an operation's precondition (bad vertex, bad radius,
/// clipped ball, ...). The CLI maps this to exit status 2.
class precondition_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A domain reaches the frontier of a finite truncation of an infinite graph.
class truncation_error : public precondition_error {
public:
  using precondition_error::precondition_error;
};

/// A solve or a probability vector missed its residual target (exit 3).
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A hard cap (steps, states, pairs) was exceeded (exit 4).
class cap_exceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace harnack

#endif
