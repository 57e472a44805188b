#pragma once

#include <stdexcept>
#include <string>

namespace bellscope {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class UnsupportedError : public Error {
  public:
    using Error::Error;
};

class InvalidScenarioError : public Error {
  public:
    using Error::Error;
};

// A no-signalling equality does not hold exactly; the message names the marginal.
class SignallingError : public Error {
  public:
    using Error::Error;
};

class TooLargeError : public Error {
  public:
    using Error::Error;
};

class PreconditionError : public Error {
  public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
  public:
    using Error::Error;
};

class NoViolationError : public Error {
  public:
    using Error::Error;
};

class InvalidStateError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

/// Raised when an enumeration runs out of its time budget. When a checkpoint
/// file was requested, `checkpoint_path()` names the file holding the state.
class BudgetExhaustedError : public Error {
  public:
    BudgetExhaustedError(const std::string &what, std::string checkpoint)
        : Error(what), checkpoint_(std::move(checkpoint)) {}
    const std::string &checkpoint_path() const { return checkpoint_; }

  private:
    std::string checkpoint_;
};

} // namespace bellscope
