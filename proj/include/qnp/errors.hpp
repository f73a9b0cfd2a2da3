#ifndef QNP_ERRORS_HPP
#define QNP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qnp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All-zero input to amplitude encoding.
class EncodingDegenerate : public Error {
 public:
  EncodingDegenerate() : Error("amplitude encoding of an all-zero vector") {}
};

/// More values than the register can hold.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Qubit index or register that does not fit the state.
class QubitIndexError : public Error {
 public:
  using Error::Error;
};

/// The ancilla-zero branch carries (numerically) no amplitude.
class PostSelectionFailure : public Error {
 public:
  explicit PostSelectionFailure(double amplitude)
      : Error("post-selection failed, success amplitude " + std::to_string(amplitude)),
        amplitude_(amplitude) {}
  double amplitude() const noexcept { return amplitude_; }

 private:
  double amplitude_;
};

/// Kernel or operator with no nonzero coefficient.
class DegenerateOperator : public Error {
 public:
  using Error::Error;
};

/// Bad sizes, spacings or parameters handed to a numerical routine.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace qnp

#endif  // QNP_ERRORS_HPP
