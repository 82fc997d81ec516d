#pragma once

#include <stdexcept>
#include <string>

namespace linfembed {

// Malformed user-supplied data: files, flags, tables of the wrong shape.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A precondition of the construction was violated: point outside its ball,
// missing block operator, un-rescaled space.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operator sampling exhausted its attempts without a certified sandwich.
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace linfembed
