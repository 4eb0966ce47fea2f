#ifndef FGCORE_ERRORS_HPP
#define FGCORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fgcore {

/// Malformed word text or a symbol outside the alphabet.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two operands over free groups of different rank.
class AlphabetMismatch : public std::invalid_argument {
 public:
  AlphabetMismatch(unsigned lhs, unsigned rhs)
      : std::invalid_argument("alphabet rank mismatch: " + std::to_string(lhs) +
                              " vs " + std::to_string(rhs)) {}
};

/// An operation was called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fgcore

#endif  // FGCORE_ERRORS_HPP
