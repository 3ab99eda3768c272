#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zeq {

using Int = std::int64_t;

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (UPSet text, pattern text, DSL, ring spec).
struct ParseError : Error {
  using Error::Error;
};

/// An operation was requested in a regime where it is not defined
/// (e.g. negation over naturals, pattern constants in exact evaluation,
/// solving an unresolved system, horizon-unsound tree in strict mode).
struct RegimeError : Error {
  using Error::Error;
};

/// 64-bit backing arithmetic would wrap.
struct OverflowError : Error {
  using Error::Error;
};

/// A sigma-ring spec table is inconsistent or lacks a needed entry.
struct SpecError : Error {
  using Error::Error;
};

inline Int checkedAdd(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in addition");
  return r;
}

inline Int checkedSub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("integer overflow in subtraction");
  return r;
}

inline Int checkedMul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multiplication");
  return r;
}

/// Mathematical modulus, result in [0, m).
inline Int posMod(Int n, Int m) {
  Int r = n % m;
  return r < 0 ? r + m : r;
}

inline Int gcdInt(Int a, Int b) {
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

inline Int lcmInt(Int a, Int b) {
  if (a == 0 || b == 0) return 0;
  return checkedMul(a / gcdInt(a, b), b);
}

inline Int pow7(Int k) {
  Int v = 1;
  for (Int i = 0; i < k; ++i) v = checkedMul(v, 7);
  return v;
}

/// Domain a set lives in: subsets of the naturals or of all integers.
enum class Domain { Nat, Int };

inline const char* domainName(Domain d) { return d == Domain::Nat ? "nat" : "int"; }

}  // namespace zeq
