// Exact arithmetic primitives and the library-wide error taxonomy.
#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcarrange {

using BigInt = mpz_class;

/// Arbitrary-precision rational, always canonical (lowest terms, denominator > 0).
using Rational = mpq_class;

enum class errc {
  malformed_input,
  malformed_rational,
  zero_normal,
  proportional_normals,
  dimension_mismatch,
  duplicate_label,
  unknown_name,
  generation_failure,
  label_not_found,
  repeated_index,
  dependent_input,
  index_out_of_range,
  resource_guard,
  parity_mismatch,
  arrangement_mismatch,
  unsupported,
  collision,
  bad_mode,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

/// Parses "[sign]digits[/digits]" into a canonical Rational.
/// Rejects anything outside that grammar, including zero denominators.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw Error(errc::malformed_rational, "malformed rational: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') ++i;
  std::size_t num_begin = i;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
  if (i == num_begin) fail();
  std::size_t den_begin = std::string_view::npos;
  if (i < text.size()) {
    if (text[i] != '/') fail();
    ++i;
    den_begin = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == den_begin || i != text.size()) fail();
  }
  Rational q;
  if (q.set_str(std::string(text), 10) != 0) fail();
  if (den_begin != std::string_view::npos && mpz_sgn(q.get_den().get_mpz_t()) == 0)
    throw Error(errc::malformed_rational, "zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline std::string to_string(const BigInt& z) { return z.get_str(); }

}  // namespace tcarrange
