#ifndef CHOICEWORKS_SCALAR_HPP
#define CHOICEWORKS_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace cw {

// Exact rational scalar. Stored in lowest terms with positive denominator;
// all arithmetic is exact and division by zero throws.
using Scalar = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

using Vec = std::vector<Scalar>;

class Error : public std::runtime_error {
 public:
  enum class Code {
    DimensionMismatch,
    Parse,
    InvalidName,
    ScriptExhausted,
    OracleFault,
    Timeout,
    BudgetBreach,
    InputFault,
    Internal,
  };

  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

inline Scalar checked_div(const Scalar& a, const Scalar& b) {
  if (b == 0) throw Error(Error::Code::InputFault, "division by zero");
  return a / b;
}

// 2^e for possibly negative e.
inline Scalar pow2(long e) {
  BigInt p = BigInt(1) << static_cast<unsigned>(e < 0 ? -e : e);
  return e < 0 ? Scalar(BigInt(1), p) : Scalar(p);
}

inline Scalar abs(const Scalar& a) { return a < 0 ? Scalar(-a) : a; }

// Parses "p/q" or "p"; also accepts plain decimal strings like "0.25".
inline Scalar parse_scalar(const std::string& text) {
  try {
    auto dot = text.find('.');
    if (dot == std::string::npos) return Scalar(text);
    bool negative = !text.empty() && text[0] == '-';
    std::string digits = text.substr(negative ? 1 : 0);
    digits.erase(digits.find('.'), 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw Error(Error::Code::Parse, "bad rational literal: " + text);
    BigInt num = 0;
    for (char ch : digits) num = num * 10 + (ch - '0');
    BigInt den = 1;
    for (std::size_t i = 0; i < text.size() - dot - 1; ++i) den *= 10;
    Scalar value(num, den);
    return negative ? Scalar(-value) : value;
  } catch (const std::exception&) {
    throw Error(Error::Code::Parse, "bad rational literal: " + text);
  }
}

inline std::string to_string(const Scalar& a) {
  if (denominator(a) == 1) return numerator(a).str();
  return numerator(a).str() + "/" + denominator(a).str();
}

// Chebyshev (max) distance between points of equal dimension.
inline Scalar dist_max(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw Error(Error::Code::DimensionMismatch, "dist_max: dimension mismatch");
  Scalar d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Scalar c = abs(a[i] - b[i]);
    if (c > d) d = c;
  }
  return d;
}

}  // namespace cw

#endif  // CHOICEWORKS_SCALAR_HPP
