#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eichler {

using Integer = mpz_class;
using Rational = mpq_class;

enum class ErrorCode {
    InvalidArgument,
    UnsupportedField,
    RamifiedPrime,
    CompositeP,
    RamificationMismatch,
    NotAnOrder,
    BadPrime,
    MassMismatch,
    LevelOneImpossible,
    LevelMismatch,
    BoundTooLarge,
    IncompatibleBounds,
    CoefficientOutOfRange,
    Internal,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedField: return "UnsupportedField";
    case ErrorCode::RamifiedPrime: return "RamifiedPrime";
    case ErrorCode::CompositeP: return "CompositeP";
    case ErrorCode::RamificationMismatch: return "RamificationMismatch";
    case ErrorCode::NotAnOrder: return "NotAnOrder";
    case ErrorCode::BadPrime: return "BadPrime";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::LevelOneImpossible: return "LevelOneImpossible";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::BoundTooLarge: return "BoundTooLarge";
    case ErrorCode::IncompatibleBounds: return "IncompatibleBounds";
    case ErrorCode::CoefficientOutOfRange: return "CoefficientOutOfRange";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

/// Every failure surfaced by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define EICHLER_CHECK(cond, code, msg)                                         \
    do {                                                                       \
        if (!(cond))                                                           \
            throw ::eichler::Error((code), (msg));                             \
    } while (0)

inline std::int64_t to_int64(const Integer& x)
{
    EICHLER_CHECK(x.fits_slong_p(), ErrorCode::Internal, "integer does not fit in 64 bits: " + x.get_str());
    return x.get_si();
}

inline Integer floor_div(const Integer& a, const Integer& b)
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Integer mod_floor(const Integer& a, const Integer& b)
{
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Integer floor_of(const Rational& q)
{
    return floor_div(q.get_num(), q.get_den());
}

/// Nearest integer, ties rounded down.
inline Integer round_of(const Rational& q)
{
    Rational shifted = q + Rational(1, 2);
    Integer r = floor_of(shifted);
    if (Rational(r) == shifted)
        r -= 1;
    return r;
}

inline Integer isqrt(const Integer& n)
{
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_square(const Integer& n)
{
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

/// Trial-division factorization of |n| (n != 0).
inline std::vector<std::pair<Integer, int>> factor_integer(Integer n)
{
    EICHLER_CHECK(n != 0, ErrorCode::InvalidArgument, "cannot factor zero");
    if (n < 0)
        n = -n;
    std::vector<std::pair<Integer, int>> out;
    for (Integer d = 2; d * d <= n; ++d) {
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        if (e > 0)
            out.emplace_back(d, e);
    }
    if (n > 1)
        out.emplace_back(n, 1);
    return out;
}

/// Legendre symbol (a|p) for an odd prime p.
inline int legendre(std::int64_t a, std::int64_t p)
{
    Integer aa = a, pp = p;
    return mpz_legendre(aa.get_mpz_t(), pp.get_mpz_t());
}

inline std::string to_string(const Rational& q)
{
    return q.get_str();
}

} // namespace eichler
