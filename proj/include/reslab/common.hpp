#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace reslab {

// Error taxonomy. The CLI maps each kind onto a distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

// Caller supplied an argument outside an operation's domain (bad anchor,
// unsupported dimension, malformed preset).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

// Requested size exceeds a configured work or memory budget.
class BudgetError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "budget"; }
};

// An enclosure or certified comparison could not be decided.
class PrecisionError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "precision"; }
};

class OverflowError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "overflow"; }
};

// Exact nonnegative count carried in 128 bits; overflow raises instead of
// wrapping.
class Count {
public:
    using rep = unsigned __int128;

    constexpr Count() = default;
    constexpr Count(std::uint64_t v) : v_(v) {}  // NOLINT(google-explicit-constructor)

    static Count from_raw(rep v) {
        Count c;
        c.v_ = v;
        return c;
    }

    rep raw() const { return v_; }

    Count& operator+=(Count o) {
        if (__builtin_add_overflow(v_, o.v_, &v_)) throw OverflowError("count overflow in addition");
        return *this;
    }
    Count& operator*=(Count o) {
        if (__builtin_mul_overflow(v_, o.v_, &v_)) throw OverflowError("count overflow in multiplication");
        return *this;
    }
    friend Count operator+(Count a, Count b) { return a += b; }
    friend Count operator*(Count a, Count b) { return a *= b; }
    friend Count operator-(Count a, Count b) {
        if (b.v_ > a.v_) throw OverflowError("count underflow in subtraction");
        return from_raw(a.v_ - b.v_);
    }

    friend auto operator<=>(const Count&, const Count&) = default;
    friend bool operator==(const Count&, const Count&) = default;

    std::uint64_t to_u64() const {
        if (v_ > std::numeric_limits<std::uint64_t>::max()) throw OverflowError("count exceeds 64 bits");
        return static_cast<std::uint64_t>(v_);
    }
    double to_double() const { return static_cast<double>(v_); }
    std::string to_string() const;

private:
    rep v_ = 0;
};

// Integer frequency vector of dimension 1..3; unused trailing entries are 0.
struct Freq {
    std::array<std::int64_t, 3> c{0, 0, 0};
    int dim = 0;

    Freq() = default;
    Freq(std::initializer_list<std::int64_t> xs);
    static Freq from_vector(const std::vector<std::int64_t>& xs);

    std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    std::int64_t norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
    std::int64_t sup_norm() const;
    std::vector<std::int64_t> to_vector() const;
    std::string to_string() const;  // "c1,c2[,c3]"

    friend bool operator==(const Freq&, const Freq&) = default;
};

// The cube Z_N^d of integer vectors with sup-norm at most N.
struct FrequencyBox {
    int dim = 2;
    std::int64_t radius = 0;

    FrequencyBox(int d, std::int64_t n);

    bool contains(const Freq& k) const { return k.sup_norm() <= radius; }
    std::int64_t side() const { return 2 * radius + 1; }
    Count cardinality() const;
};

constexpr double pi = 3.14159265358979323846;

// Floor/ceil of a/b for b != 0, rounding toward -inf / +inf.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b);

// Amplitude normalisation N^{-d/2} uses max(N, 1) so that the single-frequency
// packet at N = 0 has unit amplitude.
inline double normalisation_radius(std::int64_t n) { return n < 1 ? 1.0 : static_cast<double>(n); }

}  // namespace reslab
