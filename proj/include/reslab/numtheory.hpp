#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "reslab/common.hpp"

namespace reslab {

using BigInt = mpz_class;
// mpq_class keeps values canonical (lowest terms, positive denominator).
using ExactRational = mpq_class;

std::string to_string(const BigInt& x);
std::string to_string(const ExactRational& x);

// ---------------------------------------------------------------------------
// Totients and primes

inline constexpr std::uint64_t kTotientTableLimit = 100'000'000;

struct TotientTable {
    std::uint64_t limit = 0;
    std::vector<std::uint32_t> values;  // values[n] = phi(n), values[0] unused

    std::uint32_t operator()(std::uint64_t n) const { return values.at(n); }
};

// Linear sieve. Throws BudgetError above kTotientTableLimit.
TotientTable totient_table(std::uint64_t limit);

struct TotientSum {
    std::uint64_t limit = 0;
    double sum = 0.0;    // sum_{p<=N} phi(p)/p^2
    double ratio = 0.0;  // sum / log N
    // sum > (6/pi^2) log(N+1): the harmonic-series chain behind the
    // orthogonal-pair lower bound.
    bool chain_holds = false;
};

TotientSum totient_sum_ratio(std::uint64_t limit);
TotientSum totient_sum_ratio(const TotientTable& table);

std::vector<std::uint32_t> primes_up_to(std::uint64_t limit);
std::uint64_t prime_pi(std::uint64_t n);

// lcm(1, 2, ..., m+1).
BigInt lcm_range(std::uint64_t m);

// M <= (m+1)^{pi(m+1)}, i.e. log M <= pi(m+1) log(m+1), decided exactly.
bool lcm_log_bound_holds(std::uint64_t m, const BigInt& lcm);

// ---------------------------------------------------------------------------
// Factorisation and divisors

struct PrimePower {
    BigInt prime;
    unsigned exponent = 0;
};

using FactorBudget = std::chrono::milliseconds;
inline constexpr FactorBudget kDefaultFactorBudget{2000};

// Prime factorisation of |n| (n != 0), ascending primes. Trial division,
// then Pollard-Brent rho; raises BudgetError when the deadline passes.
std::vector<PrimePower> factorize(const BigInt& n, FactorBudget budget = kDefaultFactorBudget);

struct SignedDivisorList {
    BigInt target;
    std::vector<BigInt> divisors;  // ascending, symmetric under negation
};

SignedDivisorList signed_divisors(const BigInt& target, FactorBudget budget = kDefaultFactorBudget);

// 64-bit fast path used by the Airy counters: positive divisors of n > 0.
std::vector<std::uint64_t> positive_divisors_u64(std::uint64_t n, FactorBudget budget = kDefaultFactorBudget);

// ---------------------------------------------------------------------------
// Real numbers presented exactly: the gamma presets

struct GammaPreset {
    enum class Kind { rational, sqrt, euler_e, quotients };

    Kind kind = Kind::rational;
    ExactRational value;          // rational
    std::uint64_t radicand = 0;   // sqrt
    BigInt integer_part;          // quotients
    std::vector<BigInt> list;     // quotients: a_1, a_2, ...

    static GammaPreset rational(const ExactRational& v);
    static GammaPreset square_root(std::uint64_t d);
    static GammaPreset e();
    static GammaPreset quotient_list(const BigInt& integer_part, std::vector<BigInt> quotients);

    // Grammar: rat:<p>/<q> | sqrt:<d> | e | cf:<a1>,<a2>,... with an optional
    // integer part attached as ";int:<n>" (or "int:<n>;cf:...").
    static GammaPreset parse(std::string_view text);
    std::string to_string() const;

    // The value is a rational number (rat, cf lists, perfect-square radicands).
    bool is_rational() const;
    // Exact value when is_rational().
    ExactRational exact_value() const;
    // gamma^2 is rational (rat, cf lists, every sqrt preset).
    std::optional<ExactRational> exact_square() const;
    bool is_positive() const;
};

// Streams the integer part and then partial quotients a_1, a_2, ...
class QuotientSource {
public:
    explicit QuotientSource(const GammaPreset& gamma);

    const BigInt& integer_part() const { return a0_; }
    // Next partial quotient, or nullopt once a rational expansion ends.
    std::optional<BigInt> next();
    std::size_t produced() const { return produced_; }

private:
    GammaPreset::Kind kind_;
    BigInt a0_;
    std::size_t produced_ = 0;
    // rational: remaining fraction num/den after removing the integer part
    BigInt num_, den_;
    // sqrt: surd state (m + sqrt(D)) / d
    std::uint64_t radicand_ = 0, root_ = 0;
    std::int64_t m_ = 0, d_ = 1;
    bool terminated_ = false;
    const std::vector<BigInt>* list_ = nullptr;
};

struct Convergent {
    BigInt p, q;
};

struct ContinuedFractionExpansion {
    BigInt integer_part;
    std::vector<BigInt> quotients;         // a_1 .. a_n
    std::vector<Convergent> convergents;   // p_0/q_0 .. p_n/q_n
    bool terminated = false;               // expansion of a rational ended
};

enum class DepthPolicy { truncate, require };

inline constexpr std::size_t kMaxExpansionDepth = 20'000;

// Partial quotients a_1..a_depth and convergents p_0/q_0..p_depth/q_depth.
// A rational gamma whose expansion ends early returns the full finite
// expansion with `terminated` set; DepthPolicy::require turns that into a
// DomainError instead.
ContinuedFractionExpansion continued_fraction(const GammaPreset& gamma, std::size_t depth,
                                              DepthPolicy policy = DepthPolicy::truncate);

// Value of [a0; a1, ..., an] as an exact rational.
ExactRational evaluate_continued_fraction(const BigInt& a0, std::span<const BigInt> quotients);

// 2x2 integer matrix [[a, b], [c, d]].
struct Mat2 {
    BigInt a = 1, b = 0, c = 0, d = 1;
};
Mat2 operator*(const Mat2& x, const Mat2& y);

// Product of [[a_i, 1], [1, 0]] over the given quotients by binary splitting.
// With a_0 leading, the product is [[p_n, p_{n-1}], [q_n, q_{n-1}]].
Mat2 convergent_product(std::span<const BigInt> quotients);

// Sign of gamma - x, decided exactly (rational and sqrt presets) or by
// refining convergent brackets (e).
int compare(const GammaPreset& gamma, const ExactRational& x);

}  // namespace reslab
