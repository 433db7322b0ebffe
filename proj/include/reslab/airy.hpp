#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "reslab/common.hpp"
#include "reslab/numtheory.hpp"

namespace reslab {

// Ordered triples (k1, k2, k3) in [-N, N]^3 with k1 + k2 + k3 = k and
// k1^3 + k2^3 + k3^3 = n.
struct AiryAnchor {
    BigInt n, k;
    BigInt radius;

    void validate() const;
};

enum class AiryMethod { brute, divisor };

std::string to_string(AiryMethod m);
AiryMethod parse_airy_method(const std::string& s);

using AiryTriple = std::array<BigInt, 3>;

inline constexpr std::int64_t kAiryBruteMax = 10'000;
// The divisor method retries by brute force below this radius when
// factorisation runs out of time.
inline constexpr std::int64_t kAiryFallbackMax = 2'000;
// Largest number of bounded divisors the big-integer path will enumerate.
inline constexpr std::uint64_t kAiryDivisorBudget = 20'000'000;

// Members in lexicographic order.
std::vector<AiryTriple> airy_members(const AiryAnchor& anchor, AiryMethod method = AiryMethod::divisor,
                                     FactorBudget budget = kDefaultFactorBudget);

Count count_airy(const AiryAnchor& anchor, AiryMethod method = AiryMethod::divisor,
                 FactorBudget budget = kDefaultFactorBudget);

// |k_max| >= g |k_med|, |k_med| >= g |k_min| and |k_max| >= g |k_min|^3,
// ranking the entries by absolute value.
bool satisfies_gap(const AiryTriple& t, double gap_factor);

Count count_airy_restricted(const AiryAnchor& anchor, double gap_factor = 4.0, AiryMethod method = AiryMethod::divisor,
                            FactorBudget budget = kDefaultFactorBudget);

struct AiryWitness {
    std::uint64_t m = 0;
    BigInt lcm;  // M = lcm(1, ..., m+1)
    BigInt k, n;  // 3M and 3M^3
    std::vector<AiryTriple> triples;  // x = 1..m, entries ascending
    Count ordered_count;              // ordered triples contributed by the m sets
    BigInt n_min;                     // max |entry|, the smallest box holding every triple
    double ratio_to_log = 0.0;        // m / log(n_min)
    bool log_bound_holds = false;     // log M <= pi(m+1) log(m+1)
};

inline constexpr std::uint64_t kAiryWitnessMax = 200;

// The triples ((3 - 2(x+1)^2/x) M, (3 + 2x^2/(x+1)) M, (3 + 2/(x(x+1))) M),
// each verified exactly.
AiryWitness build_airy_witness(std::uint64_t m);

struct AiryScanRow {
    std::int64_t k = 0;
    Count count;  // #Gamma_Airy(k^3/9, k)
};

struct AiryScanReport {
    std::int64_t n = 0;
    std::vector<AiryScanRow> ninth_rows;  // k in [-3N, 3N] with 3 | k
    Count ninth_max;  // over k != 0
    std::int64_t ninth_argmax_k = 0;
    // max over anchors with n not in {k^3, k^3/9}
    Count generic_max;
    std::int64_t generic_argmax_n = 0, generic_argmax_k = 0;
};

inline constexpr std::int64_t kAiryScanMax = 200;

// Every sum k in [-3N, 3N]; argmax anchors are recounted with the divisor method.
AiryScanReport conditional_l6_scan(std::int64_t n);

}  // namespace reslab
