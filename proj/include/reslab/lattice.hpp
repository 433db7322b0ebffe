#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reslab/common.hpp"

namespace reslab {

enum class CountMethod { brute, fast, mitm };

std::string to_string(CountMethod m);
CountMethod parse_count_method(const std::string& s);

enum class SetKind { gamma_2d, gamma_prime_1d, gamma_dprime_3d, orthogonal_pairs_2d, orthogonal_pairs_3d };

std::string to_string(SetKind k);

struct ResonanceCount {
    SetKind kind;
    FrequencyBox box;
    std::optional<Freq> anchor;
    Count count;
    CountMethod method;
};

// #{(x, y) : a x + b y = r, xlo <= x <= xhi, ylo <= y <= yhi}.
// Coefficients must stay below 2^31 in magnitude and |r| below 2^62 / 2^31.
std::int64_t count_line_points(std::int64_t a, std::int64_t b, std::int64_t r, std::int64_t xlo, std::int64_t xhi,
                               std::int64_t ylo, std::int64_t yhi);

// Points x of the box prod [lo_i, hi_i] with n . x = r.
std::int64_t count_plane_points(const std::array<std::int64_t, 3>& n, std::int64_t r,
                                const std::array<std::int64_t, 3>& lo, const std::array<std::int64_t, 3>& hi);

// Gamma(k) = {(k1, k2, k3) in (Z_N^2)^3 : k1 - k2 + k3 = k, |k1|^2 - |k2|^2 + |k3|^2 = |k|^2}.
// brute: all (k1, k3) with k2 solved; fast: rectangle form (k1 - k).(k3 - k) = 0,
// one lattice line per k1.  Requires k in Z_{3N}^2.
ResonanceCount count_gamma_2d(const FrequencyBox& box, const Freq& k, CountMethod method = CountMethod::fast);

// Ordered pairs (k1, k3) in (Z_N^d)^2 with k1 . k3 = 0, d = 2 or 3.
ResonanceCount count_orthogonal_pairs(const FrequencyBox& box, CountMethod method = CountMethod::fast);

struct OrthogonalCount {
    std::int64_t radius = 0;
    Count total;          // all ordered orthogonal pairs in (Z_N^2)^2
    Count zero_row;       // pairs with k1 = 0
    Count quadrant_core;  // sum_{p <= N} [N/p]^2 phi(p)
};

// Closed form over primitive directions:
//   total = (2N+1)^2 + 8 sum_{s=1}^{N} phi(s) [N/s] (2[N/s] + 1).
OrthogonalCount fast_orthogonal_count(std::int64_t n);

// Gamma'(k): ordered quintuples in Z_N^5 with k1-k2+k3-k4+k5 = k and the
// matching alternating sum of squares equal to k^2.  |k| <= 5N.
// brute: O(N^4) prefix enumeration; mitm: pair tallies on (sum, sum of squares).
ResonanceCount count_gamma_prime_1d(const FrequencyBox& box, std::int64_t k, CountMethod method = CountMethod::mitm);

inline constexpr std::int64_t kGammaDoublePrimeBruteMax = 24;
inline constexpr std::int64_t kGammaDoublePrimeMitmMax = 64;

// Gamma''(k) in Z_N^3, k in Z_{3N}^3.  mitm splits each triple into the pair
// (k1, k2), tallied by (k1 - k2, |k1|^2 - |k2|^2) through exact plane counts,
// and the single k3.
ResonanceCount count_gamma_dprime_3d(const FrequencyBox& box, const Freq& k, CountMethod method = CountMethod::mitm);

struct PlaneTerm {
    std::array<std::int64_t, 3> normal;  // (a, b, c), 0 < c <= b <= a <= N, primitive
    std::int64_t points = 0;             // #(plane . x = 0 in Z_N^3)
};

struct DirectionSum {
    std::int64_t radius = 0;
    Count sum;
    double ratio = 0.0;  // sum / N^4
    std::uint64_t directions = 0;
    std::vector<PlaneTerm> planes;  // filled only when requested
};

inline constexpr std::int64_t kDirectionSumMax = 512;

// sum over primitive 0 < c <= b <= a <= N of [N/a] * #(P_(a,b,c) in Z_N^3).
DirectionSum direction_sum_3d(std::int64_t n, bool record_planes = false);

// Half-tuples of `arity` members of the box, keyed by the sum of the members
// and the sum of their squared norms.  A resonant 2*arity-tuple pairs two
// half-tuples (the members of each sign) with equal keys, so the resonant
// count is sum value(key)^2.
struct TallyEntry {
    Freq linear;
    std::int64_t quadratic = 0;
    std::uint64_t value = 0;
};

struct TallyTable {
    FrequencyBox box{1, 0};
    int arity = 1;
    std::vector<TallyEntry> entries;  // ordered by (linear, quadratic)

    Count total() const;
    Count sum_of_squares() const;
};

inline constexpr double kTallyTableBudget = 5e7;  // materialised half-tuples
inline constexpr double kTallyWorkBudget = 4e9;   // slice-engine work estimate
inline constexpr double kBruteWorkBudget = 2e9;

TallyTable tuple_tally(const FrequencyBox& box, int arity);

// #{(k_1, ..., k_2r) : sum (-1)^{i+1} k_i = 0, sum (-1)^{i+1} |k_i|^2 = 0}.
// fast: slice-by-slice convolution of per-axis histograms; brute: the first
// 2r-1 members enumerated and the last one solved.
Count resonant_tuple_count(const FrequencyBox& box, int arity, CountMethod method = CountMethod::fast);

// Per-axis product histogram for the rectangle form of Gamma(k): for an
// anchor coordinate c, the multiset of u*v over (u, v) with c+u, c+v, c+u+v
// all in [-N, N].  Returned as (value, multiplicity), ascending by value.
std::vector<std::pair<std::int64_t, std::uint64_t>> axis_product_histogram(std::int64_t n, std::int64_t c);

}  // namespace reslab
