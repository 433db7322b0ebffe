#pragma once

#include <cstdint>
#include <string>

#include "reslab/common.hpp"
#include "reslab/lattice.hpp"

namespace reslab {

// phi_{m,N}(x) = N^{-d/2} sum_{k in Z_N^d} e^{i m k.x}.  At N = 0 the packet is
// the single frequency 0 with amplitude 1.
struct WavePacketSpec {
    int dim = 2;
    std::int64_t m = 1;
    std::int64_t n = 1;

    void validate(int max_dim = 3) const;
    // ||phi||_{L^2(T^d)}^2 = (2 pi)^d (2N+1)^d / N^d, independent of m.
    double l2_norm_squared() const;
    double amplitude() const;  // N^{-d/2}
};

enum class NormKind { l4_t2, l6_t1, l4_t3 };

std::string to_string(NormKind k);

// Space-time norms over the full period t in [0, 2 pi], written as
// (2 pi)^{1+d} N^{-(p/2) d} times the resonant 2p-tuple count.
struct NormReport {
    NormKind kind;
    std::int64_t n = 0, m = 1;
    Count resonant_tuple_count;
    double norm_powered = 0.0;  // ||e^{it Delta} phi||^p, p = 4 or 6
    double ratio_to_log = 0.0;  // norm_powered / log N, NaN for N <= 1
    CountMethod method = CountMethod::fast;
    // 3d only: norm_powered / N and norm_powered / (N ||phi||^4).
    double per_n = 0.0;
    double per_n_packet = 0.0;
};

inline constexpr std::int64_t kL4TwoDimMax = 64;
inline constexpr std::int64_t kL6OneDimMax = 200;
inline constexpr std::int64_t kL4ThreeDimMax = 16;

// method: fast (slice engine), mitm (materialised tally table) or brute.
NormReport l4_norm_2d(std::int64_t n, std::int64_t m = 1, CountMethod method = CountMethod::fast);
NormReport l6_norm_1d(std::int64_t n, std::int64_t m = 1, CountMethod method = CountMethod::fast);
NormReport l4_norm_3d(std::int64_t n, CountMethod method = CountMethod::fast);

// sum_{k in Z_{[N/2]}^2} |Gamma(k)|, the lower-bound chain for the L^4 count.
Count gamma_half_box_sum(std::int64_t n);

}  // namespace reslab
