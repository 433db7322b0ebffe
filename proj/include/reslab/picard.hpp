#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reslab/common.hpp"
#include "reslab/strichartz.hpp"

namespace reslab {

using Complex = std::complex<double>;

// int_0^t e^{-i Phi s} ds.  Below |Phi| = 1e-12 the second-order series
// t - i Phi t^2 / 2 replaces the cancelling closed form.
Complex oscillatory_integral(double phi, double t);

inline constexpr double kNearResonantThreshold = 1e-12;

// Constant in front of the Duhamel integral: -i mu with mu = +1.
inline const Complex kPicardConstant{0.0, -1.0};

enum class PicardRoute { automatic, full_sum, resonant };

std::string to_string(PicardRoute r);
PicardRoute parse_picard_route(const std::string& s);

struct CoefficientEntry {
    Freq anchor;     // k
    Freq frequency;  // m k
    Complex value;
};

// Fourier coefficients of the first Picard iterate A[phi_{m,N}](t) on the
// support m Z_{3N}^2 (cubic, d = 2) or m Z_{5N} (quintic, d = 1).
struct CoefficientTable {
    WavePacketSpec spec;
    double t = 0.0;
    PicardRoute route = PicardRoute::full_sum;
    std::vector<CoefficientEntry> entries;  // anchors in lexicographic order

    // (2 pi)^{d/2} (sum |value|^2)^{1/2}
    double l2_norm() const;
    const CoefficientEntry& at(const Freq& anchor) const;
};

inline constexpr std::int64_t kPicardResonantMax2d = 48;
inline constexpr std::int64_t kPicardFullSumMax2d = 16;
inline constexpr std::int64_t kPicardMax1d = 32;

// True when t = 2 pi j / m^2 for an integer j >= 0 (relative tolerance 1e-12).
bool is_full_period_multiple(double t, std::int64_t m);

// automatic takes the resonant closed form at t = 2 pi j / m^2, where every
// non-resonant tuple integrates to zero, and the full tuple sum otherwise.
CoefficientTable picard_coefficients(const WavePacketSpec& spec, double t, PicardRoute route = PicardRoute::automatic);

double picard_l2_norm(const WavePacketSpec& spec, double t, PicardRoute route = PicardRoute::automatic);

// (2 pi)^{d/2} (2 pi / m^2) N^{-e} (sum_{k in Z_{N/2}^d} G(k)^2)^{1/2} with
// (G, e) = (Gamma, 3) for d = 2 and (Gamma', 5/2) for d = 1.  Bounds the L^2
// norm at t = 2 pi / m^2 from below because it keeps only part of the support.
double lower_bound_certificate(int dim, std::int64_t n, std::int64_t m);

// ---------------------------------------------------------------------------
// Building blocks shared with the irrational-torus code.

using AxisHistogram = std::vector<std::pair<std::int64_t, std::uint64_t>>;

// axis_product_histogram for every anchor coordinate c in [-R, R].
struct AxisHistograms {
    std::int64_t n = 0, reach = 0;
    std::vector<AxisHistogram> by_anchor;

    AxisHistograms(std::int64_t n, std::int64_t reach);
    const AxisHistogram& at(std::int64_t c) const { return by_anchor[static_cast<std::size_t>(c + reach)]; }
};

// |Gamma(k)| = sum_X h_kx(X) h_ky(-X), by merging the sorted histograms.
Count gamma_from_axes(const AxisHistogram& hx, const AxisHistogram& hy);

// Oscillatory integrals I(scale * S, t) for S in [-smax, smax].
struct PhaseTable {
    std::int64_t smax = 0;
    std::vector<Complex> values;

    PhaseTable(std::int64_t smax, double scale, double t);
    const Complex& operator()(std::int64_t s) const { return values[static_cast<std::size_t>(s + smax)]; }
};

// sum over (X, Y) of h_x(X) h_y(Y) I(X + Y): the tuple sum at one anchor, with
// the pair multiplicities collected exactly before any rounding.
Complex tuple_sum_2d(const AxisHistogram& hx, const AxisHistogram& hy, const PhaseTable& phases);

// c e^{-i theta} scale * sum
Complex apply_prefactor(const Complex& sum, double theta, double scale);

// Phase table for the cubic d = 2 iterate on m Z^2, covering anchors in Z_{3N}^2.
PhaseTable cubic_phase_table(std::int64_t n, std::int64_t m, double t);

// Full tuple-sum coefficient of the cubic d = 2 iterate at anchor k.
Complex cubic_coefficient_2d(const AxisHistograms& axes, const PhaseTable& phases, std::int64_t m, std::int64_t n,
                             const Freq& k, double t);

}  // namespace reslab
