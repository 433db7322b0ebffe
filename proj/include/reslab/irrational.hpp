#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reslab/common.hpp"
#include "reslab/interval.hpp"
#include "reslab/numtheory.hpp"
#include "reslab/picard.hpp"

namespace reslab {

// The torus R^2 / (2 pi Z x 2 pi gamma Z); its frequency lattice is Z x (1/gamma) Z.
struct TorusSpec {
    GammaPreset gamma;

    void validate() const;
    std::string lattice_description() const;
};

// (p, q) with |q^2 - p^2/gamma^2| < 1/N^2 and q > N.
struct ApproximationWitness {
    GammaPreset gamma;
    std::int64_t n = 0;
    BigInt p, q;
    // Convergent p_i/q_i the pair was taken from (-1 for the rational
    // construction) and the integer multiplier applied to it.
    std::int64_t convergent_index = -1;
    BigInt multiplier = 1;
    // Enclosure of the signed defect q^2 - p^2/gamma^2.
    RationalInterval defect;
    std::size_t quotients_scanned = 0;

    double defect_upper() const { return to_double(defect.magnitude()); }
};

class WitnessNotFound : public DomainError {
public:
    WitnessNotFound(const std::string& what, RationalInterval best_defect, BigInt best_p, BigInt best_q)
        : DomainError(what), best_defect(std::move(best_defect)), best_p(std::move(best_p)), best_q(std::move(best_q)) {}
    const char* kind() const noexcept override { return "not_found"; }

    RationalInterval best_defect;  // signed defect at the best pair scanned
    BigInt best_p, best_q;
};

// The enclosure could not place a phase in the resonant (|Phi| <= 12) or
// non-resonant (|Phi| >= N^2 - 12) regime, or t is too large for the
// resonant integrals to stay near t.
class RegimeSeparationError : public PrecisionError {
public:
    using PrecisionError::PrecisionError;
    const char* kind() const noexcept override { return "regime_separation"; }
};

inline constexpr std::size_t kDefaultWitnessDepth = 2'000'000;

// Scans convergents p_i/q_i of gamma (and integer multiples when q_i <= N).
// Rational gamma = a/b gives p = (N+1) a, q = (N+1) b with defect 0.
ApproximationWitness find_dc_witness(const GammaPreset& gamma, std::int64_t n,
                                     std::size_t depth = kDefaultWitnessDepth);

// Signed defect q^2 - p^2/gamma^2: exact when gamma^2 is rational, otherwise
// an enclosure of width below 2^-64 |defect| (or 2^-256).
RationalInterval defect_enclosure(const GammaPreset& gamma, const BigInt& p, const BigInt& q);

struct PhaseValue {
    RationalInterval enclosure;
    long double value = 0;       // nearest to the enclosure midpoint
    std::int64_t resonance = 0;  // |k1|^2 - |k2|^2 + |k3|^2 - |k|^2
    std::int64_t y_defect = 0;   // the same for the y components
};

// Phi = q^2 kx-part + (p^2/gamma^2) ky-part, evaluated as
// q^2 * resonance - (q^2 - p^2/gamma^2) * y_defect.
PhaseValue phase_value(const Freq& k1, const Freq& k2, const Freq& k3, const Freq& k, const BigInt& p, const BigInt& q,
                       const GammaPreset& gamma);

struct PhaseSplit {
    Freq anchor;
    // N^-3 times the sum of int_0^t e^{-i Phi s} ds over each part.
    Complex resonant_sum;
    Complex nonresonant_sum;      // underflows to 0 once q^2 leaves double range
    Complex nonresonant_scaled;   // q^2 * nonresonant_sum
    Complex coefficient;          // -i e^{-i theta_k} (resonant_sum + nonresonant_sum)
    Count resonant_count, nonresonant_count;
    double max_resonant_phase = 0;
    long double min_nonresonant_phase = 0;
    double resonant_lower = 0;          // (t/2) N^-3 resonant_count
    long double nonresonant_upper = 0;  // N^-3 nonresonant_count * 2 / min_nonresonant_phase
};

struct SplitReport {
    ApproximationWitness witness;
    std::int64_t n = 0;
    double t = 0;
    std::vector<PhaseSplit> anchors;  // k in Z_{[N/2]}^2, lexicographic
    double max_resonant_phase = 0;
    long double min_nonresonant_phase = 0;
    double log10_q2 = 0;
    // 2 pi sqrt(gamma) (sum_k max(0, resonant_lower - nonresonant_upper)^2)^{1/2}
    double l2_lower_bound = 0;
    double ratio_to_t_log = 0;  // l2_lower_bound / (t log N), NaN at N = 1
};

inline constexpr std::int64_t kSplitMax = 32;
inline constexpr double kSplitMaxTime = 0.1;

// Splits the cubic iterate on the rescaled lattice into resonant and
// non-resonant tuples at every anchor of Z_{[N/2]}^2 and certifies
// |Phi| <= 12, |Phi| >= N^2 - 12 and t max|Phi_res| <= pi/3.
SplitReport picard_split(const GammaPreset& gamma, std::int64_t n, double t, std::size_t depth = kDefaultWitnessDepth);

}  // namespace reslab
