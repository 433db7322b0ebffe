#include "reslab/irrational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <mpfr.h>

#include "reslab/lattice.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

void TorusSpec::validate() const {
    if (!gamma.is_positive()) throw DomainError("torus ratio gamma must be positive");
}

std::string TorusSpec::lattice_description() const { return "Z x (1/gamma) Z, gamma = " + gamma.to_string(); }

namespace {

// Partial quotients a_0 (integer part), a_1, ... pulled on demand.
class QuotientTape {
public:
    explicit QuotientTape(const GammaPreset& gamma) : gamma_(gamma), src_(gamma_) { push(src_.integer_part()); }

    bool ensure(std::size_t i) {
        while (a_.size() <= i) {
            auto next = src_.next();
            if (!next) return false;
            push(*next);
        }
        return true;
    }
    std::uint64_t operator[](std::size_t i) const { return a_[i]; }

    Mat2 product(std::size_t last) const {
        std::vector<BigInt> qs;
        qs.reserve(last + 1);
        for (std::size_t i = 0; i <= last; ++i) qs.emplace_back(static_cast<unsigned long>(a_[i]));
        return convergent_product(qs);
    }

private:
    void push(const BigInt& x) {
        if (x < 0 || !x.fits_ulong_p()) throw OverflowError("partial quotient exceeds 64 bits");
        a_.push_back(x.get_ui());
    }

    GammaPreset gamma_;
    QuotientSource src_;
    std::vector<std::uint64_t> a_;
};

// Outward rounding of num/den to multiples of 2^-bits.
constexpr unsigned kDyadicBits = 256;

ExactRational dyadic_floor(const BigInt& num, const BigInt& den) {
    BigInt f;
    BigInt scaled = num << kDyadicBits;
    mpz_fdiv_q(f.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
    ExactRational r(f, BigInt(1) << kDyadicBits);
    r.canonicalize();
    return r;
}

ExactRational dyadic_ceil(const BigInt& num, const BigInt& den) {
    BigInt f;
    BigInt scaled = num << kDyadicBits;
    mpz_cdiv_q(f.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
    ExactRational r(f, BigInt(1) << kDyadicBits);
    r.canonicalize();
    return r;
}

// q^2 - p^2 / (P/Q)^2 = (q^2 P^2 - p^2 Q^2) / P^2, rounded outward.
RationalInterval defect_at(const BigInt& p, const BigInt& q, const BigInt& P, const BigInt& Q) {
    const BigInt P2 = P * P;
    const BigInt num = q * q * P2 - p * p * Q * Q;
    return {dyadic_floor(num, P2), dyadic_ceil(num, P2)};
}

RationalInterval hull(const RationalInterval& a, const RationalInterval& b) {
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

// gamma lies between consecutive convergents, and the defect of (p, q) is
// monotone in gamma, so each bracket of gamma brackets the defect.
RationalInterval bracket_defect(QuotientTape& tape, std::size_t index, const Mat2& conv, const BigInt& multiplier) {
    const BigInt& p = conv.a;
    const BigInt& q = conv.c;
    BigInt P0 = conv.a, Q0 = conv.c, Pp = conv.b, Qp = conv.d;
    RationalInterval d0 = RationalInterval::point(0);
    const ExactRational floor_width(BigInt(1), BigInt(1) << (kDyadicBits - 6));
    for (std::size_t j = index + 1; j < index + 400; ++j) {
        if (!tape.ensure(j)) throw PrecisionError("expansion ended while bracketing an irrational preset");
        const BigInt a(static_cast<unsigned long>(tape[j]));
        BigInt P1 = a * P0 + Pp, Q1 = a * Q0 + Qp;
        RationalInterval d1 = defect_at(p, q, P1, Q1);
        const RationalInterval both = hull(d0, d1);
        const ExactRational tight = both.magnitude() / ExactRational(BigInt(1) << 64);
        if (both.width() <= std::max(tight, floor_width)) {
            const ExactRational c2 = ExactRational(multiplier * multiplier);
            return RationalInterval(both.lo() * c2, both.hi() * c2);
        }
        Pp = std::move(P0);
        Qp = std::move(Q0);
        P0 = std::move(P1);
        Q0 = std::move(Q1);
        d0 = std::move(d1);
    }
    throw PrecisionError("defect enclosure did not tighten within 400 further quotients");
}

ExactRational square(const BigInt& x) { return ExactRational(BigInt(x * x)); }

struct Candidate {
    BigInt p, q, multiplier;
    std::int64_t index = -1;
    RationalInterval defect;
};

Candidate certify(const GammaPreset& gamma, QuotientTape& tape, std::size_t index, std::uint64_t multiplier) {
    const Mat2 conv = tape.product(index);
    Candidate c;
    c.index = static_cast<std::int64_t>(index);
    c.multiplier = static_cast<unsigned long>(multiplier);
    c.p = conv.a * c.multiplier;
    c.q = conv.c * c.multiplier;
    if (auto g2 = gamma.exact_square()) {
        ExactRational d = square(c.q) - square(c.p) / *g2;
        c.defect = RationalInterval::point(d);
    } else {
        c.defect = bracket_defect(tape, index, conv, c.multiplier);
    }
    return c;
}

double preset_to_double(const GammaPreset& gamma) { return to_double(enclose(gamma, 80).midpoint()); }

}  // namespace

ApproximationWitness find_dc_witness(const GammaPreset& gamma, std::int64_t n, std::size_t depth) {
    if (n < 1) throw DomainError("find_dc_witness needs N >= 1");
    if (depth < 1) throw DomainError("find_dc_witness needs depth >= 1");
    if (!gamma.is_positive()) throw DomainError("gamma must be positive");

    ApproximationWitness w;
    w.gamma = gamma;
    w.n = n;
    if (gamma.is_rational()) {
        const ExactRational v = gamma.exact_value();
        w.multiplier = static_cast<long>(n + 1);
        w.p = w.multiplier * v.get_num();
        w.q = w.multiplier * v.get_den();
        w.defect = RationalInterval::point(0);
        return w;
    }

    const ExactRational limit(BigInt(1), BigInt(static_cast<long>(n * n)));
    const double g = preset_to_double(gamma);
    const double nd = static_cast<double>(n);
    QuotientTape tape(gamma);

    // Convergent i uses a_0..a_i.  Its defect is
    // 2 / (gamma (alpha_{i+1} + q_{i-1}/q_i)) up to O(q_i^-2).
    constexpr std::size_t kLookahead = 12;
    double ratio = 0.0;              // q_{i-1} / q_i
    double qi = 1.0, qprev = 0.0;    // saturate to inf once large
    double best_est = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    std::uint64_t best_mult = 1;
    std::size_t scanned = 0;
    for (std::size_t i = 0; i < depth; ++i) {
        if (!tape.ensure(i + 1)) break;
        scanned = i + 1;
        const double a = static_cast<double>(tape[i + 1]);
        // complete quotient alpha_{i+1} from a few quotients of lookahead
        double alpha = 0.0;
        for (std::size_t j = i + kLookahead; j > i + 1; --j)
            if (tape.ensure(j)) alpha = 1.0 / (static_cast<double>(tape[j]) + alpha);
        alpha += a;
        const std::uint64_t mult = qi > nd ? 1 : static_cast<std::uint64_t>(std::floor(nd / qi)) + 1;
        const double m2 = static_cast<double>(mult) * static_cast<double>(mult);
        const double est = 2.0 / (g * (alpha + ratio)) * m2;
        if (est < best_est * (1 - 1e-12)) {
            best_est = est;
            best_index = i;
            best_mult = mult;
        }
        if (est * nd * nd < 1 + 1e-9) {
            Candidate c = certify(gamma, tape, i, mult);
            if (c.defect.magnitude() < limit && c.q > n) {
                w.p = std::move(c.p);
                w.q = std::move(c.q);
                w.multiplier = std::move(c.multiplier);
                w.convergent_index = c.index;
                w.defect = std::move(c.defect);
                w.quotients_scanned = scanned;
                return w;
            }
        }
        const double qnext = a * qi + qprev;
        qprev = qi;
        qi = qnext;
        ratio = 1.0 / (a + ratio);
    }
    if (scanned == 0) throw DomainError("gamma has no partial quotients to scan");
    Candidate best = certify(gamma, tape, best_index, best_mult);
    throw WitnessNotFound("no approximation witness for gamma = " + gamma.to_string() + " at N = " + std::to_string(n) +
                              " within " + std::to_string(scanned) + " quotients; best defect " +
                              std::to_string(to_double(best.defect.magnitude())),
                          best.defect, best.p, best.q);
}

RationalInterval defect_enclosure(const GammaPreset& gamma, const BigInt& p, const BigInt& q) {
    if (!gamma.is_positive()) throw DomainError("gamma must be positive");
    if (auto g2 = gamma.exact_square()) return RationalInterval::point(square(q) - square(p) / *g2);
    const unsigned bits = static_cast<unsigned>(2 * mpz_sizeinbase(p.get_mpz_t(), 2) + 80);
    const RationalInterval g = enclose(gamma, bits);
    const ExactRational p2 = square(p), q2 = square(q);
    // larger gamma, larger defect
    return {q2 - p2 / (g.lo() * g.lo()), q2 - p2 / (g.hi() * g.hi())};
}

PhaseValue phase_value(const Freq& k1, const Freq& k2, const Freq& k3, const Freq& k, const BigInt& p, const BigInt& q,
                       const GammaPreset& gamma) {
    for (const Freq* v : {&k1, &k2, &k3, &k})
        if (v->dim != 2) throw DomainError("phase_value takes planar frequencies");
    for (int i = 0; i < 2; ++i)
        if (k1[i] - k2[i] + k3[i] != k[i]) throw DomainError("phase_value needs k1 - k2 + k3 = k");
    PhaseValue v;
    auto sq = [](std::int64_t x) { return x * x; };
    v.y_defect = sq(k1[1]) - sq(k2[1]) + sq(k3[1]) - sq(k[1]);
    v.resonance = sq(k1[0]) - sq(k2[0]) + sq(k3[0]) - sq(k[0]) + v.y_defect;
    const RationalInterval delta = defect_enclosure(gamma, p, q);
    const RationalInterval lead = RationalInterval::point(square(q) * ExactRational(BigInt(static_cast<long>(v.resonance))));
    v.enclosure = lead - delta * RationalInterval::point(ExactRational(BigInt(static_cast<long>(v.y_defect))));
    if (v.enclosure.width() >= 1)
        throw RegimeSeparationError("phase enclosure " + v.enclosure.to_string() + " is too wide to classify");
    v.value = to_long_double(v.enclosure.midpoint());
    return v;
}

namespace {

// theta = (q^2 t) mod 2 pi, kept to 256 bits; times(j) = (j theta) mod 2 pi.
class ReducedAngle {
public:
    ReducedAngle(const BigInt& q2, double t) {
        const mpfr_prec_t wide = static_cast<mpfr_prec_t>(mpz_sizeinbase(q2.get_mpz_t(), 2) + 256);
        mpfr_t x, tau;
        mpfr_inits2(wide, x, tau, static_cast<mpfr_ptr>(nullptr));
        mpfr_const_pi(tau, MPFR_RNDN);
        mpfr_mul_2ui(tau, tau, 1, MPFR_RNDN);
        mpfr_set_z(x, q2.get_mpz_t(), MPFR_RNDN);
        mpfr_mul_d(x, x, t, MPFR_RNDN);
        mpfr_remainder(x, x, tau, MPFR_RNDN);
        mpfr_inits2(kPrec, theta_, tau_, static_cast<mpfr_ptr>(nullptr));
        mpfr_set(theta_, x, MPFR_RNDN);
        mpfr_set(tau_, tau, MPFR_RNDN);
        mpfr_clears(x, tau, static_cast<mpfr_ptr>(nullptr));
    }
    ~ReducedAngle() { mpfr_clears(theta_, tau_, static_cast<mpfr_ptr>(nullptr)); }
    ReducedAngle(const ReducedAngle&) = delete;
    ReducedAngle& operator=(const ReducedAngle&) = delete;

    double times(std::int64_t j) const {
        mpfr_t x;
        mpfr_init2(x, kPrec + 64);
        mpfr_mul_si(x, theta_, static_cast<long>(j), MPFR_RNDN);
        mpfr_remainder(x, x, tau_, MPFR_RNDN);
        const double r = mpfr_get_d(x, MPFR_RNDN);
        mpfr_clear(x);
        return r;
    }

private:
    static constexpr mpfr_prec_t kPrec = 256;
    mpfr_t theta_, tau_;
};

long double log10_of(const BigInt& x) {
    mpfr_t v;
    mpfr_init2(v, 64);
    mpfr_set_z(v, x.get_mpz_t(), MPFR_RNDN);
    mpfr_log10(v, v, MPFR_RNDN);
    const long double r = mpfr_get_ld(v, MPFR_RNDN);
    mpfr_clear(v);
    return r;
}

std::uint64_t histogram_total(const AxisHistogram& h) {
    std::uint64_t s = 0;
    for (const auto& [v, c] : h) s += c;
    return s;
}

std::int64_t histogram_reach(const AxisHistogram& h) {
    return h.empty() ? 0 : std::max(std::abs(h.front().first), std::abs(h.back().first));
}

struct AnchorWork {
    PhaseSplit split;
    std::int64_t max_resonant_y = 0;
};

}  // namespace

SplitReport picard_split(const GammaPreset& gamma, std::int64_t n, double t, std::size_t depth) {
    if (n < 1) throw DomainError("picard_split needs N >= 1");
    if (n > kSplitMax) throw BudgetError("picard_split is capped at N = " + std::to_string(kSplitMax));
    if (!(t > 0) || t > kSplitMaxTime) throw DomainError("picard_split needs 0 < t <= 0.1");

    SplitReport rep;
    rep.n = n;
    rep.t = t;
    rep.witness = find_dc_witness(gamma, n, depth);
    const BigInt& q = rep.witness.q;
    const BigInt q2 = q * q;
    const RationalInterval& delta = rep.witness.defect;
    const double dd = to_double(delta.midpoint());
    const double eps = to_double(delta.midpoint() / ExactRational(q2));
    const long double q2l = to_long_double(ExactRational(q2));
    const long double inv_q2 = 1.0L / q2l;
    rep.log10_q2 = static_cast<double>(log10_of(q2));

    const std::int64_t h = n / 2, side = 2 * h + 1;
    const AxisHistograms axes(n, h);
    std::int64_t xmax = 0;
    for (const auto& hist : axes.by_anchor) xmax = std::max(xmax, histogram_reach(hist));

    const ReducedAngle angle(q2, t);
    std::vector<Complex> rot(static_cast<std::size_t>(2 * xmax + 1));
    for (std::int64_t x = -xmax; x <= xmax; ++x) rot[static_cast<std::size_t>(x + xmax)] = std::polar(1.0, angle.times(2 * x));
    auto rot_at = [&](std::int64_t x) { return rot[static_cast<std::size_t>(x + xmax)]; };

    // y-side weights c_y e^{2 i Y theta} e^{-2 i delta Y t}
    std::vector<std::vector<Complex>> wy(axes.by_anchor.size());
    for (std::size_t c = 0; c < axes.by_anchor.size(); ++c)
        for (const auto& [y, cy] : axes.by_anchor[c])
            wy[c].push_back(static_cast<double>(cy) * rot_at(y) * std::polar(1.0, -2 * dd * static_cast<double>(y) * t));

    // Rational gamma: the lattice is (N+1) b Z^2 and the coefficient comes
    // from the same kernel as the rational-torus iterate.
    const bool rational_path = delta.is_point() && delta.lo() == 0 && q <= 1'000'000;
    const std::int64_t m = rational_path ? static_cast<std::int64_t>(q.get_si()) : 0;
    std::unique_ptr<PhaseTable> phases;
    if (rational_path) phases = std::make_unique<PhaseTable>(cubic_phase_table(n, m, t));

    const double scale = std::pow(normalisation_radius(n), -3.0);
    auto work = parallel_map<AnchorWork>(static_cast<std::size_t>(side * side), [&](std::size_t i) {
        const std::int64_t kx = static_cast<std::int64_t>(i) / side - h, ky = static_cast<std::int64_t>(i) % side - h;
        const AxisHistogram& hx = axes.at(kx);
        const AxisHistogram& hy = axes.at(ky);
        const std::vector<Complex>& wky = wy[static_cast<std::size_t>(ky + h)];
        AnchorWork out;
        PhaseSplit& s = out.split;
        s.anchor = Freq{kx, ky};

        // Resonant tuples: X + Y = 0, Phi = 2 delta Y.
        Complex res{0.0, 0.0};
        std::size_t j = hy.size();
        for (const auto& [x, cx] : hx) {
            while (j > 0 && hy[j - 1].first > -x) --j;
            if (j == 0) break;
            const auto& [y, cy] = hy[j - 1];
            if (y != -x) continue;
            res += static_cast<double>(cx * cy) * oscillatory_integral(2 * dd * static_cast<double>(y), t);
            s.resonant_count += Count(cx) * Count(cy);
            s.max_resonant_phase = std::max(s.max_resonant_phase, std::abs(2 * dd * static_cast<double>(y)));
            out.max_resonant_y = std::max(out.max_resonant_y, std::abs(y));
        }

        // Non-resonant tuples: q^2 I = (1 - e^{2iX theta} w_Y / c_Y) / (i Phi/q^2).
        Complex acc{0.0, 0.0};
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& [x, cx] : hx) {
            const Complex ex = rot_at(x);
            Complex inner{0.0, 0.0};
            for (std::size_t k = 0; k < hy.size(); ++k) {
                const std::int64_t y = hy[k].first, sum = x + y;
                if (sum == 0) continue;
                const double d = -2.0 * static_cast<double>(sum) + 2 * eps * static_cast<double>(y);
                inner += (static_cast<double>(hy[k].second) - ex * wky[k]) / d;
                dmin = std::min(dmin, std::abs(d));
            }
            acc += static_cast<double>(cx) * inner;
        }
        s.nonresonant_count = Count(histogram_total(hx)) * Count(histogram_total(hy)) - s.resonant_count;
        s.resonant_sum = scale * res;
        s.nonresonant_scaled = scale * acc * Complex(0.0, -1.0);
        s.nonresonant_sum = Complex(static_cast<double>(static_cast<long double>(s.nonresonant_scaled.real()) * inv_q2),
                                    static_cast<double>(static_cast<long double>(s.nonresonant_scaled.imag()) * inv_q2));
        if (rational_path) {
            s.coefficient = cubic_coefficient_2d(axes, *phases, m, n, s.anchor, t);
        } else {
            const double theta = angle.times(kx * kx + ky * ky) - dd * static_cast<double>(ky * ky) * t;
            s.coefficient = kPicardConstant * std::polar(1.0, -theta) * (s.resonant_sum + s.nonresonant_sum);
        }
        s.min_nonresonant_phase = q2l * static_cast<long double>(dmin);
        s.resonant_lower = t / 2 * scale * s.resonant_count.to_double();
        s.nonresonant_upper = s.nonresonant_count == Count(0)
                                  ? 0.0L
                                  : static_cast<long double>(scale) * static_cast<long double>(s.nonresonant_count.to_double()) * 2 /
                                        s.min_nonresonant_phase;
        return out;
    });

    // Certification, decided exactly from the defect enclosure.
    std::int64_t res_y = 0;
    rep.max_resonant_phase = 0;
    rep.min_nonresonant_phase = std::numeric_limits<long double>::infinity();
    long double squares = 0;
    for (auto& w : work) {
        res_y = std::max(res_y, w.max_resonant_y);
        rep.max_resonant_phase = std::max(rep.max_resonant_phase, w.split.max_resonant_phase);
        rep.min_nonresonant_phase = std::min(rep.min_nonresonant_phase, w.split.min_nonresonant_phase);
        const long double gap = static_cast<long double>(w.split.resonant_lower) - w.split.nonresonant_upper;
        if (gap > 0) squares += gap * gap;
        rep.anchors.push_back(std::move(w.split));
    }
    const ExactRational dmag = delta.magnitude();
    const ExactRational res_bound = 2 * dmag * ExactRational(BigInt(static_cast<long>(res_y)));
    if (res_bound > 12)
        throw RegimeSeparationError("resonant phases reach " + std::to_string(to_double(res_bound)) + " > 12");
    const ExactRational pi_third_lower(BigInt(1047197551196597L), BigInt(1000000000000000L));
    if (ExactRational(t) * res_bound > pi_third_lower)
        throw RegimeSeparationError("t * max resonant phase exceeds pi/3");
    const ExactRational nonres_bound = 2 * ExactRational(q2) - 2 * dmag * ExactRational(BigInt(static_cast<long>(xmax)));
    if (nonres_bound < ExactRational(BigInt(static_cast<long>(n * n - 12))))
        throw RegimeSeparationError("non-resonant phases fall below N^2 - 12");

    const double gamma_d = to_double(enclose(gamma, 80).midpoint());
    rep.l2_lower_bound = 2 * pi * std::sqrt(gamma_d) * static_cast<double>(std::sqrt(squares));
    rep.ratio_to_t_log =
        n > 1 ? rep.l2_lower_bound / (t * std::log(static_cast<double>(n))) : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

}  // namespace reslab
