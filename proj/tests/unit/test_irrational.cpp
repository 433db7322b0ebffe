#include <doctest.h>

#include <cmath>
#include <mpfr.h>

#include "reslab/irrational.hpp"
#include "reslab/lattice.hpp"
#include "reslab/parallel.hpp"
#include "reslab/picard.hpp"

using namespace reslab;

namespace {

// e in [S/K!, (S+2)/K!] with S = sum_{k<=K} K!/k!: the tail is below 2/(K+1)!.
RationalInterval e_series(unsigned terms) {
    BigInt f = 1, s = 0;
    for (unsigned k = terms; k >= 1; --k) {
        s += f;
        f *= k;
    }
    s += f;  // k = 0 term, f = K!
    return {ExactRational(s, f), ExactRational(BigInt(s + 2), f)};
}

// Defect enclosure of (p, q) from an independent enclosure of gamma.
RationalInterval defect_from(const RationalInterval& g, const BigInt& p, const BigInt& q) {
    const ExactRational q2(BigInt(q * q)), p2(BigInt(p * p));
    return {q2 - p2 / (g.lo() * g.lo()), q2 - p2 / (g.hi() * g.hi())};
}

unsigned series_terms_for(const BigInt& p) {
    // K! > 2^(2 bits(p) + 200)
    const double need = 2.0 * double(mpz_sizeinbase(p.get_mpz_t(), 2)) + 200;
    double lg = 0;
    unsigned k = 1;
    while (lg < need) lg += std::log2(double(++k));
    return k;
}

// (q^2 Q - delta Qy) t mod 2 pi, at high precision.
double reduced_phase(const BigInt& q, const ExactRational& delta, std::int64_t resonance, std::int64_t y_defect, double t) {
    mpfr_t a, b, tau;
    const mpfr_prec_t prec = static_cast<mpfr_prec_t>(2 * mpz_sizeinbase(q.get_mpz_t(), 2) + 300);
    mpfr_inits2(prec, a, b, tau, static_cast<mpfr_ptr>(nullptr));
    BigInt lead = q * q * resonance;
    mpfr_set_z(a, lead.get_mpz_t(), MPFR_RNDN);
    mpfr_set_q(b, delta.get_mpq_t(), MPFR_RNDN);
    mpfr_mul_si(b, b, y_defect, MPFR_RNDN);
    mpfr_sub(a, a, b, MPFR_RNDN);
    mpfr_mul_d(a, a, t, MPFR_RNDN);
    mpfr_const_pi(tau, MPFR_RNDN);
    mpfr_mul_2ui(tau, tau, 1, MPFR_RNDN);
    mpfr_remainder(a, a, tau, MPFR_RNDN);
    const double r = mpfr_get_d(a, MPFR_RNDN);
    mpfr_clears(a, b, tau, static_cast<mpfr_ptr>(nullptr));
    return r;
}

const GammaPreset kE = GammaPreset::e();

}  // namespace

TEST_CASE("torus lattice description") {
    CHECK_NOTHROW(TorusSpec{GammaPreset::parse("sqrt:3")}.validate());
    CHECK(TorusSpec{kE}.lattice_description().find("gamma = e") != std::string::npos);
}

TEST_CASE("rational witnesses") {
    auto w = find_dc_witness(GammaPreset::parse("rat:1/1"), 10);
    CHECK(w.p == 11);
    CHECK(w.q == 11);
    CHECK(w.defect.is_point());
    CHECK(w.defect.lo() == 0);
    auto w2 = find_dc_witness(GammaPreset::parse("rat:6/4"), 4);
    CHECK(w2.p == 15);
    CHECK(w2.q == 10);
    CHECK(w2.defect.lo() == 0);
    CHECK_THROWS_AS(find_dc_witness(GammaPreset::parse("rat:1/1"), 0), DomainError);
}

TEST_CASE("quadratic irrationals have no witness") {
    for (std::uint64_t d = 2; d <= 50; ++d) {
        const std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(double(d)));
        if (r * r == d) continue;
        try {
            find_dc_witness(GammaPreset::square_root(d), 10, 300);
            FAIL("witness found for sqrt ", d);
        } catch (const WitnessNotFound& e) {
            // q^2 d - p^2 is a nonzero integer, so the defect is at least 1/d.
            REQUIRE(e.best_defect.is_point());
            REQUIRE(e.best_defect.mignitude() >= ExactRational(BigInt(1), BigInt(static_cast<long>(d))));
            const ExactRational direct = ExactRational(BigInt(e.best_q * e.best_q)) -
                                         ExactRational(BigInt(e.best_p * e.best_p), BigInt(static_cast<long>(d)));
            REQUIRE(direct == e.best_defect.lo());
            REQUIRE(e.best_q > 10);
        }
    }
    try {
        find_dc_witness(GammaPreset::square_root(2), 10, 1000);
        FAIL("witness found for sqrt 2");
    } catch (const WitnessNotFound& e) {
        CHECK(e.best_defect.mignitude() >= ExactRational(1, 2));
        CHECK(std::string(e.kind()) == "not_found");
    }
}

TEST_CASE("witnesses for e") {
    for (std::int64_t n : {1, 2, 4, 8, 16, 32, 100}) {
        const auto w = find_dc_witness(kE, n);
        REQUIRE(w.q > n);
        const ExactRational limit(BigInt(1), BigInt(static_cast<long>(n * n)));
        REQUIRE(w.defect.magnitude() < limit);
        // independent enclosure of e from its series
        const RationalInterval e = e_series(series_terms_for(w.p));
        const RationalInterval d = defect_from(e, w.p, w.q);
        REQUIRE(d.magnitude() < limit);
        REQUIRE(!(d.hi() < w.defect.lo()));
        REQUIRE(!(w.defect.hi() < d.lo()));
        if (n == 100) CHECK(w.defect.magnitude() < ExactRational(BigInt(1), BigInt(10000)));
    }
    // A short scan fails and reports its best pair.
    CHECK_THROWS_AS(find_dc_witness(kE, 100, 50), WitnessNotFound);
}

TEST_CASE("phase values") {
    const BigInt eleven = 11;
    const GammaPreset one = GammaPreset::parse("rat:1/1");
    auto v0 = phase_value(Freq{1, 2}, Freq{1, 2}, Freq{3, -1}, Freq{3, -1}, eleven, eleven, one);
    CHECK(v0.value == 0);
    CHECK(v0.enclosure.is_point());
    // resonant tuple: k1 - k = (1,0), k3 - k = (0,1)
    auto v1 = phase_value(Freq{1, 0}, Freq{1, 1}, Freq{0, 1}, Freq{0, 0}, eleven, eleven, one);
    CHECK(v1.resonance == 0);
    CHECK(v1.value == 0);
    // k1 - k = (1,0), k3 - k = (-1,0): resonance 2, Phi = 2 q^2
    auto v2 = phase_value(Freq{1, 0}, Freq{0, 0}, Freq{-1, 0}, Freq{0, 0}, eleven, eleven, one);
    CHECK(v2.resonance == 2);
    CHECK(v2.value == 242);
    CHECK_THROWS_AS(phase_value(Freq{1, 0}, Freq{0, 0}, Freq{0, 0}, Freq{0, 0}, eleven, eleven, one), DomainError);

    const auto w = find_dc_witness(kE, 8);
    const RationalInterval e = e_series(series_terms_for(w.p));
    const ExactRational p2(BigInt(w.p * w.p)), q2(BigInt(w.q * w.q));
    const Freq k{1, -1};
    for (std::int64_t a = -2; a <= 2; ++a)
        for (std::int64_t b = -2; b <= 2; ++b)
            for (std::int64_t c = -2; c <= 2; ++c)
                for (std::int64_t d = -2; d <= 2; ++d) {
                    const Freq k1{1 + a, -1 + b}, k3{1 + c, -1 + d}, k2{1 + a + c, -1 + b + d};
                    const auto v = phase_value(k1, k2, k3, k, w.p, w.q, kE);
                    // Phi = q^2 Qx + (p^2/gamma^2) Qy directly
                    const std::int64_t qx = k1[0] * k1[0] - k2[0] * k2[0] + k3[0] * k3[0] - 1;
                    const ExactRational qy(BigInt(static_cast<long>(v.y_defect)));
                    const ExactRational y_lo = qy * p2 / (v.y_defect >= 0 ? e.hi() * e.hi() : e.lo() * e.lo());
                    const ExactRational y_hi = qy * p2 / (v.y_defect >= 0 ? e.lo() * e.lo() : e.hi() * e.hi());
                    const ExactRational base = q2 * ExactRational(BigInt(static_cast<long>(qx)));
                    REQUIRE(v.enclosure.lo() <= base + y_hi);
                    REQUIRE(base + y_lo <= v.enclosure.hi());
                    REQUIRE(v.resonance == -2 * (a * c + b * d));
                    if (v.resonance == 0)
                        REQUIRE(std::abs(double(v.value)) <= 12);
                    else
                        REQUIRE(std::abs(v.value) >= 64 - 12);
                }
}

TEST_CASE("rational torus reproduces the square-lattice iterate") {
    for (std::int64_t n : {2, 5, 8}) {
        const double t = 0.05;
        const auto rep = picard_split(GammaPreset::parse("rat:1/1"), n, t);
        const auto table = picard_coefficients({2, n + 1, n}, t, PicardRoute::full_sum);
        const double scale = std::pow(double(n), -3.0);
        REQUIRE(rep.anchors.size() == std::size_t((2 * (n / 2) + 1) * (2 * (n / 2) + 1)));
        for (const auto& s : rep.anchors) {
            REQUIRE(s.coefficient == table.at(s.anchor).value);
            const Count g = count_gamma_2d(FrequencyBox(2, n), s.anchor).count;
            REQUIRE(s.resonant_count == g);
            REQUIRE(s.resonant_sum.real() == doctest::Approx(t * scale * g.to_double()).epsilon(1e-14));
            REQUIRE(s.resonant_sum.imag() == 0);
            REQUIRE(s.max_resonant_phase == 0);
            REQUIRE(s.min_nonresonant_phase == doctest::Approx(2.0 * double((n + 1) * (n + 1))));
            const Complex split = kPicardConstant * std::polar(1.0, -double((n + 1) * (n + 1)) * double(s.anchor.norm2()) * t) *
                                  (s.resonant_sum + s.nonresonant_sum);
            REQUIRE(std::abs(split - s.coefficient) <= 1e-12 * std::max(1e-3, std::abs(s.coefficient)));
        }
    }
}

TEST_CASE("split against direct tuple enumeration") {
    for (std::int64_t n : {2, 4}) {
        const double t = 0.07;
        const auto rep = picard_split(kE, n, t);
        const auto& w = rep.witness;
        const RationalInterval e = e_series(series_terms_for(w.p));
        const ExactRational delta = defect_from(e, w.p, w.q).midpoint();
        const double dd = mpq_get_d(delta.get_mpq_t());
        const double scale = std::pow(double(n), -3.0);
        const double q2d = mpz_get_d(BigInt(w.q * w.q).get_mpz_t());
        for (const auto& s : rep.anchors) {
            const std::int64_t kx = s.anchor[0], ky = s.anchor[1];
            Complex res = 0, nonres = 0;
            std::uint64_t rc = 0, nc = 0;
            for (std::int64_t ax = -n; ax <= n; ++ax)
                for (std::int64_t ay = -n; ay <= n; ++ay)
                    for (std::int64_t cx = -n; cx <= n; ++cx)
                        for (std::int64_t cy = -n; cy <= n; ++cy) {
                            const std::int64_t bx = ax + cx - kx, by = ay + cy - ky;
                            if (std::abs(bx) > n || std::abs(by) > n) continue;
                            const std::int64_t qy = ay * ay - by * by + cy * cy - ky * ky;
                            const std::int64_t q = ax * ax - bx * bx + cx * cx - kx * kx + qy;
                            if (q == 0) {
                                ++rc;
                                // Phi = -delta Qy
                                const double phi = -dd * double(qy);
                                res += phi == 0 ? Complex(t, 0) : (1.0 - std::polar(1.0, -phi * t)) / Complex(0, phi);
                                REQUIRE(std::abs(phi) <= 12);
                            } else {
                                ++nc;
                                // q^2 I = (1 - e^{-i Phi t}) / (i Phi / q^2), Phi / q^2 = Q - (delta/q^2) Qy
                                const double over = double(q) - dd * double(qy) / q2d;
                                nonres += (1.0 - std::polar(1.0, -reduced_phase(w.q, delta, q, qy, t))) / Complex(0, over);
                            }
                        }
            REQUIRE(s.resonant_count == Count(rc));
            REQUIRE(s.nonresonant_count == Count(nc));
            REQUIRE(std::abs(s.resonant_sum - scale * res) <= 1e-13 * std::max(1.0, std::abs(scale * res)));
            REQUIRE(std::abs(s.nonresonant_scaled - scale * nonres) <= 1e-9 * std::max(1.0, std::abs(scale * nonres)));
            // resonant integrals keep their real part above t/2
            REQUIRE(s.resonant_sum.real() >= s.resonant_lower);
            REQUIRE(std::abs(s.resonant_sum) <= t * scale * double(rc) * (1 + 1e-14));
        }
    }
}

TEST_CASE("certified regimes and the t log N bound") {
    std::vector<double> ratios;
    for (std::int64_t n : {8, 16, 32}) {
        const double t = 0.05;
        const auto rep = picard_split(kE, n, t);
        CHECK(rep.max_resonant_phase <= 12);
        CHECK(rep.min_nonresonant_phase >= static_cast<long double>(n * n - 12));
        CHECK(rep.log10_q2 > 0);
        for (const auto& s : rep.anchors) {
            REQUIRE(s.resonant_sum.real() >= s.resonant_lower * (1 - 1e-14));
            REQUIRE(std::abs(s.resonant_sum) <= 2 * s.resonant_lower * (1 + 1e-14));
            REQUIRE(s.nonresonant_upper < 1e-3 * s.resonant_lower);
        }
        CHECK(rep.l2_lower_bound > 0);
        ratios.push_back(rep.ratio_to_t_log);
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*hi / *lo <= 3);
}

TEST_CASE("split errors and determinism") {
    CHECK_THROWS_AS(picard_split(kE, 33, 0.05), BudgetError);
    CHECK_THROWS_AS(picard_split(kE, 8, 0.2), DomainError);
    CHECK_THROWS_AS(picard_split(kE, 8, 0.0), DomainError);
    CHECK_THROWS_AS(picard_split(kE, 0, 0.05), DomainError);
    CHECK_THROWS_AS(picard_split(GammaPreset::square_root(2), 8, 0.05, 500), WitnessNotFound);

    set_thread_count(1);
    const auto a = picard_split(kE, 8, 0.05);
    set_thread_count(4);
    const auto b = picard_split(kE, 8, 0.05);
    set_thread_count(0);
    REQUIRE(a.anchors.size() == b.anchors.size());
    for (std::size_t i = 0; i < a.anchors.size(); ++i) REQUIRE(a.anchors[i].coefficient == b.anchors[i].coefficient);
    CHECK(a.l2_lower_bound == b.l2_lower_bound);
}
