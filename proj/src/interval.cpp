#include "reslab/interval.hpp"

#include <algorithm>
#include <cmath>

#include <mpfr.h>

namespace reslab {

RationalInterval::RationalInterval(ExactRational lo, ExactRational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    lo_.canonicalize();
    hi_.canonicalize();
    if (hi_ < lo_) throw DomainError("interval with lo > hi");
}

ExactRational RationalInterval::midpoint() const {
    ExactRational m = (lo_ + hi_) / 2;
    m.canonicalize();
    return m;
}

ExactRational RationalInterval::magnitude() const { return std::max(ExactRational(abs(lo_)), ExactRational(abs(hi_))); }

ExactRational RationalInterval::mignitude() const {
    if (contains_zero()) return 0;
    return std::min(ExactRational(abs(lo_)), ExactRational(abs(hi_)));
}

std::optional<int> RationalInterval::sign() const {
    if (lo_ > 0) return 1;
    if (hi_ < 0) return -1;
    return std::nullopt;
}

RationalInterval operator+(const RationalInterval& a, const RationalInterval& b) {
    return {a.lo_ + b.lo_, a.hi_ + b.hi_};
}

RationalInterval operator-(const RationalInterval& a, const RationalInterval& b) {
    return {a.lo_ - b.hi_, a.hi_ - b.lo_};
}

RationalInterval operator-(const RationalInterval& a) { return {-a.hi_, -a.lo_}; }

RationalInterval operator*(const RationalInterval& a, const RationalInterval& b) {
    ExactRational c[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

RationalInterval operator/(const RationalInterval& a, const RationalInterval& b) {
    if (b.contains_zero()) throw PrecisionError("interval division by an enclosure containing zero");
    ExactRational r1 = 1 / b.hi_, r2 = 1 / b.lo_;
    return a * RationalInterval(std::min(r1, r2), std::max(r1, r2));
}

RationalInterval RationalInterval::square() const {
    ExactRational a = lo_ * lo_, b = hi_ * hi_;
    if (contains_zero()) return {0, std::max(a, b)};
    return {std::min(a, b), std::max(a, b)};
}

std::string RationalInterval::to_string() const {
    return "[" + reslab::to_string(lo_) + ", " + reslab::to_string(hi_) + "]";
}

RationalInterval enclose(const GammaPreset& gamma, unsigned bits) {
    if (gamma.is_rational()) return RationalInterval::point(gamma.exact_value());
    ExactRational target_width(BigInt(1), BigInt(1) << bits);
    if (gamma.kind == GammaPreset::Kind::sqrt) {
        // floor(sqrt(D * 4^bits)) / 2^bits <= sqrt(D) < (that + 1) / 2^bits
        BigInt scaled = BigInt(static_cast<unsigned long>(gamma.radicand)) << (2 * bits), root;
        mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
        BigInt den = BigInt(1) << bits;
        return {ExactRational(root, den), ExactRational(BigInt(root + 1), den)};
    }
    // Consecutive convergents bracket an irrational gamma, and the gap
    // between them is 1/(q_n q_{n+1}).
    QuotientSource src(gamma);
    BigInt p_prev = 1, q_prev = 0, p = src.integer_part(), q = 1;
    for (;;) {
        auto a = src.next();
        if (!a) throw PrecisionError("expansion ended while enclosing an irrational preset");
        BigInt pn = *a * p + p_prev, qn = *a * q + q_prev;
        if (ExactRational(BigInt(1), BigInt(q * qn)) <= target_width) {
            ExactRational c0(p, q), c1(pn, qn);
            c0.canonicalize();
            c1.canonicalize();
            return {std::min(c0, c1), std::max(c0, c1)};
        }
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(pn);
        q = std::move(qn);
    }
}

double to_double(const ExactRational& x) {
    mpfr_t v;
    mpfr_init2(v, 64);
    mpfr_set_q(v, x.get_mpq_t(), MPFR_RNDN);
    double d = mpfr_get_d(v, MPFR_RNDN);
    mpfr_clear(v);
    return d;
}

long double to_long_double(const ExactRational& x) {
    mpfr_t v;
    mpfr_init2(v, 80);
    mpfr_set_q(v, x.get_mpq_t(), MPFR_RNDN);
    long double d = mpfr_get_ld(v, MPFR_RNDN);
    mpfr_clear(v);
    return d;
}

}  // namespace reslab
