#pragma once

#include <optional>
#include <string>

#include "reslab/numtheory.hpp"

namespace reslab {

// Closed interval [lo, hi] with exact rational endpoints. Arithmetic is
// exact, so enclosures only widen where the inputs were already intervals.
class RationalInterval {
public:
    RationalInterval() = default;
    RationalInterval(ExactRational lo, ExactRational hi);
    static RationalInterval point(const ExactRational& x) { return {x, x}; }

    const ExactRational& lo() const { return lo_; }
    const ExactRational& hi() const { return hi_; }
    ExactRational width() const { return hi_ - lo_; }
    ExactRational midpoint() const;
    bool is_point() const { return lo_ == hi_; }
    bool contains(const ExactRational& x) const { return lo_ <= x && x <= hi_; }
    bool contains_zero() const { return lo_ <= 0 && hi_ >= 0; }
    // Largest |x| over the interval.
    ExactRational magnitude() const;
    // Smallest |x| over the interval (0 when it straddles zero).
    ExactRational mignitude() const;
    // +1 / -1 when the whole interval has that sign, nullopt otherwise.
    std::optional<int> sign() const;

    friend RationalInterval operator+(const RationalInterval& a, const RationalInterval& b);
    friend RationalInterval operator-(const RationalInterval& a, const RationalInterval& b);
    friend RationalInterval operator*(const RationalInterval& a, const RationalInterval& b);
    friend RationalInterval operator-(const RationalInterval& a);
    // Division requires a divisor interval that excludes zero.
    friend RationalInterval operator/(const RationalInterval& a, const RationalInterval& b);
    RationalInterval square() const;

    std::string to_string() const;

private:
    ExactRational lo_, hi_;
};

// Enclosure of gamma with width at most 2^-bits. Rational presets return
// a point interval.
RationalInterval enclose(const GammaPreset& gamma, unsigned bits);

// Nearest double to an exact rational.
double to_double(const ExactRational& x);
long double to_long_double(const ExactRational& x);

}  // namespace reslab
