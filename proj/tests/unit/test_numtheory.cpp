#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "reslab/numtheory.hpp"

using namespace reslab;

namespace {

std::uint64_t phi_by_gcd(std::uint64_t n) {
    std::uint64_t c = 0;
    for (std::uint64_t k = 1; k <= n; ++k)
        if (std::gcd(k, n) == 1) ++c;
    return c;
}

std::vector<std::uint64_t> divisors_by_trial(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 1; d <= n; ++d)
        if (n % d == 0) out.push_back(d);
    return out;
}

// Euclid run on a rational bracket [lo, hi] of an irrational: emits quotients
// while both endpoints agree on the floor.
std::vector<BigInt> bracket_quotients(ExactRational lo, ExactRational hi, std::size_t want) {
    std::vector<BigInt> out;
    for (std::size_t i = 0; i <= want; ++i) {
        BigInt fl, fh;
        mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
        mpz_fdiv_q(fh.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
        if (fl != fh) break;
        out.push_back(fl);
        ExactRational flo = lo - fl, fhi = hi - fl;
        if (flo == 0 || fhi == 0) break;
        ExactRational nlo = 1 / fhi, nhi = 1 / flo;
        lo = nlo;
        hi = nhi;
    }
    return out;
}

// sqrt(D) bracketed by integer square roots at scale 10^digits.
std::vector<BigInt> sqrt_oracle(unsigned long d, std::size_t want) {
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, 60);
    BigInt r;
    BigInt sq = BigInt(d) * scale * scale;
    mpz_sqrt(r.get_mpz_t(), sq.get_mpz_t());
    return bracket_quotients(ExactRational(r, scale), ExactRational(BigInt(r + 1), scale), want);
}

// e bracketed by its factorial series truncated after 60 terms.
std::vector<BigInt> e_oracle(std::size_t want) {
    ExactRational sum = 0;
    BigInt fact = 1;
    for (unsigned long j = 0; j <= 60; ++j) {
        if (j > 0) fact *= j;
        sum += ExactRational(BigInt(1), fact);
    }
    sum.canonicalize();
    ExactRational tail(BigInt(2), fact * 61);  // remainder < 2/61!
    tail.canonicalize();
    return bracket_quotients(sum, ExactRational(sum + tail), want);
}

}  // namespace

TEST_CASE("totient table values") {
    auto t1 = totient_table(1);
    CHECK(t1(1) == 1);
    auto t = totient_table(12);
    CHECK(t(12) == 4);
    CHECK(t(12) == phi_by_gcd(12));
    auto big = totient_table(3000);
    for (std::uint64_t n = 1; n <= 3000; ++n) REQUIRE(big(n) == phi_by_gcd(n));
}

TEST_CASE("totient divisor-sum identity and multiplicativity") {
    auto t = totient_table(1'000'000);
    for (std::uint64_t n = 1; n <= 10'000; ++n) {
        std::uint64_t s = 0;
        for (std::uint64_t d = 1; d * d <= n; ++d)
            if (n % d == 0) {
                s += t(d);
                if (d * d != n) s += t(n / d);
            }
        REQUIRE(s == n);
    }
    std::mt19937_64 rng(20261018);
    std::uniform_int_distribution<std::uint64_t> pick(1, 1'000'000);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t n = pick(rng);
        std::uint64_t s = 0;
        for (std::uint64_t d : divisors_by_trial(n)) s += t(d);
        CHECK(s == n);
    }
    for (std::uint64_t a = 1; a <= 300; ++a)
        for (std::uint64_t b = 1; b <= 300; ++b)
            if (std::gcd(a, b) == 1) REQUIRE(t(a * b) == std::uint64_t{t(a)} * t(b));
    for (std::uint32_t p : primes_up_to(1000)) CHECK(t(p) == p - 1);
}

TEST_CASE("totient table budget") {
    CHECK_THROWS_AS(totient_table(kTotientTableLimit + 1), BudgetError);
    CHECK_THROWS_AS(totient_table(0), DomainError);
}

TEST_CASE("totient sum ratio") {
    auto r2 = totient_sum_ratio(2);
    CHECK(r2.sum == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(r2.ratio == doctest::Approx(1.25 / std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(totient_sum_ratio(1), DomainError);

    // The chain sum_{p<=N} phi(p)/p^2 > (6/pi^2) log(N+1) for every N in range.
    auto t = totient_table(5000);
    long double s = 0;
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        s += static_cast<long double>(t(n)) / (static_cast<long double>(n) * n);
        if (n >= 2) REQUIRE(s > 6.0L / (static_cast<long double>(pi) * pi) * std::log(n + 1.0L));
    }
    CHECK(totient_sum_ratio(1000).chain_holds);
}

TEST_CASE("primes and lcm") {
    CHECK(prime_pi(41) == 13);
    CHECK(prime_pi(100) == 25);
    CHECK(lcm_range(1) == 2);
    CHECK(lcm_range(2) == 6);
    for (std::uint64_t m = 1; m <= 60; ++m) {
        BigInt oracle = 1;
        for (unsigned long j = 1; j <= m + 1; ++j) mpz_lcm_ui(oracle.get_mpz_t(), oracle.get_mpz_t(), j);
        const BigInt got = lcm_range(m);
        REQUIRE(got == oracle);
        for (unsigned long x = 1; x <= m; ++x) REQUIRE(mpz_divisible_ui_p(got.get_mpz_t(), x * (x + 1)) != 0);
        REQUIRE(lcm_log_bound_holds(m, got));
    }
    // log M <= 13 log 41 at m = 40, checked in floating point as well.
    CHECK(std::log(lcm_range(40).get_d()) <= 13 * std::log(41.0));
}

TEST_CASE("signed divisors") {
    auto one = signed_divisors(1);
    CHECK(one.divisors == std::vector<BigInt>{-1, 1});
    auto six = signed_divisors(6);
    CHECK(six.divisors == std::vector<BigInt>{-6, -3, -2, -1, 1, 2, 3, 6});
    CHECK(signed_divisors(648).divisors.size() == 40);
    CHECK(signed_divisors(-648).divisors.size() == 40);
    CHECK_THROWS_AS(signed_divisors(0), DomainError);

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> pick(1, 200'000);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t n = pick(rng);
        auto got = signed_divisors(BigInt(static_cast<unsigned long>(n)));
        auto pos = divisors_by_trial(n);
        REQUIRE(got.divisors.size() == 2 * pos.size());
        for (const auto& d : got.divisors) {
            REQUIRE(mpz_divisible_p(got.target.get_mpz_t(), d.get_mpz_t()) != 0);
            REQUIRE(std::binary_search(got.divisors.begin(), got.divisors.end(), BigInt(-d)));
        }
        REQUIRE(positive_divisors_u64(n) == pos);
    }
}

TEST_CASE("factorisation beyond trial division") {
    // (2^31 - 1)(2^61 - 1): both Mersenne primes, far above the trial bound.
    BigInt a = (BigInt(1) << 31) - 1, b = (BigInt(1) << 61) - 1;
    auto f = factorize(a * b * 12);
    REQUIRE(f.size() == 4);
    CHECK(f[0].prime == 2);
    CHECK(f[0].exponent == 2);
    CHECK(f[1].prime == 3);
    CHECK(f[2].prime == a);
    CHECK(f[3].prime == b);
    CHECK(signed_divisors(a * b).divisors.size() == 8);
    // Two ~40-bit primes need rho iterations; a zero budget must refuse.
    BigInt p = 1099511627791_mpz, q = 1099511627689_mpz;
    CHECK_THROWS_AS(factorize(p * q, FactorBudget{0}), BudgetError);
}

TEST_CASE("gamma preset grammar") {
    CHECK(GammaPreset::parse("rat:3/4").exact_value() == ExactRational(3, 4));
    CHECK(GammaPreset::parse("rat:6/8").to_string() == "rat:3/4");
    CHECK(GammaPreset::parse("sqrt:2").radicand == 2);
    CHECK(GammaPreset::parse("e").kind == GammaPreset::Kind::euler_e);
    auto cf = GammaPreset::parse("cf:1,2,3;int:2");
    CHECK(cf.integer_part == 2);
    CHECK(cf.exact_value() == evaluate_continued_fraction(2, std::vector<BigInt>{1, 2, 3}));
    CHECK(GammaPreset::parse("int:2;cf:1,2,3").exact_value() == cf.exact_value());
    CHECK(GammaPreset::parse("cf:2").exact_value() == ExactRational(1, 2));
    CHECK(GammaPreset::parse(cf.to_string()).exact_value() == cf.exact_value());
    CHECK(GammaPreset::parse("sqrt:9").is_rational());
    CHECK_FALSE(GammaPreset::parse("sqrt:8").is_rational());
    CHECK(*GammaPreset::parse("sqrt:8").exact_square() == 8);
    CHECK_THROWS_AS(GammaPreset::parse("rat:1/0"), DomainError);
    CHECK_THROWS_AS(GammaPreset::parse("pi"), DomainError);
    CHECK_THROWS_AS(GammaPreset::parse("sqrt:-2"), DomainError);
    CHECK_THROWS_AS(GammaPreset::parse("cf:1,0"), DomainError);
    CHECK_THROWS_AS(GammaPreset::parse("cf:1,x"), DomainError);
}

TEST_CASE("continued fractions of presets") {
    auto half = continued_fraction(GammaPreset::parse("rat:5/2"), 2);
    CHECK(half.integer_part == 2);
    CHECK(half.quotients == std::vector<BigInt>{2});
    REQUIRE(half.convergents.size() == 2);
    CHECK(half.convergents[0].p == 2);
    CHECK(half.convergents[0].q == 1);
    CHECK(half.convergents[1].p == 5);
    CHECK(half.convergents[1].q == 2);
    CHECK(half.terminated);
    CHECK_THROWS_AS(continued_fraction(GammaPreset::parse("rat:5/2"), 2, DepthPolicy::require), DomainError);
    CHECK(continued_fraction(GammaPreset::parse("rat:5/2"), 1, DepthPolicy::require).terminated);

    auto s2 = continued_fraction(GammaPreset::square_root(2), 6);
    CHECK(s2.integer_part == 1);
    CHECK(s2.quotients == std::vector<BigInt>(6, 2));
    CHECK_FALSE(s2.terminated);

    auto e9 = continued_fraction(GammaPreset::e(), 9);
    CHECK(e9.integer_part == 2);
    CHECK(e9.quotients == std::vector<BigInt>{1, 2, 1, 1, 4, 1, 1, 6, 1});

    // Independent bracket oracles, deeper.
    for (unsigned long d : {2ul, 3ul, 5ul, 7ul, 13ul, 19ul, 31ul, 46ul, 94ul, 1000003ul}) {
        auto oracle = sqrt_oracle(d, 40);
        auto got = continued_fraction(GammaPreset::square_root(d), oracle.size() - 1);
        REQUIRE(got.integer_part == oracle[0]);
        for (std::size_t i = 1; i < oracle.size(); ++i) REQUIRE(got.quotients[i - 1] == oracle[i]);
    }
    auto eo = e_oracle(60);
    REQUIRE(eo.size() > 30);
    auto eg = continued_fraction(GammaPreset::e(), eo.size() - 1);
    CHECK(eg.integer_part == eo[0]);
    for (std::size_t i = 1; i < eo.size(); ++i) REQUIRE(eg.quotients[i - 1] == eo[i]);
}

TEST_CASE("convergent invariants") {
    for (const char* text : {"sqrt:2", "sqrt:7", "e", "rat:355/113", "cf:3,7,15,1,292;int:3"}) {
        auto g = GammaPreset::parse(text);
        auto cf = continued_fraction(g, 30);
        for (std::size_t n = 0; n < cf.convergents.size(); ++n) {
            const auto& c = cf.convergents[n];
            BigInt gc;
            mpz_gcd(gc.get_mpz_t(), c.p.get_mpz_t(), c.q.get_mpz_t());
            REQUIRE(gc == 1);
            if (n > 0) REQUIRE(c.q > cf.convergents[n - 1].q - (n == 1 ? 1 : 0));
            ExactRational prefix = evaluate_continued_fraction(
                cf.integer_part, std::span<const BigInt>(cf.quotients.data(), n));
            REQUIRE(prefix == ExactRational(c.p, c.q));
        }
        // Binary-split matrix product matches the recurrence.
        std::vector<BigInt> all{cf.integer_part};
        all.insert(all.end(), cf.quotients.begin(), cf.quotients.end());
        Mat2 m = convergent_product(all);
        CHECK(m.a == cf.convergents.back().p);
        CHECK(m.c == cf.convergents.back().q);
    }
}

TEST_CASE("rational reconstruction") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> num(-100000, 100000), den(1, 100000);
    for (int i = 0; i < 500; ++i) {
        ExactRational x(num(rng), den(rng));
        x.canonicalize();
        auto cf = continued_fraction(GammaPreset::rational(x), kMaxExpansionDepth);
        REQUIRE(cf.terminated);
        REQUIRE(evaluate_continued_fraction(cf.integer_part, cf.quotients) == x);
        REQUIRE(ExactRational(cf.convergents.back().p, cf.convergents.back().q) == x);
    }
}

TEST_CASE("sandwich bound for sqrt(2), exact comparison") {
    const auto g = GammaPreset::square_root(2);
    auto cf = continued_fraction(g, 200);
    for (std::size_t n = 0; n + 1 < cf.convergents.size(); ++n) {
        const auto& c = cf.convergents[n];
        const ExactRational pq(c.p, c.q);
        const BigInt& a_next = cf.quotients[n];
        const ExactRational upper(BigInt(1), BigInt(c.q * c.q * a_next));
        const ExactRational lower(BigInt(1), BigInt(c.q * c.q * (a_next + 2)));
        // |g - p/q| < upper
        REQUIRE(compare(g, ExactRational(pq + upper)) < 0);
        REQUIRE(compare(g, ExactRational(pq - upper)) > 0);
        // |g - p/q| > lower
        REQUIRE((compare(g, ExactRational(pq + lower)) > 0 || compare(g, ExactRational(pq - lower)) < 0));
    }
}

TEST_CASE("exact comparison") {
    CHECK(compare(GammaPreset::square_root(2), ExactRational(141421, 100000)) > 0);
    CHECK(compare(GammaPreset::square_root(2), ExactRational(141422, 100000)) < 0);
    CHECK(compare(GammaPreset::square_root(4), ExactRational(2)) == 0);
    CHECK(compare(GammaPreset::e(), ExactRational(271828, 100000)) > 0);
    CHECK(compare(GammaPreset::e(), ExactRational(271829, 100000)) < 0);
    CHECK(compare(GammaPreset::rational(ExactRational(1, 3)), ExactRational(1, 3)) == 0);
}
