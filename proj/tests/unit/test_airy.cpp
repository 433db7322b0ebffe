#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "reslab/airy.hpp"
#include "reslab/parallel.hpp"

using namespace reslab;

namespace {

BigInt big(long v) { return BigInt(v); }

AiryAnchor anchor(long n, long k, long radius) { return {big(n), big(k), big(radius)}; }

// Direct triple loop with entries in an order different from the library's.
std::uint64_t oracle_count(long n, long k, long radius, double gap = 0) {
    std::uint64_t c = 0;
    for (long k3 = -radius; k3 <= radius; ++k3)
        for (long k1 = -radius; k1 <= radius; ++k1) {
            const long k2 = k - k1 - k3;
            if (k2 < -radius || k2 > radius) continue;
            if (k1 * k1 * k1 + k2 * k2 * k2 + k3 * k3 * k3 != n) continue;
            if (gap > 0) {
                std::array<long, 3> a{std::labs(k1), std::labs(k2), std::labs(k3)};
                std::sort(a.begin(), a.end());
                const long double g = gap;
                if (!(a[2] >= g * a[1] && a[1] >= g * a[0] && a[2] >= g * a[0] * a[0] * a[0])) continue;
            }
            ++c;
        }
    return c;
}

// Every cube-sum reachable from sum k in the box, with ordered multiplicity.
std::map<long, std::uint64_t> reachable(long k, long radius) {
    std::map<long, std::uint64_t> h;
    for (long k1 = -radius; k1 <= radius; ++k1)
        for (long k2 = -radius; k2 <= radius; ++k2) {
            const long k3 = k - k1 - k2;
            if (k3 < -radius || k3 > radius) continue;
            ++h[k1 * k1 * k1 + k2 * k2 * k2 + k3 * k3 * k3];
        }
    return h;
}

}  // namespace

TEST_CASE("degenerate family and the 648 anchor") {
    CHECK(count_airy(anchor(0, 0, 5)) == Count(31));
    CHECK(count_airy(anchor(0, 0, 5), AiryMethod::brute) == Count(31));
    CHECK(count_airy(anchor(8, 2, 5)) == Count(oracle_count(8, 2, 5)));
    CHECK(count_airy(anchor(8, 2, 5)) == Count(30));
    const auto members = airy_members(anchor(648, 18, 40));
    CHECK(members.size() >= 9);
    CHECK(members.size() == oracle_count(648, 18, 40));
    CHECK(std::is_sorted(members.begin(), members.end()));
    CHECK(std::find(members.begin(), members.end(), AiryTriple{big(-36), big(34), big(20)}) != members.end());
    CHECK(std::find(members.begin(), members.end(), AiryTriple{big(24), big(-30), big(24)}) != members.end());
    CHECK(count_airy(anchor(648, 18, 40), AiryMethod::brute) == Count(members.size()));
}

TEST_CASE("divisor method matches brute force on the exhaustive grid") {
    set_thread_count(0);
    for (long radius : {1L, 2L, 3L, 5L, 8L, 13L, 21L, 30L}) {
        for (long k = -30; k <= 30; ++k) {
            const auto h = reachable(k, radius);
            if (h.empty()) {
                CHECK(count_airy(anchor(k * k * k, k, radius)) == Count(0));
                continue;
            }
            for (const auto& [n, c] : h) {
                const auto a = anchor(n, k, radius);
                REQUIRE(count_airy(a) == Count(c));
                if (radius <= 8) REQUIRE(count_airy(a, AiryMethod::brute) == Count(c));
            }
            // unreachable targets either side of the range
            CHECK(count_airy(anchor(h.begin()->first - 1, k, radius)) == Count(oracle_count(h.begin()->first - 1, k, radius)));
            CHECK(count_airy(anchor(h.rbegin()->first + 3, k, radius)) == Count(0));
        }
    }
}

TEST_CASE("permutation invariance and big-integer path") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> e(-25, 25);
    for (int i = 0; i < 200; ++i) {
        const long a = e(rng), b = e(rng), c = e(rng);
        const long n = a * a * a + b * b * b + c * c * c, k = a + b + c;
        const auto members = airy_members(anchor(n, k, 25));
        for (const AiryTriple& t : {AiryTriple{big(a), big(b), big(c)}, AiryTriple{big(c), big(a), big(b)},
                                    AiryTriple{big(b), big(c), big(a)}, AiryTriple{big(b), big(a), big(c)}})
            CHECK(std::binary_search(members.begin(), members.end(), t));
        for (const auto& t : members) {
            AiryTriple s{t[2], t[0], t[1]};
            CHECK(std::binary_search(members.begin(), members.end(), s));
        }
    }
    // outside the machine range the arbitrary-precision route runs
    const AiryWitness w = build_airy_witness(16);
    const AiryAnchor far{w.n, w.k, w.n_min};
    CHECK(count_airy(far) >= w.ordered_count);
    const auto far_members = airy_members(far);
    for (const auto& t : w.triples) CHECK(std::binary_search(far_members.begin(), far_members.end(), t));
}

TEST_CASE("witness construction") {
    const AiryWitness w1 = build_airy_witness(1);
    CHECK(w1.lcm == 2);
    CHECK(w1.k == 6);
    CHECK(w1.n == 24);
    REQUIRE(w1.triples.size() == 1);
    CHECK(w1.triples[0] == AiryTriple{big(-10), big(8), big(8)});
    CHECK(w1.ordered_count == Count(3));
    CHECK(w1.n_min == 10);

    const AiryWitness w2 = build_airy_witness(2);
    CHECK(w2.lcm == 6);
    CHECK(w2.k == 18);
    CHECK(w2.n == 648);
    REQUIRE(w2.triples.size() == 2);
    CHECK(w2.triples[0] == AiryTriple{big(-30), big(24), big(24)});
    CHECK(w2.triples[1] == AiryTriple{big(-36), big(20), big(34)});
    CHECK(w2.ordered_count == Count(9));
    CHECK(count_airy(anchor(648, 18, 40)) >= w2.ordered_count);

    for (std::uint64_t m : {1u, 2u, 5u, 10u, 40u}) {
        const AiryWitness w = build_airy_witness(m);
        REQUIRE(w.triples.size() == m);
        CHECK(w.log_bound_holds);
        CHECK(w.n * 9 == w.k * w.k * w.k);
        for (const auto& t : w.triples) {
            CHECK(t[0] + t[1] + t[2] == w.k);
            CHECK(t[0] * t[0] * t[0] + t[1] * t[1] * t[1] + t[2] * t[2] * t[2] == w.n);
            CHECK(std::is_sorted(t.begin(), t.end()));
        }
        auto sets = w.triples;
        std::sort(sets.begin(), sets.end());
        CHECK(std::adjacent_find(sets.begin(), sets.end()) == sets.end());
        if (m <= 2) CHECK(count_airy({w.n, w.k, w.n_min}, AiryMethod::brute) >= w.ordered_count);
    }

    CHECK_THROWS_AS(build_airy_witness(0), DomainError);
    CHECK_THROWS_AS(build_airy_witness(kAiryWitnessMax + 1), BudgetError);
}

TEST_CASE("witness growth is logarithmic in the box") {
    double prev = 0;
    for (std::uint64_t m : {5u, 10u, 20u, 40u}) {
        const AiryWitness w = build_airy_witness(m);
        CHECK(w.ordered_count >= Count(m));
        const double expected = double(m) / std::log(mpz_get_d(w.n_min.get_mpz_t()));
        CHECK(w.ratio_to_log == doctest::Approx(expected).epsilon(1e-12));
        CHECK(w.ratio_to_log > 0);
        // log M grows like m, so the ratio settles rather than decays to 0
        if (prev > 0) CHECK(w.ratio_to_log > 0.5 * prev);
        prev = w.ratio_to_log;
    }
}

TEST_CASE("restricted counts") {
    for (double g : {2.0, 4.0})
        CHECK(count_airy_restricted(anchor(648, 18, 40), g) == Count(oracle_count(648, 18, 40, g)));
    CHECK(count_airy_restricted(anchor(648, 18, 40), 2.0) <= count_airy(anchor(648, 18, 40)));
    CHECK(count_airy_restricted(anchor(0, 0, 3), 4.0) == Count(oracle_count(0, 0, 3, 4.0)));

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> rad(1, 100);
    std::uint64_t worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const long radius = rad(rng);
        std::uniform_int_distribution<long> e(-radius, radius);
        const long a = e(rng), b = e(rng), c = e(rng);
        const long n = a * a * a + b * b * b + c * c * c, k = a + b + c;
        if (n == k * k * k) continue;
        worst = std::max(worst, count_airy_restricted(anchor(n, k, radius), 4.0).to_u64());
    }
    CHECK(worst <= 6);

    AiryTriple t{big(1), big(-4), big(16)};
    CHECK(satisfies_gap(t, 4.0));
    CHECK_FALSE(satisfies_gap(t, 4.5));
    CHECK_THROWS_AS(satisfies_gap(t, 1.5), DomainError);
    CHECK_THROWS_AS(count_airy_restricted(anchor(0, 0, 3), 1.0), DomainError);
}

TEST_CASE("conditional scan") {
    const AiryScanReport small = conditional_l6_scan(4);
    CHECK(small.ninth_rows.size() == 9);  // k in {-12, ..., 12} divisible by 3
    for (const auto& row : small.ninth_rows) {
        const long k = row.k;
        CHECK(row.count == Count(oracle_count(k * k * k / 9, k, 4)));
    }

    const AiryScanReport r = conditional_l6_scan(12);
    auto six = std::find_if(r.ninth_rows.begin(), r.ninth_rows.end(), [](const AiryScanRow& row) { return row.k == 6; });
    REQUIRE(six != r.ninth_rows.end());
    CHECK(six->count >= Count(3));
    CHECK(r.ninth_max >= Count(3));
    const long gk = r.generic_argmax_k, gn = r.generic_argmax_n;
    CHECK(gn != gk * gk * gk);
    CHECK(r.generic_max == Count(oracle_count(gn, gk, 12)));
    // no generic anchor beats the reported maximum
    for (long k = -36; k <= 36; ++k)
        for (const auto& [n, c] : reachable(k, 12))
            if (n != k * k * k && !(k % 3 == 0 && n == k * k * k / 9)) REQUIRE(Count(c) <= r.generic_max);

    set_thread_count(1);
    const AiryScanReport a = conditional_l6_scan(20);
    set_thread_count(4);
    const AiryScanReport b = conditional_l6_scan(20);
    set_thread_count(0);
    CHECK(a.ninth_max == b.ninth_max);
    CHECK(a.generic_argmax_n == b.generic_argmax_n);
    CHECK(a.generic_argmax_k == b.generic_argmax_k);

    CHECK_THROWS_AS(conditional_l6_scan(0), DomainError);
    CHECK_THROWS_AS(conditional_l6_scan(kAiryScanMax + 1), BudgetError);
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(count_airy(anchor(0, 0, 0)), DomainError);
    CHECK_THROWS_AS(count_airy(anchor(0, 0, kAiryBruteMax + 1), AiryMethod::brute), BudgetError);
    CHECK(parse_airy_method("brute") == AiryMethod::brute);
    CHECK(parse_airy_method("divisor") == AiryMethod::divisor);
    CHECK(to_string(AiryMethod::divisor) == "divisor");
    CHECK_THROWS_AS(parse_airy_method("guess"), DomainError);
    // n = k^3 with k outside the box, and k beyond 3N
    CHECK(count_airy(anchor(27000, 30, 10)) == Count(0));
    CHECK(count_airy(anchor(0, 31, 10)) == Count(0));
}
