#include "reslab/airy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "reslab/parallel.hpp"

namespace reslab {

void AiryAnchor::validate() const {
    if (radius < 1) throw DomainError("Airy box radius must be >= 1");
}

std::string to_string(AiryMethod m) { return m == AiryMethod::brute ? "brute" : "divisor"; }

AiryMethod parse_airy_method(const std::string& s) {
    if (s == "brute") return AiryMethod::brute;
    if (s == "divisor" || s == "fast") return AiryMethod::divisor;
    throw DomainError("unknown Airy counting method '" + s + "'");
}

namespace {

using i64 = std::int64_t;
using i128 = __int128;

constexpr i64 kMachineLimit = i64(1) << 20;

struct MachineAnchor {
    i64 n, k, radius;
};

bool fits_machine(const AiryAnchor& a) {
    const BigInt lim(static_cast<long>(kMachineLimit));
    return abs(a.k) <= lim && a.radius <= lim && abs(a.n) <= BigInt(static_cast<long>(i64(1) << 62));
}

MachineAnchor to_machine(const AiryAnchor& a) { return {a.n.get_si(), a.k.get_si(), a.radius.get_si()}; }

AiryTriple big_triple(i64 a, i64 b, i64 c) {
    return {BigInt(static_cast<long>(a)), BigInt(static_cast<long>(b)), BigInt(static_cast<long>(c))};
}

i64 cube(i64 x) { return x * x * x; }

std::vector<AiryTriple> brute_members(const MachineAnchor& a) {
    std::vector<AiryTriple> out;
    const i64 r = a.radius;
    for (i64 k1 = -r; k1 <= r; ++k1)
        for (i64 k2 = -r; k2 <= r; ++k2) {
            const i64 k3 = a.k - k1 - k2;
            if (k3 < -r || k3 > r) continue;
            if (cube(k1) + cube(k2) + cube(k3) == a.n) out.push_back(big_triple(k1, k2, k3));
        }
    return out;
}

i64 abs_of(i64 x) { return x < 0 ? -x : x; }

i64 isqrt(i64 v) {
    i64 r = static_cast<i64>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

// Divisor reduction: with a_j = k - k_j, a1 + a2 + a3 = 2k and
// a1 a2 a3 = (k^3 - n)/3.  Fixing a1, the pair (a2, a3) solves a quadratic.
std::vector<AiryTriple> divisor_members(const MachineAnchor& a, FactorBudget budget) {
    const i64 r = a.radius, k = a.k;
    if (abs_of(k) > 3 * r) return {};
    const i128 num = i128(k) * k * k - a.n;
    if (num % 3 != 0) return {};
    const i128 p = num / 3;
    if (p == 0) {
        auto make = [](i64 x, i64 y, i64 z) { return big_triple(x, y, z); };
        std::set<AiryTriple> seen;
        if (abs_of(k) > r) return {};
        for (i64 v = -r; v <= r; ++v) {
            seen.insert(make(k, v, -v));
            seen.insert(make(v, k, -v));
            seen.insert(make(v, -v, k));
        }
        return {seen.begin(), seen.end()};
    }
    const i64 bound = abs_of(k) + r;
    const i128 pabs = p < 0 ? -p : p;
    // every |a_j| <= bound
    if (pabs > i128(bound) * bound * bound) return {};
    std::vector<AiryTriple> out;
    for (std::uint64_t d : positive_divisors_u64(static_cast<std::uint64_t>(pabs), budget)) {
        if (d > static_cast<std::uint64_t>(bound)) break;
        for (i64 a1 : {static_cast<i64>(d), -static_cast<i64>(d)}) {
            const i64 k1 = k - a1;
            if (k1 < -r || k1 > r) continue;
            const i128 rest = p / a1;
            if (rest > i128(bound) * bound || rest < -i128(bound) * bound) continue;
            const i64 s = 2 * k - a1;
            const i64 disc = s * s - 4 * static_cast<i64>(rest);
            if (disc < 0) continue;
            const i64 root = isqrt(disc);
            if (root * root != disc || ((s + root) & 1)) continue;
            const i64 k2 = k - (s + root) / 2, k3 = k - (s - root) / 2;
            if (k2 < -r || k2 > r || k3 < -r || k3 > r) continue;
            out.push_back(big_triple(k1, k2, k3));
            if (root != 0) out.push_back(big_triple(k1, k3, k2));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void bounded_divisors(const std::vector<PrimePower>& f, std::size_t i, const BigInt& d, const BigInt& bound,
                      std::vector<BigInt>& out) {
    if (i == f.size()) {
        if (out.size() >= kAiryDivisorBudget) throw BudgetError("Airy divisor enumeration exceeds its budget");
        out.push_back(d);
        return;
    }
    BigInt cur = d;
    for (unsigned e = 0; e <= f[i].exponent; ++e) {
        if (cur > bound) break;
        bounded_divisors(f, i + 1, cur, bound, out);
        cur *= f[i].prime;
    }
}

std::vector<AiryTriple> divisor_members_big(const AiryAnchor& a, FactorBudget budget) {
    const BigInt& k = a.k;
    const BigInt& r = a.radius;
    if (abs(k) > 3 * r) return {};
    const BigInt num = k * k * k - a.n;
    if (!mpz_divisible_ui_p(num.get_mpz_t(), 3)) return {};
    const BigInt p = num / 3;
    auto in_box = [&](const BigInt& x) { return abs(x) <= r; };
    if (p == 0) {
        if (r > BigInt(static_cast<long>(kAiryBruteMax))) throw BudgetError("degenerate Airy family too large to list");
        if (!in_box(k)) return {};
        std::set<AiryTriple> seen;
        for (BigInt v = -r; v <= r; ++v) {
            seen.insert({k, v, BigInt(-v)});
            seen.insert({v, k, BigInt(-v)});
            seen.insert({v, BigInt(-v), k});
        }
        return {seen.begin(), seen.end()};
    }
    const BigInt bound = abs(k) + r;
    if (abs(p) > bound * bound * bound) return {};
    std::vector<BigInt> divs;
    bounded_divisors(factorize(p, budget), 0, BigInt(1), bound, divs);
    std::sort(divs.begin(), divs.end());
    std::vector<AiryTriple> out;
    BigInt root, disc;
    for (const BigInt& d : divs)
        for (int sign : {1, -1}) {
            const BigInt a1 = sign * d;
            const BigInt k1 = k - a1;
            if (!in_box(k1)) continue;
            const BigInt rest = p / a1;
            const BigInt s = 2 * k - a1;
            disc = s * s - 4 * rest;
            if (disc < 0 || !mpz_perfect_square_p(disc.get_mpz_t())) continue;
            mpz_sqrt(root.get_mpz_t(), disc.get_mpz_t());
            if (mpz_odd_p(BigInt(s + root).get_mpz_t())) continue;
            const BigInt k2 = k - (s + root) / 2, k3 = k - (s - root) / 2;
            if (!in_box(k2) || !in_box(k3)) continue;
            out.push_back({k1, k2, k3});
            if (root != 0) out.push_back({k1, k3, k2});
        }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<AiryTriple> airy_members(const AiryAnchor& anchor, AiryMethod method, FactorBudget budget) {
    anchor.validate();
    const bool machine = fits_machine(anchor);
    if (method == AiryMethod::brute) {
        if (anchor.radius > BigInt(static_cast<long>(kAiryBruteMax)))
            throw BudgetError("brute-force Airy counting is capped at N = " + std::to_string(kAiryBruteMax));
        if (!machine) return {};  // |k| > 3N or |n| > 3N^3: nothing reachable
        return brute_members(to_machine(anchor));
    }
    try {
        return machine ? divisor_members(to_machine(anchor), budget) : divisor_members_big(anchor, budget);
    } catch (const BudgetError&) {
        if (machine && anchor.radius <= BigInt(static_cast<long>(kAiryFallbackMax))) return brute_members(to_machine(anchor));
        throw;
    }
}

Count count_airy(const AiryAnchor& anchor, AiryMethod method, FactorBudget budget) {
    return Count(airy_members(anchor, method, budget).size());
}

bool satisfies_gap(const AiryTriple& t, double gap_factor) {
    if (!(gap_factor >= 2)) throw DomainError("gap factor must be >= 2");
    std::array<BigInt, 3> m{abs(t[0]), abs(t[1]), abs(t[2])};
    std::sort(m.begin(), m.end());
    const ExactRational g(gap_factor);
    const ExactRational mn(m[0]), md(m[1]), mx(m[2]);
    return mx >= g * md && md >= g * mn && mx >= g * mn * mn * mn;
}

Count count_airy_restricted(const AiryAnchor& anchor, double gap_factor, AiryMethod method, FactorBudget budget) {
    if (!(gap_factor >= 2)) throw DomainError("gap factor must be >= 2");
    Count c;
    for (const auto& t : airy_members(anchor, method, budget))
        if (satisfies_gap(t, gap_factor)) c += 1;
    return c;
}

AiryWitness build_airy_witness(std::uint64_t m) {
    if (m < 1) throw DomainError("Airy witness needs m >= 1");
    if (m > kAiryWitnessMax) throw BudgetError("Airy witness is capped at m = " + std::to_string(kAiryWitnessMax));
    AiryWitness w;
    w.m = m;
    w.lcm = lcm_range(m);
    const BigInt& M = w.lcm;
    w.k = 3 * M;
    w.n = 3 * M * M * M;
    auto exact_div = [](const BigInt& a, const BigInt& b) {
        if (!mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t())) throw Error("witness entry is not integral");
        BigInt q;
        mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return q;
    };
    std::set<AiryTriple> sets;
    for (std::uint64_t xu = 1; xu <= m; ++xu) {
        const BigInt x(static_cast<unsigned long>(xu)), x1 = x + 1;
        BigInt g;
        mpz_gcd(g.get_mpz_t(), BigInt(x1 * x1).get_mpz_t(), x.get_mpz_t());
        if (g != 1) throw Error("(x+1)^2/x is not in lowest terms");
        mpz_gcd(g.get_mpz_t(), BigInt(x * x).get_mpz_t(), x1.get_mpz_t());
        if (g != 1) throw Error("x^2/(x+1) is not in lowest terms");
        AiryTriple t{3 * M - exact_div(2 * x1 * x1 * M, x), 3 * M + exact_div(2 * x * x * M, x1),
                     3 * M + exact_div(2 * M, BigInt(x * x1))};
        if (t[0] + t[1] + t[2] != w.k) throw Error("witness triple has the wrong sum");
        if (t[0] * t[0] * t[0] + t[1] * t[1] * t[1] + t[2] * t[2] * t[2] != w.n)
            throw Error("witness triple has the wrong cube sum");
        if (w.k * w.k * w.k - w.n != 3 * (w.k - t[0]) * (w.k - t[1]) * (w.k - t[2]))
            throw Error("witness triple breaks the product identity");
        std::sort(t.begin(), t.end());
        if (!sets.insert(t).second) throw Error("witness triples repeat");
        const int perms = (t[0] == t[1] && t[1] == t[2]) ? 1 : (t[0] == t[1] || t[1] == t[2]) ? 3 : 6;
        w.ordered_count += Count(static_cast<std::uint64_t>(perms));
        for (const auto& e : t) w.n_min = std::max(w.n_min, BigInt(abs(e)));
        w.triples.push_back(std::move(t));
    }
    w.ratio_to_log = static_cast<double>(m) / std::log(mpz_get_d(w.n_min.get_mpz_t()));
    w.log_bound_holds = lcm_log_bound_holds(m, M);
    return w;
}

namespace {

struct KSummary {
    std::int64_t k = 0;
    std::uint64_t ninth = 0;
    bool has_ninth = false;
    std::uint64_t generic = 0;
    std::int64_t generic_n = 0;
};

KSummary scan_sum(std::int64_t n, std::int64_t k) {
    // k1 <= k2 <= k3 weighted by their ordered arrangements
    std::vector<std::pair<i64, std::uint64_t>> hist;
    for (i64 k1 = -n; k1 <= n; ++k1)
        for (i64 k2 = k1; k2 <= n; ++k2) {
            const i64 k3 = k - k1 - k2;
            if (k3 < k2) break;
            if (k3 > n) continue;
            const std::uint64_t w = (k1 == k2 && k2 == k3) ? 1 : (k1 == k2 || k2 == k3) ? 3 : 6;
            hist.emplace_back(cube(k1) + cube(k2) + cube(k3), w);
        }
    std::sort(hist.begin(), hist.end());
    KSummary s;
    s.k = k;
    s.has_ninth = k % 3 == 0;
    const i64 diag = cube(k), ninth = s.has_ninth ? cube(k) / 9 : 0;
    for (std::size_t i = 0; i < hist.size();) {
        std::size_t j = i;
        std::uint64_t c = 0;
        while (j < hist.size() && hist[j].first == hist[i].first) c += hist[j++].second;
        const i64 v = hist[i].first;
        if (s.has_ninth && v == ninth) s.ninth = c;
        if (v != diag && !(s.has_ninth && v == ninth) && c > s.generic) {
            s.generic = c;
            s.generic_n = v;
        }
        i = j;
    }
    return s;
}

}  // namespace

AiryScanReport conditional_l6_scan(std::int64_t n) {
    if (n < 1) throw DomainError("Airy scan needs N >= 1");
    if (n > kAiryScanMax) throw BudgetError("Airy scan is capped at N = " + std::to_string(kAiryScanMax));
    AiryScanReport rep;
    rep.n = n;
    const auto sums = parallel_map<KSummary>(static_cast<std::size_t>(6 * n + 1),
                                             [&](std::size_t i) { return scan_sum(n, static_cast<i64>(i) - 3 * n); });
    bool have_generic = false, have_ninth = false;
    for (const auto& s : sums) {
        if (s.has_ninth) {
            rep.ninth_rows.push_back({s.k, Count(s.ninth)});
            // k = 0 puts k^3/9 on the diagonal n = k^3
            if (s.k != 0 && (!have_ninth || Count(s.ninth) > rep.ninth_max)) {
                have_ninth = true;
                rep.ninth_max = s.ninth;
                rep.ninth_argmax_k = s.k;
            }
        }
        if (s.generic > 0 && (!have_generic || Count(s.generic) > rep.generic_max)) {
            have_generic = true;
            rep.generic_max = s.generic;
            rep.generic_argmax_n = s.generic_n;
            rep.generic_argmax_k = s.k;
        }
    }
    const BigInt radius(static_cast<long>(n));
    const i64 kk = rep.ninth_argmax_k;
    if (count_airy({BigInt(static_cast<long>(cube(kk) / 9)), BigInt(static_cast<long>(kk)), radius}) != rep.ninth_max)
        throw Error("divisor recount disagrees with the k^3/9 sweep");
    if (have_generic &&
        count_airy({BigInt(static_cast<long>(rep.generic_argmax_n)), BigInt(static_cast<long>(rep.generic_argmax_k)), radius}) !=
            rep.generic_max)
        throw Error("divisor recount disagrees with the generic sweep");
    return rep;
}

}  // namespace reslab
