#include "reslab/numtheory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace reslab {

std::string to_string(const BigInt& x) { return x.get_str(); }

std::string to_string(const ExactRational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

// ---------------------------------------------------------------------------
// Totients and primes

TotientTable totient_table(std::uint64_t limit) {
    if (limit < 1) throw DomainError("totient table limit must be >= 1");
    if (limit > kTotientTableLimit)
        throw BudgetError("totient table limit " + std::to_string(limit) + " exceeds " +
                          std::to_string(kTotientTableLimit));

    TotientTable table;
    table.limit = limit;
    table.values.assign(limit + 1, 0);
    auto& phi = table.values;
    std::vector<std::uint32_t> primes;
    primes.reserve(limit < 100 ? 32 : static_cast<std::size_t>(1.3 * limit / std::log(double(limit))));
    phi[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (phi[i] == 0) {
            phi[i] = static_cast<std::uint32_t>(i - 1);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            std::uint64_t ip = i * p;
            if (ip > limit) break;
            if (i % p == 0) {
                phi[ip] = phi[i] * p;
                break;
            }
            phi[ip] = phi[i] * (p - 1);
        }
    }
    return table;
}

TotientSum totient_sum_ratio(const TotientTable& table) {
    if (table.limit < 2) throw DomainError("totient_sum_ratio needs N >= 2");
    long double sum = 0.0L;
    for (std::uint64_t p = 1; p <= table.limit; ++p) {
        long double lp = static_cast<long double>(p);
        sum += static_cast<long double>(table.values[p]) / (lp * lp);
    }
    const long double n = static_cast<long double>(table.limit);
    const long double six_over_pi2 = 6.0L / (static_cast<long double>(pi) * static_cast<long double>(pi));
    TotientSum out;
    out.limit = table.limit;
    out.sum = static_cast<double>(sum);
    out.ratio = static_cast<double>(sum / std::log(n));
    out.chain_holds = sum > six_over_pi2 * std::log(n + 1.0L);
    return out;
}

TotientSum totient_sum_ratio(std::uint64_t limit) {
    if (limit < 2) throw DomainError("totient_sum_ratio needs N >= 2");
    return totient_sum_ratio(totient_table(limit));
}

std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
    std::vector<std::uint32_t> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

std::uint64_t prime_pi(std::uint64_t n) { return primes_up_to(n).size(); }

BigInt lcm_range(std::uint64_t m) {
    if (m < 1) throw DomainError("lcm_range needs m >= 1");
    const std::uint64_t top = m + 1;
    BigInt out = 1;
    for (std::uint32_t p : primes_up_to(top)) {
        std::uint64_t pk = p;
        while (pk <= top / p) pk *= p;
        out *= BigInt(static_cast<unsigned long>(pk));
    }
    return out;
}

bool lcm_log_bound_holds(std::uint64_t m, const BigInt& lcm) {
    BigInt bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), static_cast<unsigned long>(m + 1),
                  static_cast<unsigned long>(prime_pi(m + 1)));
    return lcm <= bound;
}

// ---------------------------------------------------------------------------
// Factorisation

namespace {

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = primes_up_to(1u << 16);
    return primes;
}

using Clock = std::chrono::steady_clock;

void check_deadline(Clock::time_point deadline) {
    if (Clock::now() > deadline) throw BudgetError("factorisation budget exceeded");
}

bool probably_prime(const BigInt& n) { return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

// Pollard-Brent rho; returns a nontrivial factor of composite n.
BigInt rho_factor(const BigInt& n, Clock::time_point deadline) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    for (unsigned long c = 1;; ++c) {
        BigInt y = 2, x, ys, g = 1, q = 1, tmp;
        const unsigned long m = 128;
        unsigned long r = 1;
        auto step = [&](BigInt& v) {
            v = v * v + c;
            mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
        };
        do {
            x = y;
            for (unsigned long i = 0; i < r; ++i) step(y);
            unsigned long k = 0;
            do {
                ys = y;
                for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
                    step(y);
                    tmp = abs(x - y);
                    q = q * tmp;
                    mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
                check_deadline(deadline);
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                step(ys);
                tmp = abs(x - ys);
                mpz_gcd(g.get_mpz_t(), tmp.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void split_into(const BigInt& n, std::vector<BigInt>& out, Clock::time_point deadline) {
    if (n == 1) return;
    if (probably_prime(n)) {
        out.push_back(n);
        return;
    }
    check_deadline(deadline);
    BigInt f = rho_factor(n, deadline);
    split_into(f, out, deadline);
    split_into(BigInt(n / f), out, deadline);
}

}  // namespace

std::vector<PrimePower> factorize(const BigInt& n_in, FactorBudget budget) {
    if (n_in == 0) throw DomainError("cannot factorise 0");
    const auto deadline = Clock::now() + budget;
    BigInt n = abs(n_in);
    std::vector<PrimePower> out;
    for (std::uint32_t p : small_primes()) {
        if (n == 1) break;
        if (BigInt(p) * p > n) break;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            PrimePower pp{BigInt(p), 0};
            while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
                mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
                ++pp.exponent;
            }
            out.push_back(std::move(pp));
        }
    }
    if (n > 1) {
        std::vector<BigInt> rest;
        split_into(n, rest, deadline);
        std::sort(rest.begin(), rest.end());
        for (auto& p : rest) {
            if (!out.empty() && out.back().prime == p)
                ++out.back().exponent;
            else
                out.push_back({p, 1});
        }
    }
    std::sort(out.begin(), out.end(), [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
    return out;
}

SignedDivisorList signed_divisors(const BigInt& target, FactorBudget budget) {
    if (target == 0) throw DomainError("signed_divisors needs a nonzero target");
    auto factors = factorize(target, budget);
    std::vector<BigInt> pos{BigInt(1)};
    for (const auto& f : factors) {
        const std::size_t base = pos.size();
        BigInt power = 1;
        for (unsigned e = 1; e <= f.exponent; ++e) {
            power *= f.prime;
            for (std::size_t i = 0; i < base; ++i) pos.push_back(pos[i] * power);
        }
    }
    SignedDivisorList out;
    out.target = target;
    out.divisors.reserve(2 * pos.size());
    for (const auto& d : pos) {
        out.divisors.push_back(d);
        out.divisors.push_back(-d);
    }
    std::sort(out.divisors.begin(), out.divisors.end());
    return out;
}

std::vector<std::uint64_t> positive_divisors_u64(std::uint64_t n, FactorBudget budget) {
    if (n == 0) throw DomainError("cannot take divisors of 0");
    std::vector<std::pair<std::uint64_t, unsigned>> factors;
    std::uint64_t rest = n;
    for (std::uint32_t p : small_primes()) {
        if (static_cast<std::uint64_t>(p) * p > rest) break;
        if (rest % p == 0) {
            unsigned e = 0;
            while (rest % p == 0) {
                rest /= p;
                ++e;
            }
            factors.emplace_back(p, e);
        }
    }
    if (rest > 1) {
        const std::uint64_t sp = small_primes().back();
        if (rest <= sp * sp) {
            factors.emplace_back(rest, 1);
        } else {
            for (const auto& f : factorize(BigInt(static_cast<unsigned long>(rest)), budget))
                factors.emplace_back(f.prime.get_ui(), f.exponent);
        }
    }
    std::vector<std::uint64_t> divs{1};
    for (auto [p, e] : factors) {
        const std::size_t base = divs.size();
        std::uint64_t power = 1;
        for (unsigned i = 1; i <= e; ++i) {
            power *= p;
            for (std::size_t j = 0; j < base; ++j) divs.push_back(divs[j] * power);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

// ---------------------------------------------------------------------------
// Gamma presets

GammaPreset GammaPreset::rational(const ExactRational& v) {
    GammaPreset g;
    g.kind = Kind::rational;
    g.value = v;
    g.value.canonicalize();
    return g;
}

GammaPreset GammaPreset::square_root(std::uint64_t d) {
    if (d > (std::uint64_t{1} << 62)) throw DomainError("sqrt radicand too large");
    GammaPreset g;
    g.kind = Kind::sqrt;
    g.radicand = d;
    return g;
}

GammaPreset GammaPreset::e() {
    GammaPreset g;
    g.kind = Kind::euler_e;
    return g;
}

GammaPreset GammaPreset::quotient_list(const BigInt& integer_part, std::vector<BigInt> quotients) {
    for (const auto& a : quotients)
        if (a <= 0) throw DomainError("partial quotients must be positive integers");
    GammaPreset g;
    g.kind = Kind::quotients;
    g.integer_part = integer_part;
    g.list = std::move(quotients);
    return g;
}

namespace {

BigInt parse_bigint(std::string_view s, std::string_view what) {
    std::string str(s);
    if (str.empty()) throw DomainError("empty integer in " + std::string(what));
    std::size_t start = (str[0] == '-' || str[0] == '+') ? 1 : 0;
    if (start == str.size() ||
        !std::all_of(str.begin() + static_cast<std::ptrdiff_t>(start), str.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw DomainError("malformed integer '" + str + "' in " + std::string(what));
    if (str[0] == '+') str.erase(0, 1);
    return BigInt(str);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return parts;
}

}  // namespace

GammaPreset GammaPreset::parse(std::string_view text) {
    if (text == "e") return e();
    if (text.starts_with("rat:")) {
        auto body = text.substr(4);
        auto slash = body.find('/');
        BigInt num = parse_bigint(body.substr(0, slash), "rat preset");
        BigInt den = slash == std::string_view::npos ? BigInt(1) : parse_bigint(body.substr(slash + 1), "rat preset");
        if (den == 0) throw DomainError("rat preset with zero denominator");
        return rational(ExactRational(num, den));
    }
    if (text.starts_with("sqrt:")) {
        BigInt d = parse_bigint(text.substr(5), "sqrt preset");
        if (d < 0 || !d.fits_ulong_p()) throw DomainError("sqrt preset needs a nonnegative 64-bit radicand");
        return square_root(d.get_ui());
    }
    if (text.find("cf:") != std::string_view::npos) {
        BigInt a0 = 0;
        std::vector<BigInt> qs;
        bool seen_cf = false;
        for (auto part : split(text, ';')) {
            if (part.starts_with("int:")) {
                a0 = parse_bigint(part.substr(4), "int part");
            } else if (part.starts_with("cf:")) {
                seen_cf = true;
                auto body = part.substr(3);
                if (!body.empty())
                    for (auto item : split(body, ',')) qs.push_back(parse_bigint(item, "cf preset"));
            } else {
                throw DomainError("unrecognised cf preset component '" + std::string(part) + "'");
            }
        }
        if (!seen_cf) throw DomainError("cf preset without quotient list");
        return quotient_list(a0, std::move(qs));
    }
    throw DomainError("unrecognised gamma preset '" + std::string(text) + "' (expected rat:p/q, sqrt:d, e, cf:a1,a2,...)");
}

std::string GammaPreset::to_string() const {
    switch (kind) {
        case Kind::rational: return "rat:" + value.get_num().get_str() + "/" + value.get_den().get_str();
        case Kind::sqrt: return "sqrt:" + std::to_string(radicand);
        case Kind::euler_e: return "e";
        case Kind::quotients: {
            std::string s = "cf:";
            for (std::size_t i = 0; i < list.size(); ++i) {
                if (i) s += ',';
                s += list[i].get_str();
            }
            if (integer_part != 0) s += ";int:" + integer_part.get_str();
            return s;
        }
    }
    return {};
}

namespace {
std::uint64_t isqrt_u64(std::uint64_t n) {
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), BigInt(static_cast<unsigned long>(n)).get_mpz_t());
    return r.get_ui();
}
}  // namespace

bool GammaPreset::is_rational() const {
    switch (kind) {
        case Kind::rational:
        case Kind::quotients: return true;
        case Kind::sqrt: {
            std::uint64_t r = isqrt_u64(radicand);
            return r * r == radicand;
        }
        case Kind::euler_e: return false;
    }
    return false;
}

ExactRational GammaPreset::exact_value() const {
    switch (kind) {
        case Kind::rational: return value;
        case Kind::quotients: return evaluate_continued_fraction(integer_part, list);
        case Kind::sqrt:
            if (is_rational()) return ExactRational(BigInt(static_cast<unsigned long>(isqrt_u64(radicand))));
            break;
        case Kind::euler_e: break;
    }
    throw DomainError("gamma preset " + to_string() + " is irrational");
}

std::optional<ExactRational> GammaPreset::exact_square() const {
    if (kind == Kind::sqrt) return ExactRational(BigInt(static_cast<unsigned long>(radicand)));
    if (is_rational()) {
        ExactRational v = exact_value();
        return ExactRational(v * v);
    }
    return std::nullopt;
}

bool GammaPreset::is_positive() const {
    switch (kind) {
        case Kind::rational: return value > 0;
        case Kind::sqrt: return radicand > 0;
        case Kind::euler_e: return true;
        case Kind::quotients: return exact_value() > 0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Quotient streams and continued fractions

QuotientSource::QuotientSource(const GammaPreset& gamma) : kind_(gamma.kind) {
    switch (kind_) {
        case GammaPreset::Kind::rational: {
            num_ = gamma.value.get_num();
            den_ = gamma.value.get_den();
            mpz_fdiv_q(a0_.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
            num_ -= a0_ * den_;
            terminated_ = (num_ == 0);
            break;
        }
        case GammaPreset::Kind::sqrt: {
            radicand_ = gamma.radicand;
            root_ = isqrt_u64(radicand_);
            a0_ = BigInt(static_cast<unsigned long>(root_));
            m_ = 0;
            d_ = 1;
            terminated_ = (root_ * root_ == radicand_);
            break;
        }
        case GammaPreset::Kind::euler_e: a0_ = 2; break;
        case GammaPreset::Kind::quotients:
            a0_ = gamma.integer_part;
            list_ = &gamma.list;
            terminated_ = gamma.list.empty();
            break;
    }
}

std::optional<BigInt> QuotientSource::next() {
    if (terminated_) return std::nullopt;
    BigInt a;
    switch (kind_) {
        case GammaPreset::Kind::rational: {
            // remaining value is num_/den_ in (0, 1); invert it
            std::swap(num_, den_);
            mpz_fdiv_q(a.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
            num_ -= a * den_;
            if (num_ == 0) terminated_ = true;
            break;
        }
        case GammaPreset::Kind::sqrt: {
            // state (m + sqrt D)/d; its floor is the quotient produced last
            const std::int64_t last = (static_cast<std::int64_t>(root_) + m_) / d_;
            m_ = d_ * last - m_;
            d_ = static_cast<std::int64_t>((static_cast<__int128>(radicand_) - static_cast<__int128>(m_) * m_) / d_);
            a = BigInt(static_cast<long>((static_cast<std::int64_t>(root_) + m_) / d_));
            break;
        }
        case GammaPreset::Kind::euler_e: {
            const std::size_t n = produced_ + 1;
            a = (n % 3 == 2) ? BigInt(static_cast<unsigned long>(2 * (n + 1) / 3)) : BigInt(1);
            break;
        }
        case GammaPreset::Kind::quotients: {
            a = (*list_)[produced_];
            if (produced_ + 1 == list_->size()) terminated_ = true;
            break;
        }
    }
    ++produced_;
    return a;
}

ContinuedFractionExpansion continued_fraction(const GammaPreset& gamma, std::size_t depth, DepthPolicy policy) {
    if (depth < 1) throw DomainError("continued fraction depth must be >= 1");
    if (depth > kMaxExpansionDepth)
        throw BudgetError("continued fraction depth " + std::to_string(depth) + " exceeds " +
                          std::to_string(kMaxExpansionDepth));
    QuotientSource src(gamma);
    ContinuedFractionExpansion out;
    out.integer_part = src.integer_part();
    BigInt p_prev = 1, q_prev = 0;
    BigInt p = out.integer_part, q = 1;
    out.convergents.push_back({p, q});
    while (out.quotients.size() < depth) {
        auto a = src.next();
        if (!a) {
            out.terminated = true;
            break;
        }
        BigInt p_next = *a * p + p_prev;
        BigInt q_next = *a * q + q_prev;
        p_prev = std::move(p);
        q_prev = std::move(q);
        p = std::move(p_next);
        q = std::move(q_next);
        out.quotients.push_back(*a);
        out.convergents.push_back({p, q});
    }
    if (!out.terminated && gamma.is_rational() && !src.next()) out.terminated = true;
    if (out.terminated && out.quotients.size() < depth && policy == DepthPolicy::require)
        throw DomainError("expansion of " + gamma.to_string() + " ends after " +
                          std::to_string(out.quotients.size()) + " quotients, depth " + std::to_string(depth) +
                          " unreachable");
    return out;
}

ExactRational evaluate_continued_fraction(const BigInt& a0, std::span<const BigInt> quotients) {
    ExactRational v = 0;
    bool have_tail = false;
    for (auto it = quotients.rbegin(); it != quotients.rend(); ++it) {
        ExactRational term = have_tail ? ExactRational(*it) + 1 / v : ExactRational(*it);
        term.canonicalize();
        v = term;
        have_tail = true;
    }
    ExactRational out = have_tail ? ExactRational(a0) + 1 / v : ExactRational(a0);
    out.canonicalize();
    return out;
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Mat2 convergent_product(std::span<const BigInt> quotients) {
    if (quotients.empty()) return {};
    if (quotients.size() == 1) return {quotients[0], 1, 1, 0};
    const std::size_t mid = quotients.size() / 2;
    return convergent_product(quotients.first(mid)) * convergent_product(quotients.subspan(mid));
}

int compare(const GammaPreset& gamma, const ExactRational& x) {
    switch (gamma.kind) {
        case GammaPreset::Kind::rational:
        case GammaPreset::Kind::quotients: {
            int c = cmp(gamma.exact_value(), x);
            return (c > 0) - (c < 0);
        }
        case GammaPreset::Kind::sqrt: {
            if (x < 0) return 1;
            // sign(sqrt(D) - x) = sign(D - x^2) for x >= 0
            ExactRational x2 = x * x;
            int c = cmp(ExactRational(BigInt(static_cast<unsigned long>(gamma.radicand))), x2);
            return (c > 0) - (c < 0);
        }
        case GammaPreset::Kind::euler_e: {
            // Consecutive convergents bracket e; refine until x falls outside.
            QuotientSource src(gamma);
            BigInt p_prev = 1, q_prev = 0, p = src.integer_part(), q = 1;
            for (std::size_t i = 0; i < 200'000; ++i) {
                BigInt a = *src.next();
                BigInt pn = a * p + p_prev, qn = a * q + q_prev;
                ExactRational c0(p, q), c1(pn, qn);
                c0.canonicalize();
                c1.canonicalize();
                const ExactRational& lo = c0 < c1 ? c0 : c1;
                const ExactRational& hi = c0 < c1 ? c1 : c0;
                if (x < lo) return 1;
                if (x > hi) return -1;
                p_prev = std::move(p);
                q_prev = std::move(q);
                p = std::move(pn);
                q = std::move(qn);
            }
            throw PrecisionError("could not separate e from " + to_string(x));
        }
    }
    return 0;
}

}  // namespace reslab
