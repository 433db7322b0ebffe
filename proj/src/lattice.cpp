#include "reslab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "reslab/numtheory.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

std::string to_string(CountMethod m) {
    switch (m) {
        case CountMethod::brute: return "brute";
        case CountMethod::fast: return "fast";
        case CountMethod::mitm: return "mitm";
    }
    return "?";
}

CountMethod parse_count_method(const std::string& s) {
    if (s == "brute") return CountMethod::brute;
    if (s == "fast") return CountMethod::fast;
    if (s == "mitm") return CountMethod::mitm;
    throw DomainError("unknown counting method '" + s + "'");
}

std::string to_string(SetKind k) {
    switch (k) {
        case SetKind::gamma_2d: return "Gamma2d";
        case SetKind::gamma_prime_1d: return "GammaPrime1d";
        case SetKind::gamma_dprime_3d: return "GammaDoublePrime3d";
        case SetKind::orthogonal_pairs_2d: return "OrthogonalPairs2d";
        case SetKind::orthogonal_pairs_3d: return "OrthogonalPairs3d";
    }
    return "?";
}

namespace {

// a s + b t = g with g = gcd(a, b) >= 0.
struct ExtGcd {
    std::int64_t g, s, t;
};

ExtGcd ext_gcd(std::int64_t a, std::int64_t b) {
    std::int64_t r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::int64_t tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = s0 - q * s1;
        s0 = s1;
        s1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    if (r0 < 0) return {-r0, -s0, -t0};
    return {r0, s0, t0};
}

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Range of k with lo <= c0 + step * k <= hi, step != 0.
void step_range(std::int64_t c0, std::int64_t step, std::int64_t lo, std::int64_t hi, std::int64_t& kl,
                std::int64_t& kh) {
    if (step > 0) {
        kl = ceil_div(lo - c0, step);
        kh = floor_div(hi - c0, step);
    } else {
        kl = ceil_div(hi - c0, step);
        kh = floor_div(lo - c0, step);
    }
}

// Line a x + b y = r with both coefficients fixed; solves many right-hand
// sides against the same precomputed inverse.
class LineSolver {
public:
    LineSolver(std::int64_t a, std::int64_t b) : a_(a), b_(b) {
        if (a == 0 || b == 0) return;
        ExtGcd e = ext_gcd(a, b);
        g_ = e.g;
        ar_ = a / g_;
        br_ = b / g_;
        mb_ = std::abs(br_);
        inv_ = mod_pos(e.s, mb_);  // ar_ * s == 1 mod |br_|
    }

    std::int64_t count(std::int64_t r, std::int64_t xlo, std::int64_t xhi, std::int64_t ylo, std::int64_t yhi) const {
        if (xlo > xhi || ylo > yhi) return 0;
        if (a_ == 0 && b_ == 0) return r == 0 ? (xhi - xlo + 1) * (yhi - ylo + 1) : 0;
        if (a_ == 0) {
            if (r % b_ != 0) return 0;
            const std::int64_t y = r / b_;
            return (ylo <= y && y <= yhi) ? xhi - xlo + 1 : 0;
        }
        if (b_ == 0) {
            if (r % a_ != 0) return 0;
            const std::int64_t x = r / a_;
            return (xlo <= x && x <= xhi) ? yhi - ylo + 1 : 0;
        }
        if (r % g_ != 0) return 0;
        const std::int64_t rr = r / g_;
        const std::int64_t x0 = mb_ == 1 ? 0 : (mod_pos(rr, mb_) * inv_) % mb_;
        const std::int64_t y0 = (rr - ar_ * x0) / br_;
        // x = x0 + br k, y = y0 - ar k
        std::int64_t k1l, k1h, k2l, k2h;
        step_range(x0, br_, xlo, xhi, k1l, k1h);
        step_range(y0, -ar_, ylo, yhi, k2l, k2h);
        const std::int64_t lo = std::max(k1l, k2l), hi = std::min(k1h, k2h);
        return hi >= lo ? hi - lo + 1 : 0;
    }

private:
    std::int64_t a_, b_, g_ = 0, ar_ = 0, br_ = 0, mb_ = 1, inv_ = 0;
};

void require_dim(const FrequencyBox& box, int d, const char* what) {
    if (box.dim != d) throw DomainError(std::string(what) + " needs a box of dimension " + std::to_string(d));
}

void require_anchor(const FrequencyBox& box, const Freq& k, std::int64_t factor) {
    if (k.dim != box.dim) throw DomainError("anchor dimension does not match the box");
    if (k.sup_norm() > factor * box.radius)
        throw DomainError("anchor " + k.to_string() + " lies outside Z_{" + std::to_string(factor) + "N}");
}

Count sum_counts(const std::vector<Count>& parts) {
    Count total;
    for (const Count& c : parts) total += c;
    return total;
}

}  // namespace

std::int64_t count_line_points(std::int64_t a, std::int64_t b, std::int64_t r, std::int64_t xlo, std::int64_t xhi,
                               std::int64_t ylo, std::int64_t yhi) {
    return LineSolver(a, b).count(r, xlo, xhi, ylo, yhi);
}

std::int64_t count_plane_points(const std::array<std::int64_t, 3>& n, std::int64_t r,
                                const std::array<std::int64_t, 3>& lo, const std::array<std::int64_t, 3>& hi) {
    for (int i = 0; i < 3; ++i)
        if (lo[i] > hi[i]) return 0;
    if (n[0] == 0 && n[1] == 0 && n[2] == 0) {
        if (r != 0) return 0;
        return (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1);
    }
    // Keep the largest coefficient in the solved line and walk another axis.
    int j = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(n[i]) > std::abs(n[j])) j = i;
    const int walk = (j + 1) % 3, other = (j + 2) % 3;
    LineSolver line(n[j], n[other]);
    std::int64_t total = 0;
    for (std::int64_t w = lo[walk]; w <= hi[walk]; ++w)
        total += line.count(r - n[walk] * w, lo[j], hi[j], lo[other], hi[other]);
    return total;
}

ResonanceCount count_gamma_2d(const FrequencyBox& box, const Freq& k, CountMethod method) {
    require_dim(box, 2, "Gamma(k)");
    require_anchor(box, k, 3);
    const std::int64_t n = box.radius, side = box.side();
    const std::int64_t kx = k[0], ky = k[1], kk = k.norm2();
    std::vector<Count> rows;

    if (method == CountMethod::brute) {
        if (std::pow(static_cast<double>(side), 4) > kBruteWorkBudget) throw BudgetError("brute Gamma(k) too large");
        rows = parallel_map<Count>(static_cast<std::size_t>(side), [&](std::size_t i) {
            const std::int64_t x1 = static_cast<std::int64_t>(i) - n;
            std::uint64_t c = 0;
            for (std::int64_t y1 = -n; y1 <= n; ++y1)
                for (std::int64_t x3 = -n; x3 <= n; ++x3)
                    for (std::int64_t y3 = -n; y3 <= n; ++y3) {
                        const std::int64_t x2 = x1 + x3 - kx, y2 = y1 + y3 - ky;
                        if (std::abs(x2) > n || std::abs(y2) > n) continue;
                        if (x1 * x1 + y1 * y1 - x2 * x2 - y2 * y2 + x3 * x3 + y3 * y3 == kk) ++c;
                    }
            return Count(c);
        });
    } else if (method == CountMethod::fast) {
        // a = k1 - k, b = k3 - k: the triple is resonant iff a . b = 0, and
        // b must keep both k + b and k + a + b inside the box.
        rows = parallel_map<Count>(static_cast<std::size_t>(side), [&](std::size_t i) {
            const std::int64_t ax = static_cast<std::int64_t>(i) - n - kx;
            const std::int64_t bxlo = std::max(-n - kx, -n - kx - ax), bxhi = std::min(n - kx, n - kx - ax);
            std::uint64_t c = 0;
            for (std::int64_t y1 = -n; y1 <= n; ++y1) {
                const std::int64_t ay = y1 - ky;
                const std::int64_t bylo = std::max(-n - ky, -n - ky - ay), byhi = std::min(n - ky, n - ky - ay);
                c += static_cast<std::uint64_t>(count_line_points(ax, ay, 0, bxlo, bxhi, bylo, byhi));
            }
            return Count(c);
        });
    } else {
        throw DomainError("Gamma(k) supports the brute and fast methods");
    }
    return {SetKind::gamma_2d, box, k, sum_counts(rows), method};
}

ResonanceCount count_orthogonal_pairs(const FrequencyBox& box, CountMethod method) {
    if (box.dim != 2 && box.dim != 3) throw DomainError("orthogonal pairs need dimension 2 or 3");
    const std::int64_t n = box.radius, side = box.side();
    const SetKind kind = box.dim == 2 ? SetKind::orthogonal_pairs_2d : SetKind::orthogonal_pairs_3d;
    std::vector<Count> rows;
    if (method == CountMethod::brute) {
        if (std::pow(static_cast<double>(side), 2 * box.dim) > kBruteWorkBudget)
            throw BudgetError("brute orthogonal-pair count too large");
        rows = parallel_map<Count>(static_cast<std::size_t>(side), [&](std::size_t i) {
            const std::int64_t x1 = static_cast<std::int64_t>(i) - n;
            std::uint64_t c = 0;
            if (box.dim == 2) {
                for (std::int64_t y1 = -n; y1 <= n; ++y1)
                    for (std::int64_t x3 = -n; x3 <= n; ++x3)
                        for (std::int64_t y3 = -n; y3 <= n; ++y3)
                            if (x1 * x3 + y1 * y3 == 0) ++c;
            } else {
                for (std::int64_t y1 = -n; y1 <= n; ++y1)
                    for (std::int64_t z1 = -n; z1 <= n; ++z1)
                        for (std::int64_t x3 = -n; x3 <= n; ++x3)
                            for (std::int64_t y3 = -n; y3 <= n; ++y3)
                                for (std::int64_t z3 = -n; z3 <= n; ++z3)
                                    if (x1 * x3 + y1 * y3 + z1 * z3 == 0) ++c;
            }
            return Count(c);
        });
    } else if (method == CountMethod::fast) {
        rows = parallel_map<Count>(static_cast<std::size_t>(side), [&](std::size_t i) {
            const std::int64_t x1 = static_cast<std::int64_t>(i) - n;
            std::uint64_t c = 0;
            for (std::int64_t y1 = -n; y1 <= n; ++y1) {
                if (box.dim == 2) {
                    c += static_cast<std::uint64_t>(count_line_points(x1, y1, 0, -n, n, -n, n));
                } else {
                    for (std::int64_t z1 = -n; z1 <= n; ++z1)
                        c += static_cast<std::uint64_t>(count_plane_points({x1, y1, z1}, 0, {-n, -n, -n}, {n, n, n}));
                }
            }
            return Count(c);
        });
    } else {
        throw DomainError("orthogonal pairs support the brute and fast methods");
    }
    return {kind, box, std::nullopt, sum_counts(rows), method};
}

OrthogonalCount fast_orthogonal_count(std::int64_t n) {
    if (n < 0) throw DomainError("radius must be nonnegative");
    OrthogonalCount out;
    out.radius = n;
    const std::uint64_t side = static_cast<std::uint64_t>(2 * n + 1);
    out.zero_row = Count(side) * Count(side);
    out.total = out.zero_row;
    if (n == 0) return out;
    const TotientTable phi = totient_table(static_cast<std::uint64_t>(n));
    // Primitive vectors of sup-norm s number 8 phi(s); a nonzero k1 = j u with
    // u primitive has 2[N/s]+1 orthogonal partners (multiples of u rotated).
    for (std::int64_t s = 1; s <= n; ++s) {
        const std::uint64_t f = phi(static_cast<std::uint64_t>(s));
        const std::uint64_t q = static_cast<std::uint64_t>(n / s);
        out.total += Count(8) * Count(f) * Count(q) * Count(2 * q + 1);
        out.quadrant_core += Count(q) * Count(q) * Count(f);
    }
    return out;
}

ResonanceCount count_gamma_prime_1d(const FrequencyBox& box, std::int64_t k, CountMethod method) {
    require_dim(box, 1, "Gamma'(k)");
    const std::int64_t n = box.radius, side = box.side();
    if (std::abs(k) > 5 * n) throw DomainError("anchor " + std::to_string(k) + " lies outside Z_{5N}");
    const std::int64_t kk = k * k;
    std::vector<Count> rows;

    if (method == CountMethod::brute) {
        if (std::pow(static_cast<double>(side), 4) > kBruteWorkBudget) throw BudgetError("brute Gamma'(k) too large");
        rows = parallel_map<Count>(static_cast<std::size_t>(side), [&](std::size_t i) {
            const std::int64_t k1 = static_cast<std::int64_t>(i) - n;
            std::uint64_t c = 0;
            for (std::int64_t k2 = -n; k2 <= n; ++k2)
                for (std::int64_t k3 = -n; k3 <= n; ++k3)
                    for (std::int64_t k4 = -n; k4 <= n; ++k4) {
                        const std::int64_t k5 = k - k1 + k2 - k3 + k4;
                        if (std::abs(k5) > n) continue;
                        if (k1 * k1 - k2 * k2 + k3 * k3 - k4 * k4 + k5 * k5 == kk) ++c;
                    }
            return Count(c);
        });
    } else if (method == CountMethod::mitm || method == CountMethod::fast) {
        if (n > 128) throw BudgetError("meet-in-the-middle Gamma'(k) is capped at N = 128");
        // P[s][q] = #{(a, b) in [-N, N]^2 : a + b = s, a^2 + b^2 = q}; the
        // quintuple splits into (k1, k3), (k2, k4) and the free k5.
        const std::int64_t qmax = 2 * n * n, width = qmax + 1;
        std::vector<std::uint32_t> pairs(static_cast<std::size_t>((4 * n + 1) * width), 0);
        std::vector<std::vector<std::int64_t>> support(static_cast<std::size_t>(4 * n + 1));
        for (std::int64_t a = -n; a <= n; ++a)
            for (std::int64_t b = -n; b <= n; ++b) {
                const std::size_t idx = static_cast<std::size_t>((a + b + 2 * n) * width + a * a + b * b);
                if (pairs[idx]++ == 0) support[static_cast<std::size_t>(a + b + 2 * n)].push_back(a * a + b * b);
            }
        rows = parallel_map<Count>(static_cast<std::size_t>(side), [&](std::size_t i) {
            const std::int64_t k5 = static_cast<std::int64_t>(i) - n;
            // (k1+k3) - (k2+k4) = k - k5, (k1^2+k3^2) - (k2^2+k4^2) = k^2 - k5^2
            const std::int64_t ds = k - k5, dq = kk - k5 * k5;
            Count c;
            for (std::int64_t s = -2 * n; s <= 2 * n; ++s) {
                const std::int64_t s2 = s - ds;
                if (s2 < -2 * n || s2 > 2 * n) continue;
                const std::uint32_t* p1 = &pairs[static_cast<std::size_t>((s + 2 * n) * width)];
                const std::uint32_t* p2 = &pairs[static_cast<std::size_t>((s2 + 2 * n) * width)];
                std::uint64_t acc = 0;
                for (std::int64_t q : support[static_cast<std::size_t>(s + 2 * n)]) {
                    const std::int64_t q2 = q - dq;
                    if (q2 < 0 || q2 > qmax) continue;
                    acc += static_cast<std::uint64_t>(p1[q]) * p2[q2];
                }
                c += Count(acc);
            }
            return c;
        });
        method = CountMethod::mitm;
    } else {
        throw DomainError("Gamma'(k) supports the brute and mitm methods");
    }
    return {SetKind::gamma_prime_1d, box, Freq{k}, sum_counts(rows), method};
}

ResonanceCount count_gamma_dprime_3d(const FrequencyBox& box, const Freq& k, CountMethod method) {
    require_dim(box, 3, "Gamma''(k)");
    require_anchor(box, k, 3);
    const std::int64_t n = box.radius, side = box.side();
    const std::int64_t kk = k.norm2();
    std::vector<Count> rows;

    if (method == CountMethod::brute) {
        if (n > kGammaDoublePrimeBruteMax) throw BudgetError("brute Gamma''(k) is capped at N = 24");
        rows = parallel_map<Count>(static_cast<std::size_t>(side * side), [&](std::size_t i) {
            const std::int64_t x1 = static_cast<std::int64_t>(i) / side - n, y1 = static_cast<std::int64_t>(i) % side - n;
            std::uint64_t c = 0;
            for (std::int64_t z1 = -n; z1 <= n; ++z1)
                for (std::int64_t x3 = -n; x3 <= n; ++x3) {
                    const std::int64_t x2 = x1 + x3 - k[0];
                    if (std::abs(x2) > n) continue;
                    for (std::int64_t y3 = -n; y3 <= n; ++y3) {
                        const std::int64_t y2 = y1 + y3 - k[1];
                        if (std::abs(y2) > n) continue;
                        for (std::int64_t z3 = -n; z3 <= n; ++z3) {
                            const std::int64_t z2 = z1 + z3 - k[2];
                            if (std::abs(z2) > n) continue;
                            const std::int64_t q = x1 * x1 + y1 * y1 + z1 * z1 - x2 * x2 - y2 * y2 - z2 * z2 +
                                                   x3 * x3 + y3 * y3 + z3 * z3;
                            if (q == kk) ++c;
                        }
                    }
                }
            return Count(c);
        });
    } else if (method == CountMethod::mitm || method == CountMethod::fast) {
        if (n > kGammaDoublePrimeMitmMax) throw BudgetError("meet-in-the-middle Gamma''(k) is capped at N = 64");
        const Count box_size = box.cardinality();
        rows = parallel_map<Count>(static_cast<std::size_t>(side * side), [&](std::size_t i) {
            const std::int64_t x3 = static_cast<std::int64_t>(i) / side - n, y3 = static_cast<std::int64_t>(i) % side - n;
            Count c;
            for (std::int64_t z3 = -n; z3 <= n; ++z3) {
                // (k1, k2) with k1 - k2 = d and |k1|^2 - |k2|^2 = cq, i.e.
                // 2 d . k1 = cq + |d|^2 over k1 in box and box + d.
                const std::array<std::int64_t, 3> d{k[0] - x3, k[1] - y3, k[2] - z3};
                const std::int64_t cq = kk - (x3 * x3 + y3 * y3 + z3 * z3);
                const std::int64_t dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                if (dd == 0) {
                    if (cq == 0) c += box_size;
                    continue;
                }
                std::array<std::int64_t, 3> lo{}, hi{}, normal{};
                for (int j = 0; j < 3; ++j) {
                    lo[j] = std::max(-n, -n + d[j]);
                    hi[j] = std::min(n, n + d[j]);
                    normal[j] = 2 * d[j];
                }
                c += Count(static_cast<std::uint64_t>(count_plane_points(normal, cq + dd, lo, hi)));
            }
            return c;
        });
        method = CountMethod::mitm;
    } else {
        throw DomainError("Gamma''(k) supports the brute and mitm methods");
    }
    return {SetKind::gamma_dprime_3d, box, k, sum_counts(rows), method};
}

DirectionSum direction_sum_3d(std::int64_t n, bool record_planes) {
    if (n < 1) throw DomainError("direction sum needs N >= 1");
    if (n > kDirectionSumMax) throw BudgetError("direction sum is capped at N = 512");
    struct Part {
        Count sum;
        std::uint64_t directions = 0;
        std::vector<PlaneTerm> planes;
    };
    auto parts = parallel_map<Part>(static_cast<std::size_t>(n), [&](std::size_t i) {
        const std::int64_t a = static_cast<std::int64_t>(i) + 1;
        const std::uint64_t weight = static_cast<std::uint64_t>(n / a);
        Part part;
        for (std::int64_t b = 1; b <= a; ++b) {
            const std::int64_t gab = std::gcd(a, b);
            const LineSolver line(a, b);
            for (std::int64_t c = 1; c <= b; ++c) {
                if (std::gcd(gab, c) != 1) continue;
                // a x + b y = -c z; the count at z equals the count at -z.
                std::int64_t points = line.count(0, -n, n, -n, n);
                for (std::int64_t z = 1; z <= n; ++z) points += 2 * line.count(-c * z, -n, n, -n, n);
                part.sum += Count(weight) * Count(static_cast<std::uint64_t>(points));
                ++part.directions;
                if (record_planes) part.planes.push_back({{a, b, c}, points});
            }
        }
        return part;
    });
    DirectionSum out;
    out.radius = n;
    for (auto& p : parts) {
        out.sum += p.sum;
        out.directions += p.directions;
        if (record_planes) out.planes.insert(out.planes.end(), p.planes.begin(), p.planes.end());
    }
    out.ratio = out.sum.to_double() / std::pow(static_cast<double>(n), 4);
    return out;
}

// ---------------------------------------------------------------------------
// Tally engine

namespace {

using Hist = std::vector<std::pair<std::int64_t, std::uint64_t>>;

// hist[s + r N] lists (sum of squares, multiplicity) over r-tuples of
// [-N, N] whose sum is s.
std::vector<Hist> axis_tuple_histograms(std::int64_t n, int r) {
    const std::int64_t smax = r * n;
    std::vector<Hist> out(static_cast<std::size_t>(2 * smax + 1));
    std::vector<std::uint64_t> dense(static_cast<std::size_t>(r * n * n + 1), 0);
    std::vector<std::int64_t> touched;
    auto bump = [&](std::int64_t q) {
        if (dense[static_cast<std::size_t>(q)]++ == 0) touched.push_back(q);
    };
    for (std::int64_t s = -smax; s <= smax; ++s) {
        if (r == 1) {
            bump(s * s);
        } else if (r == 2) {
            for (std::int64_t a = std::max(-n, s - n); a <= std::min(n, s + n); ++a) bump(a * a + (s - a) * (s - a));
        } else {
            for (std::int64_t a = -n; a <= n; ++a)
                for (std::int64_t b = std::max(-n, s - a - n); b <= std::min(n, s - a + n); ++b) {
                    const std::int64_t c = s - a - b;
                    bump(a * a + b * b + c * c);
                }
        }
        std::sort(touched.begin(), touched.end());
        Hist& h = out[static_cast<std::size_t>(s + smax)];
        h.reserve(touched.size());
        for (std::int64_t q : touched) {
            h.emplace_back(q, dense[static_cast<std::size_t>(q)]);
            dense[static_cast<std::size_t>(q)] = 0;
        }
        touched.clear();
    }
    return out;
}

struct Scratch {
    std::vector<std::uint64_t> dense;
    std::vector<std::int64_t> touched;
    Hist a, b;

    void ensure(std::size_t size) {
        if (dense.size() < size) dense.resize(size, 0);
    }
};

// Convolution of two sparse histograms, accumulated into scratch.dense.
void convolve_into(const Hist& x, const Hist& y, Scratch& sc) {
    for (const auto& [qa, ma] : x)
        for (const auto& [qb, mb] : y) {
            std::uint64_t& slot = sc.dense[static_cast<std::size_t>(qa + qb)];
            if (slot == 0) sc.touched.push_back(qa + qb);
            slot += ma * mb;
        }
}

void drain(Scratch& sc, Hist& out, bool sorted) {
    if (sorted) std::sort(sc.touched.begin(), sc.touched.end());
    out.clear();
    for (std::int64_t q : sc.touched) {
        out.emplace_back(q, sc.dense[static_cast<std::size_t>(q)]);
        sc.dense[static_cast<std::size_t>(q)] = 0;
    }
    sc.touched.clear();
}

struct SliceEngine {
    std::int64_t n;
    int dim, arity;
    std::int64_t smax, width;
    std::vector<Hist> axis;

    SliceEngine(const FrequencyBox& box, int r)
        : n(box.radius), dim(box.dim), arity(r), smax(r * box.radius), width(2 * r * box.radius + 1),
          axis(axis_tuple_histograms(box.radius, r)) {}

    std::size_t slices() const {
        std::size_t s = 1;
        for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(width);
        return s;
    }

    std::array<std::int64_t, 3> decode(std::size_t flat) const {
        std::array<std::int64_t, 3> s{0, 0, 0};
        for (int i = dim - 1; i >= 0; --i) {
            s[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(flat % static_cast<std::size_t>(width)) - smax;
            flat /= static_cast<std::size_t>(width);
        }
        return s;
    }

    const Hist& at(std::int64_t s) const { return axis[static_cast<std::size_t>(s + smax)]; }

    double work() const {
        double total = 0;
        for (const Hist& h : axis) total += static_cast<double>(h.size());
        return std::pow(total, dim);
    }

    // Histogram over sum of squared norms for the slice with linear sum s.
    void slice(const std::array<std::int64_t, 3>& s, Scratch& sc, Hist& out, bool sorted) const {
        if (dim == 1) {
            out = at(s[0]);
            return;
        }
        sc.ensure(static_cast<std::size_t>(dim * arity * n * n + 1));
        convolve_into(at(s[0]), at(s[1]), sc);
        if (dim == 2) {
            drain(sc, out, sorted);
            return;
        }
        drain(sc, sc.a, false);
        convolve_into(sc.a, at(s[2]), sc);
        drain(sc, out, sorted);
    }
};

Count squares(const Hist& h) {
    Count c;
    for (const auto& kv : h) c += Count(kv.second) * Count(kv.second);
    return c;
}

Count brute_resonant(const FrequencyBox& box, int arity) {
    const int members = 2 * arity;
    if (std::pow(static_cast<double>(box.side()), box.dim * (members - 1)) > kBruteWorkBudget)
        throw BudgetError("brute resonant tuple count too large");
    std::vector<Freq> pts;
    const std::int64_t n = box.radius;
    for (std::int64_t x = -n; x <= n; ++x)
        for (std::int64_t y = (box.dim >= 2 ? -n : 0); y <= (box.dim >= 2 ? n : 0); ++y)
            for (std::int64_t z = (box.dim >= 3 ? -n : 0); z <= (box.dim >= 3 ? n : 0); ++z) {
                Freq f;
                f.dim = box.dim;
                f.c = {x, y, z};
                pts.push_back(f);
            }
    // Signs alternate +, -, +, ...; the last member (sign -) is solved from
    // the linear constraint.
    auto rows = parallel_map<Count>(pts.size(), [&](std::size_t first) {
        std::uint64_t c = 0;
        std::array<std::int64_t, 3> lin = pts[first].c;
        std::int64_t quad = pts[first].norm2();
        auto rec = [&](auto&& self, int depth) -> void {
            if (depth == members - 1) {
                if (std::abs(lin[0]) > n || std::abs(lin[1]) > n || std::abs(lin[2]) > n) return;
                if (quad == lin[0] * lin[0] + lin[1] * lin[1] + lin[2] * lin[2]) ++c;
                return;
            }
            const std::int64_t sign = (depth % 2 == 0) ? 1 : -1;
            for (const Freq& p : pts) {
                for (int j = 0; j < 3; ++j) lin[static_cast<std::size_t>(j)] += sign * p.c[static_cast<std::size_t>(j)];
                quad += sign * p.norm2();
                self(self, depth + 1);
                for (int j = 0; j < 3; ++j) lin[static_cast<std::size_t>(j)] -= sign * p.c[static_cast<std::size_t>(j)];
                quad -= sign * p.norm2();
            }
        };
        rec(rec, 1);
        return Count(c);
    });
    return sum_counts(rows);
}

void require_arity(int arity) {
    if (arity < 1 || arity > 3) throw DomainError("tally arity must be 1, 2 or 3");
}

}  // namespace

Count TallyTable::total() const {
    Count c;
    for (const auto& e : entries) c += Count(e.value);
    return c;
}

Count TallyTable::sum_of_squares() const {
    Count c;
    for (const auto& e : entries) c += Count(e.value) * Count(e.value);
    return c;
}

TallyTable tuple_tally(const FrequencyBox& box, int arity) {
    require_arity(arity);
    if (std::pow(static_cast<double>(box.side()), box.dim * arity) > kTallyTableBudget)
        throw BudgetError("tally table exceeds the memory budget");
    SliceEngine engine(box, arity);
    auto parts = parallel_map<std::vector<TallyEntry>>(engine.slices(), [&](std::size_t flat) {
        thread_local Scratch sc;
        const auto s = engine.decode(flat);
        Hist h;
        engine.slice(s, sc, h, true);
        std::vector<TallyEntry> rows;
        rows.reserve(h.size());
        Freq key;
        key.dim = box.dim;
        key.c = s;
        for (const auto& [q, v] : h) rows.push_back({key, q, v});
        return rows;
    });
    TallyTable table;
    table.box = box;
    table.arity = arity;
    for (auto& p : parts) table.entries.insert(table.entries.end(), p.begin(), p.end());
    return table;
}

Count resonant_tuple_count(const FrequencyBox& box, int arity, CountMethod method) {
    require_arity(arity);
    if (method == CountMethod::brute) return brute_resonant(box, arity);
    SliceEngine engine(box, arity);
    if (engine.work() > kTallyWorkBudget) throw BudgetError("resonant tuple count exceeds the work budget");
    auto parts = parallel_map<Count>(engine.slices(), [&](std::size_t flat) {
        thread_local Scratch sc;
        Hist h;
        engine.slice(engine.decode(flat), sc, h, false);
        return squares(h);
    });
    return sum_counts(parts);
}

std::vector<std::pair<std::int64_t, std::uint64_t>> axis_product_histogram(std::int64_t n, std::int64_t c) {
    std::vector<std::int64_t> prods;
    const std::int64_t lo = -n - c, hi = n - c;
    prods.reserve(static_cast<std::size_t>((hi - lo + 1) * (hi - lo + 1)));
    for (std::int64_t u = lo; u <= hi; ++u)
        for (std::int64_t v = std::max(lo, lo - u); v <= std::min(hi, hi - u); ++v) prods.push_back(u * v);
    std::sort(prods.begin(), prods.end());
    Hist out;
    for (std::int64_t x : prods) {
        if (!out.empty() && out.back().first == x)
            ++out.back().second;
        else
            out.emplace_back(x, 1);
    }
    return out;
}

}  // namespace reslab
