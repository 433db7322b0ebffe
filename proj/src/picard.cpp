#include "reslab/picard.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "reslab/lattice.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

Complex oscillatory_integral(double phi, double t) {
    if (t < 0) throw DomainError("oscillatory integral needs t >= 0");
    if (std::abs(phi) < kNearResonantThreshold) return {t, -phi * t * t / 2};
    const double x = phi * t;
    const double h = std::sin(x / 2);
    return {std::sin(x) / phi, -2 * h * h / phi};
}

std::string to_string(PicardRoute r) {
    switch (r) {
        case PicardRoute::automatic: return "automatic";
        case PicardRoute::full_sum: return "full_sum";
        case PicardRoute::resonant: return "resonant";
    }
    return "?";
}

PicardRoute parse_picard_route(const std::string& s) {
    if (s == "automatic" || s == "auto") return PicardRoute::automatic;
    if (s == "full_sum" || s == "full") return PicardRoute::full_sum;
    if (s == "resonant") return PicardRoute::resonant;
    throw DomainError("unknown Picard route '" + s + "'");
}

double CoefficientTable::l2_norm() const {
    double s = 0;
    for (const auto& e : entries) s += std::norm(e.value);
    return std::pow(2 * pi, spec.dim / 2.0) * std::sqrt(s);
}

const CoefficientEntry& CoefficientTable::at(const Freq& anchor) const {
    for (const auto& e : entries)
        if (e.anchor == anchor) return e;
    throw DomainError("anchor " + anchor.to_string() + " outside the coefficient support");
}

bool is_full_period_multiple(double t, std::int64_t m) {
    if (t < 0) return false;
    const double j = t * static_cast<double>(m * m) / (2 * pi);
    return std::abs(j - std::round(j)) <= 1e-12 * std::max(1.0, j);
}

AxisHistograms::AxisHistograms(std::int64_t n_, std::int64_t reach_) : n(n_), reach(reach_) {
    by_anchor = parallel_map<AxisHistogram>(static_cast<std::size_t>(2 * reach + 1), [&](std::size_t i) {
        return axis_product_histogram(n, static_cast<std::int64_t>(i) - reach);
    });
}

Count gamma_from_axes(const AxisHistogram& hx, const AxisHistogram& hy) {
    Count total;
    if (hy.empty()) return total;
    std::size_t j = hy.size();
    for (const auto& [x, cx] : hx) {
        while (j > 0 && hy[j - 1].first > -x) --j;
        if (j == 0) break;
        if (hy[j - 1].first == -x) total += Count(cx) * Count(hy[j - 1].second);
    }
    return total;
}

PhaseTable::PhaseTable(std::int64_t smax_, double scale, double t) : smax(smax_) {
    values.resize(static_cast<std::size_t>(2 * smax + 1));
    for (std::int64_t s = -smax; s <= smax; ++s)
        values[static_cast<std::size_t>(s + smax)] = oscillatory_integral(scale * static_cast<double>(s), t);
}

Complex tuple_sum_2d(const AxisHistogram& hx, const AxisHistogram& hy, const PhaseTable& phases) {
    thread_local std::vector<std::uint64_t> counts;
    const std::size_t size = static_cast<std::size_t>(2 * phases.smax + 1);
    if (counts.size() < size) counts.resize(size, 0);
    std::int64_t lo = phases.smax, hi = -phases.smax;
    for (const auto& [x, cx] : hx)
        for (const auto& [y, cy] : hy) {
            const std::int64_t s = x + y;
            counts[static_cast<std::size_t>(s + phases.smax)] += cx * cy;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    Complex sum{0.0, 0.0};
    for (std::int64_t s = lo; s <= hi; ++s) {
        std::uint64_t& c = counts[static_cast<std::size_t>(s + phases.smax)];
        if (c == 0) continue;
        sum += static_cast<double>(c) * phases(s);
        c = 0;
    }
    return sum;
}

Complex apply_prefactor(const Complex& sum, double theta, double scale) {
    return kPicardConstant * std::polar(1.0, -theta) * (scale * sum);
}

PhaseTable cubic_phase_table(std::int64_t n, std::int64_t m, double t) {
    return PhaseTable(32 * n * n, -2 * static_cast<double>(m * m), t);
}

Complex cubic_coefficient_2d(const AxisHistograms& axes, const PhaseTable& phases, std::int64_t m, std::int64_t n,
                             const Freq& k, double t) {
    const Complex sum = tuple_sum_2d(axes.at(k[0]), axes.at(k[1]), phases);
    const double theta = static_cast<double>(m * m) * static_cast<double>(k[0] * k[0] + k[1] * k[1]) * t;
    return apply_prefactor(sum, theta, std::pow(normalisation_radius(n), -3.0));
}

namespace {

PicardRoute resolve_route(const WavePacketSpec& spec, double t, PicardRoute route) {
    const bool period = is_full_period_multiple(t, spec.m);
    if (route == PicardRoute::automatic) return period ? PicardRoute::resonant : PicardRoute::full_sum;
    if (route == PicardRoute::resonant && !period)
        throw DomainError("the resonant closed form needs t = 2 pi j / m^2");
    return route;
}

void check_budget(const WavePacketSpec& spec, PicardRoute route) {
    if (spec.dim == 2) {
        const std::int64_t cap = route == PicardRoute::resonant ? kPicardResonantMax2d : kPicardFullSumMax2d;
        if (spec.n > cap)
            throw BudgetError("d = 2 Picard " + to_string(route) + " is capped at N = " + std::to_string(cap));
    } else if (spec.n > kPicardMax1d) {
        throw BudgetError("d = 1 Picard coefficients are capped at N = " + std::to_string(kPicardMax1d));
    }
}

double scale_for(const WavePacketSpec& spec) {
    return std::pow(normalisation_radius(spec.n), spec.dim == 2 ? -3.0 : -2.5);
}

void fill_2d(CoefficientTable& table) {
    const auto& spec = table.spec;
    const std::int64_t n = spec.n, reach = 3 * n, side = 2 * reach + 1;
    const AxisHistograms axes(n, reach);
    const double scale = scale_for(spec);
    const double t = table.t;
    const bool resonant = table.route == PicardRoute::resonant;
    std::unique_ptr<PhaseTable> phases;
    if (!resonant) phases = std::make_unique<PhaseTable>(cubic_phase_table(n, spec.m, t));
    table.entries = parallel_map<CoefficientEntry>(static_cast<std::size_t>(side * side), [&](std::size_t i) {
        const std::int64_t kx = static_cast<std::int64_t>(i) / side - reach, ky = static_cast<std::int64_t>(i) % side - reach;
        CoefficientEntry e;
        e.anchor = Freq{kx, ky};
        e.frequency = Freq{spec.m * kx, spec.m * ky};
        if (resonant) {
            const double g = gamma_from_axes(axes.at(kx), axes.at(ky)).to_double();
            e.value = apply_prefactor(Complex(t * g, 0.0), 0.0, scale);
        } else {
            e.value = cubic_coefficient_2d(axes, *phases, spec.m, n, e.anchor, t);
        }
        return e;
    });
}

void fill_1d(CoefficientTable& table) {
    const auto& spec = table.spec;
    const std::int64_t n = spec.n, reach = 5 * n;
    const double scale = scale_for(spec);
    const double m2 = static_cast<double>(spec.m * spec.m);
    const double t = table.t;
    const FrequencyBox box(1, n);

    if (table.route == PicardRoute::resonant) {
        table.entries = parallel_map<CoefficientEntry>(static_cast<std::size_t>(2 * reach + 1), [&](std::size_t i) {
            const std::int64_t k = static_cast<std::int64_t>(i) - reach;
            CoefficientEntry e;
            e.anchor = Freq{k};
            e.frequency = Freq{spec.m * k};
            const double g = count_gamma_prime_1d(box, k, CountMethod::mitm).count.to_double();
            e.value = apply_prefactor(Complex(t * g, 0.0), 0.0, scale);
            return e;
        });
        return;
    }

    // Triples (k1, k3, k5) tallied densely by (sum, sum of squares); pairs
    // (k2, k4) sparsely.  R = q_triple - q_pair - k^2 is the resonance defect.
    const std::int64_t tw = 3 * n * n + 1;
    std::vector<std::uint64_t> triples(static_cast<std::size_t>((6 * n + 1) * tw), 0);
    for (std::int64_t a = -n; a <= n; ++a)
        for (std::int64_t b = -n; b <= n; ++b)
            for (std::int64_t c = -n; c <= n; ++c)
                ++triples[static_cast<std::size_t>((a + b + c + 3 * n) * tw + a * a + b * b + c * c)];
    std::vector<AxisHistogram> pairs(static_cast<std::size_t>(4 * n + 1));
    {
        std::vector<std::uint64_t> dense(static_cast<std::size_t>(2 * n * n + 1), 0);
        for (std::int64_t s = -2 * n; s <= 2 * n; ++s) {
            for (std::int64_t a = std::max(-n, s - n); a <= std::min(n, s + n); ++a)
                ++dense[static_cast<std::size_t>(a * a + (s - a) * (s - a))];
            auto& h = pairs[static_cast<std::size_t>(s + 2 * n)];
            for (std::size_t q = 0; q < dense.size(); ++q)
                if (dense[q]) {
                    h.emplace_back(static_cast<std::int64_t>(q), dense[q]);
                    dense[q] = 0;
                }
        }
    }
    const std::int64_t jlo = -2 * n * n, jhi = 3 * n * n;       // q_triple - q_pair
    const std::int64_t rlo = jlo - reach * reach;                // smallest R
    std::vector<Complex> phases(static_cast<std::size_t>(jhi - rlo + 1));
    for (std::int64_t r = rlo; r <= jhi; ++r)
        phases[static_cast<std::size_t>(r - rlo)] = oscillatory_integral(m2 * static_cast<double>(r), t);

    table.entries = parallel_map<CoefficientEntry>(static_cast<std::size_t>(2 * reach + 1), [&](std::size_t i) {
        const std::int64_t k = static_cast<std::int64_t>(i) - reach;
        std::vector<std::uint64_t> hist(static_cast<std::size_t>(jhi - jlo + 1), 0);
        for (std::int64_t s2 = -2 * n; s2 <= 2 * n; ++s2) {
            const std::int64_t s1 = s2 + k;
            if (s1 < -3 * n || s1 > 3 * n) continue;
            const std::uint64_t* tri = &triples[static_cast<std::size_t>((s1 + 3 * n) * tw)];
            for (const auto& [q2, w] : pairs[static_cast<std::size_t>(s2 + 2 * n)]) {
                std::uint64_t* out = &hist[static_cast<std::size_t>(-q2 - jlo)];
                for (std::int64_t q1 = 0; q1 < tw; ++q1) out[q1] += w * tri[q1];
            }
        }
        Complex sum{0.0, 0.0};
        for (std::int64_t j = jlo; j <= jhi; ++j) {
            const std::uint64_t c = hist[static_cast<std::size_t>(j - jlo)];
            if (c) sum += static_cast<double>(c) * phases[static_cast<std::size_t>(j - k * k - rlo)];
        }
        CoefficientEntry e;
        e.anchor = Freq{k};
        e.frequency = Freq{spec.m * k};
        e.value = apply_prefactor(sum, m2 * static_cast<double>(k * k) * t, scale);
        return e;
    });
}

// sum of G(k)^2 over the given anchor radius, G = Gamma (d = 2) or Gamma' (d = 1).
Count gamma_square_sum(int dim, std::int64_t n, std::int64_t reach) {
    std::vector<Count> parts;
    if (dim == 2) {
        const AxisHistograms axes(n, reach);
        const std::int64_t side = 2 * reach + 1;
        parts = parallel_map<Count>(static_cast<std::size_t>(side * side), [&](std::size_t i) {
            const std::int64_t kx = static_cast<std::int64_t>(i) / side - reach, ky = static_cast<std::int64_t>(i) % side - reach;
            const Count g = gamma_from_axes(axes.at(kx), axes.at(ky));
            return g * g;
        });
    } else {
        const FrequencyBox box(1, n);
        parts = parallel_map<Count>(static_cast<std::size_t>(2 * reach + 1), [&](std::size_t i) {
            const Count g = count_gamma_prime_1d(box, static_cast<std::int64_t>(i) - reach, CountMethod::mitm).count;
            return g * g;
        });
    }
    Count total;
    for (const Count& c : parts) total += c;
    return total;
}

}  // namespace

CoefficientTable picard_coefficients(const WavePacketSpec& spec, double t, PicardRoute route) {
    spec.validate(2);
    if (!(t >= 0) || !std::isfinite(t)) throw DomainError("Picard time t must be finite and >= 0");
    CoefficientTable table;
    table.spec = spec;
    table.t = t;
    table.route = resolve_route(spec, t, route);
    check_budget(spec, table.route);
    if (spec.dim == 2)
        fill_2d(table);
    else
        fill_1d(table);
    return table;
}

double picard_l2_norm(const WavePacketSpec& spec, double t, PicardRoute route) {
    spec.validate(2);
    if (!(t >= 0) || !std::isfinite(t)) throw DomainError("Picard time t must be finite and >= 0");
    const PicardRoute resolved = resolve_route(spec, t, route);
    check_budget(spec, resolved);
    if (resolved != PicardRoute::resonant) return picard_coefficients(spec, t, resolved).l2_norm();
    // Resonant closed form, assembled from the exact sum of squared counts.
    const std::int64_t reach = (spec.dim == 2 ? 3 : 5) * spec.n;
    const Count squares = gamma_square_sum(spec.dim, spec.n, reach);
    return std::pow(2 * pi, spec.dim / 2.0) * t * scale_for(spec) * std::sqrt(squares.to_double());
}

double lower_bound_certificate(int dim, std::int64_t n, std::int64_t m) {
    const WavePacketSpec spec{dim, m, n};
    spec.validate(2);
    check_budget(spec, PicardRoute::resonant);
    const double t = 2 * pi / static_cast<double>(m * m);
    const Count squares = gamma_square_sum(dim, n, n / 2);
    return std::pow(2 * pi, dim / 2.0) * t * scale_for(spec) * std::sqrt(squares.to_double());
}

}  // namespace reslab
