#include "reslab/strichartz.hpp"

#include <cmath>
#include <limits>

#include "reslab/parallel.hpp"

namespace reslab {

void WavePacketSpec::validate(int max_dim) const {
    if (dim < 1 || dim > max_dim) throw DomainError("wave packet dimension " + std::to_string(dim) + " unsupported");
    if (m < 1) throw DomainError("wave packet spacing m must be >= 1");
    if (n < 0) throw DomainError("wave packet size N must be >= 0");
}

double WavePacketSpec::l2_norm_squared() const {
    const double side = static_cast<double>(2 * n + 1);
    return std::pow(2 * pi * side / normalisation_radius(n), dim);
}

double WavePacketSpec::amplitude() const { return std::pow(normalisation_radius(n), -0.5 * dim); }

std::string to_string(NormKind k) {
    switch (k) {
        case NormKind::l4_t2: return "L4_T2";
        case NormKind::l6_t1: return "L6_T1";
        case NormKind::l4_t3: return "L4_T3";
    }
    return "?";
}

namespace {

Count resonant(const FrequencyBox& box, int arity, CountMethod method) {
    if (method == CountMethod::mitm) return tuple_tally(box, arity).sum_of_squares();
    return resonant_tuple_count(box, arity, method);
}

NormReport make_report(NormKind kind, int dim, int p, std::int64_t n, std::int64_t m, CountMethod method) {
    const FrequencyBox box(dim, n);
    NormReport r;
    r.kind = kind;
    r.n = n;
    r.m = m;
    r.method = method;
    r.resonant_tuple_count = resonant(box, p / 2, method);
    const double nn = normalisation_radius(n);
    r.norm_powered = std::pow(2 * pi, 1 + dim) * std::pow(nn, -0.5 * p * dim) * r.resonant_tuple_count.to_double();
    r.ratio_to_log = n > 1 ? r.norm_powered / std::log(static_cast<double>(n)) : std::numeric_limits<double>::quiet_NaN();
    return r;
}

void check_size(std::int64_t n, std::int64_t cap, const char* what) {
    if (n < 0) throw DomainError("N must be >= 0");
    if (n > cap) throw BudgetError(std::string(what) + " is capped at N = " + std::to_string(cap));
}

}  // namespace

NormReport l4_norm_2d(std::int64_t n, std::int64_t m, CountMethod method) {
    check_size(n, kL4TwoDimMax, "L4(T x T^2)");
    if (m < 1) throw DomainError("m must be >= 1");
    return make_report(NormKind::l4_t2, 2, 4, n, m, method);
}

NormReport l6_norm_1d(std::int64_t n, std::int64_t m, CountMethod method) {
    check_size(n, kL6OneDimMax, "L6(T x T)");
    if (m < 1) throw DomainError("m must be >= 1");
    return make_report(NormKind::l6_t1, 1, 6, n, m, method);
}

NormReport l4_norm_3d(std::int64_t n, CountMethod method) {
    check_size(n, kL4ThreeDimMax, "L4(T x T^3)");
    NormReport r = make_report(NormKind::l4_t3, 3, 4, n, 1, method);
    const double nn = normalisation_radius(n);
    const WavePacketSpec spec{3, 1, n};
    r.per_n = r.norm_powered / nn;
    r.per_n_packet = r.per_n / (spec.l2_norm_squared() * spec.l2_norm_squared());
    return r;
}

Count gamma_half_box_sum(std::int64_t n) {
    if (n < 0) throw DomainError("N must be >= 0");
    const std::int64_t h = n / 2, side = 2 * h + 1;
    const FrequencyBox box(2, n);
    auto parts = parallel_map<Count>(static_cast<std::size_t>(side * side), [&](std::size_t i) {
        const Freq k{static_cast<std::int64_t>(i) / side - h, static_cast<std::int64_t>(i) % side - h};
        return count_gamma_2d(box, k).count;
    });
    Count total;
    for (const Count& c : parts) total += c;
    return total;
}

}  // namespace reslab
