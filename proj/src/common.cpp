#include "reslab/common.hpp"
#include "reslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numeric>

namespace reslab {

std::string Count::to_string() const {
    if (v_ == 0) return "0";
    std::string s;
    rep v = v_;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

Freq::Freq(std::initializer_list<std::int64_t> xs) {
    if (xs.size() < 1 || xs.size() > 3) throw DomainError("frequency vectors have dimension 1, 2 or 3");
    dim = static_cast<int>(xs.size());
    std::copy(xs.begin(), xs.end(), c.begin());
}

Freq Freq::from_vector(const std::vector<std::int64_t>& xs) {
    if (xs.empty() || xs.size() > 3) throw DomainError("frequency vectors have dimension 1, 2 or 3");
    Freq f;
    f.dim = static_cast<int>(xs.size());
    std::copy(xs.begin(), xs.end(), f.c.begin());
    return f;
}

std::int64_t Freq::sup_norm() const {
    std::int64_t s = 0;
    for (int i = 0; i < dim; ++i) s = std::max(s, std::abs(c[static_cast<std::size_t>(i)]));
    return s;
}

std::vector<std::int64_t> Freq::to_vector() const {
    return {c.begin(), c.begin() + dim};
}

std::string Freq::to_string() const {
    std::string s;
    for (int i = 0; i < dim; ++i) {
        if (i) s += ',';
        s += std::to_string(c[static_cast<std::size_t>(i)]);
    }
    return s;
}

FrequencyBox::FrequencyBox(int d, std::int64_t n) : dim(d), radius(n) {
    if (d < 1 || d > 3) throw DomainError("box dimension must be 1, 2 or 3");
    if (n < 0) throw DomainError("box radius must be nonnegative");
}

Count FrequencyBox::cardinality() const {
    Count c = 1;
    for (int i = 0; i < dim; ++i) c *= Count(static_cast<std::uint64_t>(side()));
    return c;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    return std::gcd(a, b);
}

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() {
    unsigned n = g_threads.load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

}  // namespace reslab
