#include "minact/types.hpp"

#include <cmath>

namespace minact {

Box::Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size() || lo.size() == 0)
        throw ConfigError("box bounds must be nonempty and of equal dimension");
    for (int i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw ConfigError("box has empty extent in coordinate " + std::to_string(i));
}

bool Box::contains(const Vec& x, double tol) const {
    for (int i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    return true;
}

Vec Box::clamp(const Vec& x) const {
    Vec y = x;
    for (int i = 0; i < lo.size(); ++i) y[i] = std::min(std::max(y[i], lo[i]), hi[i]);
    return y;
}

Box Box::cube(int dim, double lo, double hi) {
    return Box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
}

std::uint64_t Rng::splitmix() {
    // splitmix64, used to spread the user seed over the state
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() { return splitmix(); }

double Rng::unit() {
    // 53 significant bits -> [0,1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = unit();
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Vec Rng::point_in_box(const Box& box) {
    Vec x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = uniform(box.lo[i], box.hi[i]);
    return x;
}

Vec Rng::unit_vector(int dim) {
    Vec v(dim);
    double n = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v[i] = normal();
        n = v.norm();
    } while (n < 1e-12);
    return v / n;
}

namespace {
constexpr int kHaltonPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}
} // namespace

Vec halton(std::uint64_t i, int dim) {
    if (dim > static_cast<int>(std::size(kHaltonPrimes)))
        throw ConfigError("halton sampling supports at most 12 dimensions");
    Vec x(dim);
    for (int d = 0; d < dim; ++d) x[d] = radical_inverse(i + 1, kHaltonPrimes[d]);
    return x;
}

Vec halton_in_box(std::uint64_t i, const Box& box) {
    Vec u = halton(i, box.dim());
    Vec x(box.dim());
    for (int d = 0; d < box.dim(); ++d) x[d] = box.lo[d] + u[d] * (box.hi[d] - box.lo[d]);
    return x;
}

} // namespace minact
