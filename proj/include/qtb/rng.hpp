#pragma once

#include <cmath>
#include <cstdint>

namespace qtb::rng {

inline constexpr uint64_t golden = 0x9E3779B97F4A7C15ull;

// splitmix64 step: add the golden-ratio increment, then the standard finalizer.
inline uint64_t splitmix64(uint64_t z) {
    z += golden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// chain one value into a running seed: s <- splitmix64(s XOR v*golden)
inline uint64_t mix(uint64_t s, uint64_t v) { return splitmix64(s ^ (v * golden)); }

// Counter-based stream over the splitmix64 orbit: output i is
// splitmix64(seed + i*golden), so draws depend only on (seed, i).
class Stream {
public:
    explicit Stream(uint64_t seed) : s_(seed) {}

    uint64_t next() {
        uint64_t out = splitmix64(s_);
        s_ += golden;
        return out;
    }

    // uniform on (0,1), 53-bit resolution, never exactly 0 or 1
    double u53() { return (double(next() >> 11) + 0.5) * 0x1p-53; }

    bool bernoulli(double p) { return u53() < p; }

private:
    uint64_t s_;
};

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }
inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) * 0.39894228040143267794; }

// Inverse standard normal CDF via safeguarded Newton on erfc. The tail start
// point comes from the asymptotic Q(x) ~ phi(x)/x; a handful of Newton steps
// then converge to machine precision for u in (2^-54, 1-2^-54).
inline double normal_quantile(double u) {
    bool upper = u > 0.5;
    double q = upper ? 1.0 - u : u;
    double x;
    if (q >= 0.05) {
        x = 0.0;
    } else {
        double t = std::sqrt(-2.0 * std::log(q));
        double t2 = std::sqrt(std::fmax(t * t - 2.0 * std::log(t * 2.50662827463100050242), 1e-12));
        x = -t2;
    }
    for (int it = 0; it < 40; ++it) {
        double err = norm_cdf(x) - q;
        double step = err / std::fmax(norm_pdf(x), 1e-300);
        // clamp to keep the iteration inside a sane bracket
        if (step > 1.0) step = 1.0;
        if (step < -1.0) step = -1.0;
        x -= step;
        if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(x))) break;
    }
    return upper ? -x : x;
}

inline double normal(Stream& st, double mean, double sigma) {
    return mean + sigma * normal_quantile(st.u53());
}

// Binomial(n, p) draw. Exact Bernoulli counting for tiny n, inverse-CDF walk
// from k=0 while the mean is small, normal approximation once n*p*(1-p) is
// large enough that its error is far below bootstrap resolution.
inline long long binomial(Stream& st, long long n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(st, n, 1.0 - p);
    double npq = double(n) * p * (1.0 - p);
    if (n <= 64) {
        long long k = 0;
        for (long long i = 0; i < n; ++i) k += st.bernoulli(p);
        return k;
    }
    if (npq < 400.0) {
        double u = st.u53();
        double ratio = p / (1.0 - p);
        double pmf = std::exp(double(n) * std::log1p(-p));
        double cum = pmf;
        long long k = 0;
        while (u > cum && k < n) {
            ++k;
            pmf *= ratio * double(n - k + 1) / double(k);
            cum += pmf;
            if (pmf < 1e-320) break;
        }
        return k;
    }
    double g = normal_quantile(st.u53());
    long long k = std::llround(double(n) * p + std::sqrt(npq) * g);
    if (k < 0) k = 0;
    if (k > n) k = n;
    return k;
}

} // namespace qtb::rng
