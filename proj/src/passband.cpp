#include "adtsim/passband.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adtsim {

CtKernelSpec CtKernelSpec::cubic(double delta1, double t1, double t2, double t3) {
    CtKernelSpec k;
    k.kind = Kind::cubic_delay;
    k.delta = delta1;
    k.taus = {t1, t2, t3};
    return k;
}

CtKernelSpec CtKernelSpec::separable(double delta2) {
    CtKernelSpec k;
    k.kind = Kind::separable_quad;
    k.delta = delta2;
    return k;
}

CtKernelSpec CtKernelSpec::general_kernel(double delta, int degree, std::vector<double> table,
                                          double memory_t) {
    CtKernelSpec k;
    k.kind = Kind::general;
    k.delta = delta;
    k.degree = degree;
    k.table = std::move(table);
    k.memory_t = memory_t;
    return k;
}

void CtKernelSpec::validate() const {
    switch (kind) {
        case Kind::cubic_delay:
            for (double t : taus)
                if (t < 0.0 || t > 4.0)
                    throw std::invalid_argument("CtKernelSpec: cubic delays must lie in [0, 4T]");
            break;
        case Kind::separable_quad:
            if (h1.size() != h2.size())
                throw std::invalid_argument("CtKernelSpec: h1/h2 tabulations must have equal length");
            break;
        case Kind::general:
            if (degree < 1) throw std::invalid_argument("CtKernelSpec: general kernel degree must be >= 1");
            if (memory_t <= 0.0 || memory_t > 4.0)
                throw std::invalid_argument("CtKernelSpec: general kernel memory must be in (0, 4T]");
            break;
    }
}

double separable_h1(double t) { return std::exp(-0.95 * t); }

double separable_h2(double t) {
    return std::exp(-0.91 * t) * std::cos(std::numbers::pi / 5.0 * t);
}

int cubic_delays_on_grid(const CtKernelSpec& k, int fine_res, std::array<long, 3>& d) {
    int rounded = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = k.taus[static_cast<std::size_t>(i)] * fine_res;
        const double r = std::round(exact);
        if (std::abs(exact - r) > 1e-9) ++rounded;
        d[static_cast<std::size_t>(i)] = static_cast<long>(r);
    }
    return rounded;
}

RealSignal upconvert_interleave(const ComplexSignal& xd) {
    RealSignal y;
    y.rate = 4.0 * xd.rate;
    y.samples.resize(4 * xd.size());
    for (std::size_t n = 0; n < xd.size(); ++n) {
        const double i = xd.samples[n].real();
        const double q = xd.samples[n].imag();
        y.samples[4 * n + 0] = i;
        y.samples[4 * n + 1] = -q;
        y.samples[4 * n + 2] = -i;
        y.samples[4 * n + 3] = q;
    }
    return y;
}

RealSignal zoh_to_fine(const RealSignal& xt, int fine_res) {
    if (fine_res < 1) throw std::invalid_argument("zoh_to_fine: R must be >= 1");
    return upsample_hold(xt, fine_res);
}

namespace {

// Circular convolution of x with a short kernel h, scaled by the quadrature step;
// y[m] = step * sum_u h[u] x[m - u].
std::vector<double> circular_conv_scaled(const std::vector<double>& x, const std::vector<double>& h,
                                         double step) {
    const std::size_t n = x.size();
    const std::size_t L = h.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        // Split into the wrap-free and wrapped regions to keep the inner loop tight.
        const std::size_t direct = std::min<std::size_t>(L, m + 1);
        for (std::size_t u = 0; u < direct; ++u) acc += h[u] * x[m - u];
        for (std::size_t u = direct; u < L; ++u) acc += h[u] * x[n + m - u];
        y[m] = step * acc;
    }
    return y;
}

RealSignal apply_cubic(const RealSignal& xc, const CtKernelSpec& k, const RateConfig& cfg) {
    std::array<long, 3> d{};
    cubic_delays_on_grid(k, cfg.fine_res, d);
    const long n = static_cast<long>(xc.size());
    RealSignal y;
    y.rate = xc.rate;
    y.samples.resize(xc.size());
    const auto& x = xc.samples;
    for (long m = 0; m < n; ++m) {
        const double p = x[static_cast<std::size_t>(((m - d[0]) % n + n) % n)] *
                         x[static_cast<std::size_t>(((m - d[1]) % n + n) % n)] *
                         x[static_cast<std::size_t>(((m - d[2]) % n + n) % n)];
        y.samples[static_cast<std::size_t>(m)] = x[static_cast<std::size_t>(m)] - k.delta * p;
    }
    return y;
}

RealSignal apply_separable(const RealSignal& xc, const CtKernelSpec& k, const RateConfig& cfg) {
    const int R = cfg.fine_res;
    std::vector<double> h1 = k.h1, h2 = k.h2;
    if (h1.empty()) {
        h1.resize(static_cast<std::size_t>(4 * R));
        h2.resize(static_cast<std::size_t>(4 * R));
        for (std::size_t u = 0; u < h1.size(); ++u) {
            const double t = static_cast<double>(u) / R;
            h1[u] = separable_h1(t);
            h2[u] = separable_h2(t);
        }
    }
    // Left-endpoint Riemann sum at step 1/R (times in units of T).
    const double step = 1.0 / R;
    const auto c1 = circular_conv_scaled(xc.samples, h1, step);
    const auto c2 = circular_conv_scaled(xc.samples, h2, step);
    RealSignal y;
    y.rate = xc.rate;
    y.samples.resize(xc.size());
    for (std::size_t m = 0; m < xc.size(); ++m)
        y.samples[m] = xc.samples[m] - k.delta * c1[m] * c2[m];
    return y;
}

RealSignal apply_general(const RealSignal& xc, const CtKernelSpec& k, const RateConfig& cfg) {
    const int R = cfg.fine_res;
    const long mem = static_cast<long>(std::llround(k.memory_t * R));
    if (mem < 1) throw std::invalid_argument("apply_nonlinearity: general kernel memory rounds to zero");
    std::size_t expect = 1;
    for (int i = 0; i < k.degree; ++i) expect *= static_cast<std::size_t>(mem);
    if (k.table.size() != expect)
        throw std::invalid_argument("apply_nonlinearity: kernel table size does not match memory^degree");

    const double cost = static_cast<double>(xc.size()) * static_cast<double>(expect);
    if (cost > 1e9)
        throw std::invalid_argument("apply_nonlinearity: general kernel cost estimate " +
                                    std::to_string(cost) + " exceeds the 1e9 bound; use a smaller record");

    const long n = static_cast<long>(xc.size());
    const double step = 1.0 / R;
    double step_pow = 1.0;
    for (int i = 0; i < k.degree; ++i) step_pow *= step;

    RealSignal y;
    y.rate = xc.rate;
    y.samples = xc.samples;
    std::vector<long> idx(static_cast<std::size_t>(k.degree), 0);
    const auto& x = xc.samples;
    for (long m = 0; m < n; ++m) {
        double acc = 0.0;
        std::fill(idx.begin(), idx.end(), 0);
        for (std::size_t flat = 0; flat < k.table.size(); ++flat) {
            double prod = k.table[flat];
            if (prod != 0.0) {
                std::size_t rem = flat;
                for (int i = k.degree - 1; i >= 0; --i) {
                    const long u = static_cast<long>(rem % static_cast<std::size_t>(mem));
                    rem /= static_cast<std::size_t>(mem);
                    prod *= x[static_cast<std::size_t>(((m - u) % n + n) % n)];
                }
                acc += prod;
            }
        }
        y.samples[static_cast<std::size_t>(m)] -= k.delta * step_pow * acc;
    }
    return y;
}

}  // namespace

RealSignal apply_nonlinearity(const RealSignal& xc, const CtKernelSpec& k, const RateConfig& cfg) {
    cfg.validate();
    k.validate();
    if (xc.size() != cfg.n_fine())
        throw std::invalid_argument("apply_nonlinearity: record length does not match cfg.n_fine()");
    if (k.delta == 0.0) return xc;
    switch (k.kind) {
        case CtKernelSpec::Kind::cubic_delay:
            return apply_cubic(xc, k, cfg);
        case CtKernelSpec::Kind::separable_quad:
            return apply_separable(xc, k, cfg);
        case CtKernelSpec::Kind::general:
            return apply_general(xc, k, cfg);
    }
    throw std::logic_error("apply_nonlinearity: unreachable");
}

ReferenceRun simulate_reference(const ComplexSignal& x, const EncoderConfig& enc,
                                const CtKernelSpec& k, const RateConfig& cfg) {
    ReferenceRun run;
    std::array<long, 3> d{};
    if (k.kind == CtKernelSpec::Kind::cubic_delay)
        run.rounded_delays = cubic_delays_on_grid(k, cfg.fine_res, d);

    EncodeResult er = encode(x, enc, cfg);
    run.overload_count = er.overload_count;
    const RealSignal xr = upconvert_interleave(er.xd);
    const RealSignal xc = zoh_to_fine(xr, cfg.fine_res);
    const RealSignal y = apply_nonlinearity(xc, k, cfg);
    run.xhat = band_extract_demod(y, cfg);
    run.xd = std::move(er.xd);
    return run;
}

}  // namespace adtsim
