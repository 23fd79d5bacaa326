#include "adtsim/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "adtsim/fft.hpp"

namespace adtsim {

void RateConfig::validate() const {
    if (n_bb < 1) throw std::invalid_argument("RateConfig: n_bb must be >= 1");
    if (osr < 1) throw std::invalid_argument("RateConfig: oversampling K must be >= 1");
    if (fine_res < 1) throw std::invalid_argument("RateConfig: fine resolution R must be >= 1");
}

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa in [0, 1); identical across platforms, unlike
    // std::uniform_real_distribution.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

ComplexSignal gen_stimulus(std::size_t n_bb, std::uint64_t seed, double peak) {
    if (n_bb < 16) throw std::invalid_argument("gen_stimulus: n_bb must be >= 16");
    if (!(peak > 0.0) || peak > 1.0)
        throw std::invalid_argument("gen_stimulus: peak must be in (0, 1]");

    std::mt19937_64 rng(seed);
    ComplexSignal x;
    x.rate = 1.0;
    x.samples.resize(n_bb);
    for (auto& s : x.samples) {
        // Box-Muller; one pair of normals per complex sample.
        const double u1 = 1.0 - uniform01(rng);
        const double u2 = uniform01(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        s = {r * std::cos(2.0 * std::numbers::pi * u2),
             r * std::sin(2.0 * std::numbers::pi * u2)};
    }
    double m = 0.0;
    for (const auto& s : x.samples)
        m = std::max(m, std::max(std::abs(s.real()), std::abs(s.imag())));
    const double scale = peak / m;
    for (auto& s : x.samples) s *= scale;
    return x;
}

ComplexSignal upsample_hold(const ComplexSignal& x, int factor) {
    if (factor < 1) throw std::invalid_argument("upsample_hold: factor must be >= 1");
    ComplexSignal y;
    y.rate = x.rate * factor;
    y.samples.resize(x.size() * static_cast<std::size_t>(factor));
    for (std::size_t n = 0; n < y.samples.size(); ++n)
        y.samples[n] = x.samples[n / static_cast<std::size_t>(factor)];
    return y;
}

RealSignal upsample_hold(const RealSignal& x, int factor) {
    if (factor < 1) throw std::invalid_argument("upsample_hold: factor must be >= 1");
    RealSignal y;
    y.rate = x.rate * factor;
    y.samples.resize(x.size() * static_cast<std::size_t>(factor));
    for (std::size_t n = 0; n < y.samples.size(); ++n)
        y.samples[n] = x.samples[n / static_cast<std::size_t>(factor)];
    return y;
}

ComplexSignal upsample_ideal(const ComplexSignal& x, int factor) {
    if (factor < 1) throw std::invalid_argument("upsample_ideal: factor must be >= 1");
    if (factor == 1) return x;
    const std::size_t n = x.size();
    const std::size_t nf = n * static_cast<std::size_t>(factor);
    auto spec = fft::forward(x.samples);
    std::vector<cplx> up(nf, cplx{0.0, 0.0});
    const double g = static_cast<double>(factor);
    // Signed bins in (-n/2, n/2) transfer directly; an even-length Nyquist bin is
    // split half-and-half between +n/2 and -n/2 so realness is preserved.
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < n; ++k) {
        const bool nyquist = (n % 2 == 0) && (k == half);
        const long signed_k = (k <= half) ? static_cast<long>(k)
                                          : static_cast<long>(k) - static_cast<long>(n);
        if (nyquist) {
            up[half] += 0.5 * g * spec[k];
            up[nf - half] += 0.5 * g * spec[k];
        } else {
            const std::size_t dst = (signed_k >= 0)
                                        ? static_cast<std::size_t>(signed_k)
                                        : nf - static_cast<std::size_t>(-signed_k);
            up[dst] = g * spec[k];
        }
    }
    ComplexSignal y;
    y.rate = x.rate * factor;
    y.samples = fft::inverse(up);
    return y;
}

ComplexSignal downsample(const ComplexSignal& x, int factor, int phase) {
    if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
    if (phase < 0 || phase >= factor)
        throw std::invalid_argument("downsample: phase must be in [0, factor)");
    if (x.size() % static_cast<std::size_t>(factor) != 0)
        throw std::invalid_argument("downsample: factor must divide the record length");
    ComplexSignal y;
    y.rate = x.rate / factor;
    y.samples.resize(x.size() / static_cast<std::size_t>(factor));
    for (std::size_t n = 0; n < y.samples.size(); ++n)
        y.samples[n] = x.samples[n * static_cast<std::size_t>(factor) + static_cast<std::size_t>(phase)];
    return y;
}

ComplexSignal band_extract_demod(const RealSignal& xc, const RateConfig& cfg) {
    cfg.validate();
    if (xc.size() != cfg.n_fine())
        throw std::invalid_argument("band_extract_demod: record length does not match cfg.n_fine()");
    const std::size_t n_bb = cfg.n_bb;
    const std::size_t kc = cfg.carrier_bin();
    auto spec = fft::forward_real(xc.samples);

    // Selected band [f_c - 1/2, f_c + 1/2) is strictly inside (0, f_fine/2) for all
    // valid configs, so the half spectrum suffices.
    std::vector<cplx> bb(n_bb, cplx{0.0, 0.0});
    const double scale = 2.0 * static_cast<double>(n_bb) / static_cast<double>(cfg.n_fine());
    const long lo = -static_cast<long>(n_bb / 2);
    const long hi = static_cast<long>((n_bb + 1) / 2);  // [lo, hi)
    for (long b = lo; b < hi; ++b) {
        const std::size_t src = static_cast<std::size_t>(static_cast<long>(kc) + b);
        const std::size_t dst = (b >= 0) ? static_cast<std::size_t>(b)
                                         : n_bb - static_cast<std::size_t>(-b);
        bb[dst] = scale * spec[src];
    }
    ComplexSignal xhat;
    xhat.rate = cfg.f_bb();
    xhat.samples = fft::inverse(bb);
    return xhat;
}

double nmse_db(const ComplexSignal& ref, const ComplexSignal& est) {
    if (ref.size() != est.size())
        throw std::invalid_argument("nmse_db: length mismatch");
    if (ref.rate != est.rate)
        throw std::invalid_argument("nmse_db: rate mismatch");
    double err = 0.0, sig = 0.0;
    for (std::size_t n = 0; n < ref.size(); ++n) {
        err += std::norm(est.samples[n] - ref.samples[n]);
        sig += std::norm(ref.samples[n]);
    }
    if (sig == 0.0) throw std::invalid_argument("nmse_db: reference has zero energy");
    if (err == 0.0) return kNmseFloorDb;
    return std::max(kNmseFloorDb, 10.0 * std::log10(err / sig));
}

AlignmentResult align_gain_delay(const ComplexSignal& ref, const ComplexSignal& meas, long max_delay) {
    if (ref.size() != meas.size())
        throw std::invalid_argument("align_gain_delay: length mismatch");
    if (ref.rate != meas.rate)
        throw std::invalid_argument("align_gain_delay: rate mismatch");
    const long n = static_cast<long>(ref.size());
    if (max_delay < 0 || 2 * max_delay >= n)
        throw std::invalid_argument("align_gain_delay: max_delay must be < length/2");

    double ref_energy = 0.0;
    for (const auto& s : ref.samples) ref_energy += std::norm(s);
    if (ref_energy == 0.0)
        throw std::invalid_argument("align_gain_delay: reference has zero energy");

    auto corr_at = [&](long d) {
        // <meas, shift(ref, d)> with shift(ref, d)[n] = ref[(n - d) mod n]
        cplx acc{0.0, 0.0};
        for (long i = 0; i < n; ++i) {
            const long j = ((i - d) % n + n) % n;
            acc += meas.samples[static_cast<std::size_t>(i)] *
                   std::conj(ref.samples[static_cast<std::size_t>(j)]);
        }
        return acc;
    };

    // Visit 0, -1, +1, -2, +2, ... so that a strict comparison realizes the
    // tie-break rule (smaller |d| first, then negative d).
    long best_d = 0;
    cplx best_c = corr_at(0);
    double best_mag = std::abs(best_c);
    for (long k = 1; k <= max_delay; ++k) {
        for (const long d : {-k, k}) {
            const cplx c = corr_at(d);
            if (std::abs(c) > best_mag) {
                best_mag = std::abs(c);
                best_c = c;
                best_d = d;
            }
        }
    }

    const cplx gain = best_c / ref_energy;
    if (std::abs(gain) == 0.0)
        throw std::runtime_error("align_gain_delay: zero gain, measurement is orthogonal to reference");

    AlignmentResult out;
    out.delay = best_d;
    out.gain = gain;
    out.aligned.rate = meas.rate;
    out.aligned.samples.resize(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const long j = ((i + best_d) % n + n) % n;
        out.aligned.samples[static_cast<std::size_t>(i)] =
            meas.samples[static_cast<std::size_t>(j)] / gain;
    }
    return out;
}

}  // namespace adtsim
