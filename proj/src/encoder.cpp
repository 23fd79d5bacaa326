#include "adtsim/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adtsim {

void EncoderConfig::validate() const {
    if (oversample < 1) throw std::invalid_argument("EncoderConfig: oversample must be >= 1");
    if (kind == EncoderKind::passthrough) return;
    if (levels.size() < 2) throw std::invalid_argument("EncoderConfig: need >= 2 levels");
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw std::invalid_argument("EncoderConfig: levels must be sorted");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] == levels[i - 1])
            throw std::invalid_argument("EncoderConfig: levels must be distinct");
    const double lo = levels.front(), hi = levels.back();
    if (std::abs(lo + hi) > 1e-12)
        throw std::invalid_argument("EncoderConfig: levels must be symmetric about 0");
    if (std::abs(hi - 1.0) > 1e-12)
        throw std::invalid_argument("EncoderConfig: levels must span [-1, 1]");
}

double quantize_nearest(double u, std::span<const double> levels) {
    // levels sorted; midpoint ties go to the larger level.
    auto it = std::lower_bound(levels.begin(), levels.end(), u);
    if (it == levels.begin()) return levels.front();
    if (it == levels.end()) return levels.back();
    const double above = *it;
    const double below = *(it - 1);
    return (u - below < above - u) ? below : above;
}

namespace {

void encode_component(const std::vector<double>& in, const EncoderConfig& cfg,
                      std::vector<double>& out, std::size_t& overloads) {
    out.resize(in.size());
    switch (cfg.kind) {
        case EncoderKind::passthrough:
            out = in;
            break;
        case EncoderKind::quantizer:
            for (std::size_t n = 0; n < in.size(); ++n)
                out[n] = quantize_nearest(in[n], cfg.levels);
            break;
        case EncoderKind::dsm1: {
            // First-order error-feedback modulator, zero initial state.
            const double top = cfg.levels.back();
            const double gap = top - cfg.levels[cfg.levels.size() - 2];
            double e = 0.0;
            for (std::size_t n = 0; n < in.size(); ++n) {
                const double u = in[n] + e;
                if (std::abs(u) > top + gap) ++overloads;
                const double q = quantize_nearest(u, cfg.levels);
                e = u - q;
                out[n] = q;
            }
            break;
        }
    }
}

}  // namespace

EncodeResult encode(const ComplexSignal& x, const EncoderConfig& cfg, const RateConfig& rates) {
    cfg.validate();
    rates.validate();
    if (cfg.oversample != rates.osr)
        throw std::invalid_argument("encode: EncoderConfig.oversample must equal RateConfig.osr");
    if (x.size() != rates.n_bb)
        throw std::invalid_argument("encode: input length does not match rates.n_bb");

    const ComplexSignal up = (cfg.interpolation == InterpKind::ideal)
                                 ? upsample_ideal(x, cfg.oversample)
                                 : upsample_hold(x, cfg.oversample);

    std::vector<double> i_in(up.size()), q_in(up.size());
    for (std::size_t n = 0; n < up.size(); ++n) {
        i_in[n] = up.samples[n].real();
        q_in[n] = up.samples[n].imag();
    }

    EncodeResult res;
    std::vector<double> i_out, q_out;
    encode_component(i_in, cfg, i_out, res.overload_count);
    encode_component(q_in, cfg, q_out, res.overload_count);

    res.xd.rate = rates.f_d();
    res.xd.samples.resize(up.size());
    for (std::size_t n = 0; n < up.size(); ++n)
        res.xd.samples[n] = {i_out[n], q_out[n]};
    return res;
}

}  // namespace adtsim
