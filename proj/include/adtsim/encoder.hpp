#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adtsim/signal.hpp"

namespace adtsim {

enum class EncoderKind { dsm1, quantizer, passthrough };
enum class InterpKind { ideal, hold };

/// Pulse encoder configuration. The encoder owns the xK upsampling from baseband
/// to the encoder rate and processes in-phase and quadrature independently.
struct EncoderConfig {
    EncoderKind kind = EncoderKind::dsm1;
    std::vector<double> levels = {-1.0, -0.5, 0.0, 0.5, 1.0};
    int oversample = 1;  ///< must equal RateConfig::osr
    InterpKind interpolation = InterpKind::ideal;

    void validate() const;
};

/// Nearest output level; exact midpoints resolve to the larger level.
double quantize_nearest(double u, std::span<const double> levels);

struct EncodeResult {
    ComplexSignal xd;              ///< encoded signal at rate f_d
    std::size_t overload_count = 0;  ///< samples driven past the outermost level gap
};

/// Pulse encoder P: upsample i and q by K, then run the configured encoder per
/// component, causally from zero state. Every emitted component value is an
/// element of cfg.levels (except for the passthrough encoder).
EncodeResult encode(const ComplexSignal& x, const EncoderConfig& cfg, const RateConfig& rates);

}  // namespace adtsim
