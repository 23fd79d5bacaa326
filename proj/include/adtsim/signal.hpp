#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace adtsim {

using cplx = std::complex<double>;

/// NMSE of a perfect reconstruction is reported as this sentinel instead of -inf.
inline constexpr double kNmseFloorDb = -400.0;

/// A finite record of complex samples at a fixed sampling rate (baseband rate = 1).
struct ComplexSignal {
    std::vector<cplx> samples;
    double rate = 1.0;

    std::size_t size() const { return samples.size(); }
};

/// Real-valued counterpart used on the RF-rate and fine ("continuous-time") grids.
struct RealSignal {
    std::vector<double> samples;
    double rate = 1.0;

    std::size_t size() const { return samples.size(); }
};

/// The rate lattice of one simulation:
///   f_bb = 1, f_d = K (encoder output), f_r = 4K (digitally upconverted, = 4 f_c),
///   f_fine = 4KR (the discretized continuous-time grid), T = 1/f_r.
/// All record lengths are tied to n_bb so that every stage is an exact integer
/// resampling and the carrier lands on an integer DFT bin of the fine grid.
struct RateConfig {
    std::size_t n_bb = 0;  ///< record length at baseband
    int osr = 1;           ///< K, encoder oversampling ratio
    int fine_res = 1;      ///< R, fine-grid subdivisions per RF-rate sample T

    double f_bb() const { return 1.0; }
    double f_d() const { return static_cast<double>(osr); }
    double f_r() const { return 4.0 * osr; }
    double f_fine() const { return 4.0 * osr * fine_res; }
    double carrier_freq() const { return f_d(); }

    std::size_t n_d() const { return n_bb * static_cast<std::size_t>(osr); }
    std::size_t n_r() const { return 4 * n_d(); }
    std::size_t n_fine() const { return n_r() * static_cast<std::size_t>(fine_res); }
    /// DFT bin index of the carrier at the fine rate; integral by construction.
    std::size_t carrier_bin() const { return n_d(); }

    /// Throws std::invalid_argument when the lattice is malformed.
    void validate() const;
};

/// Gain/delay estimate that maps a measured record back onto its reference.
struct AlignmentResult {
    long delay = 0;        ///< integer delay in samples at the common rate
    cplx gain{1.0, 0.0};   ///< complex gain of the measurement relative to the reference
    ComplexSignal aligned; ///< gain- and delay-corrected measurement
};

/// Deterministic circular-Gaussian stimulus, scaled so that
/// max_n max(|i[n]|, |q[n]|) == peak. Same (n_bb, seed, peak) -> identical samples.
ComplexSignal gen_stimulus(std::size_t n_bb, std::uint64_t seed, double peak);

/// Sample-and-hold upsampling: out[n] = in[n / factor].
ComplexSignal upsample_hold(const ComplexSignal& x, int factor);
RealSignal upsample_hold(const RealSignal& x, int factor);

/// Periodic brick-wall interpolation: zero-stuff then keep exactly the original
/// band, with the Nyquist bin (even lengths) split symmetrically so real records
/// stay real. In-band complex tones pass with unit amplitude.
ComplexSignal upsample_ideal(const ComplexSignal& x, int factor);

/// out[n] = in[n * factor + phase]; factor must divide the length.
ComplexSignal downsample(const ComplexSignal& x, int factor, int phase = 0);

/// Ideal bandpass + demodulator (blocks F and D): full-record DFT, select bins in
/// [f_c - f_bb/2, f_c + f_bb/2), scale by 2 and re-index as an n_bb-point baseband
/// spectrum. A tone A*cos(2*pi*(f_c+f0)*t + phi), |f0| < 1/2, maps exactly to
/// A*exp(j*(2*pi*f0*n + phi)).
ComplexSignal band_extract_demod(const RealSignal& xc, const RateConfig& cfg);

/// 10*log10(sum|est-ref|^2 / sum|ref|^2), floored at kNmseFloorDb.
double nmse_db(const ComplexSignal& ref, const ComplexSignal& est);

/// Finds the integer circular delay |d| <= max_delay maximizing |<meas, shift(ref, d)>|
/// (ties: smaller |d|, then negative d), the complex gain on the winning lag, and
/// returns the gain/delay-corrected measurement.
AlignmentResult align_gain_delay(const ComplexSignal& ref, const ComplexSignal& meas, long max_delay);

}  // namespace adtsim
