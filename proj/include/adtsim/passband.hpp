#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "adtsim/encoder.hpp"
#include "adtsim/signal.hpp"

namespace adtsim {

/// Continuous-time Volterra description of the switched-mode PA.
///
/// cubic_delay:    (Gx)(t) = x(t) - delta * x(t-tau1) x(t-tau2) x(t-tau3)
/// separable_quad: (Gx)(t) = x(t) - delta * (x * h1)(t) (x * h2)(t)
///                 with h1(t) = exp(-0.95 t), h2(t) = exp(-0.91 t) cos(pi t / 5)
///                 on t in [0, 4), all times in units of T
/// general:        (Gx)(t) = x(t) - delta * sum over a degree-d tabulated kernel
///
/// Memory may not exceed 4T (one sample period of x_d).
struct CtKernelSpec {
    enum class Kind { cubic_delay, separable_quad, general };

    Kind kind = Kind::cubic_delay;
    double delta = 0.0;

    // cubic_delay: delays in units of T
    std::array<double, 3> taus{0.0, 0.0, 0.0};

    // separable_quad: optional custom tabulations at step 1/R over [0, 4);
    // empty means "generate from the default analytic h1/h2".
    std::vector<double> h1, h2;

    // general: degree and flattened kernel table over [0, memory)^degree at step 1/R,
    // indexed [u1][u2]...[ud] with u_d fastest.
    int degree = 0;
    std::vector<double> table;
    double memory_t = 0.0;  ///< in units of T

    static CtKernelSpec cubic(double delta1, double t1, double t2, double t3);
    static CtKernelSpec separable(double delta2);
    static CtKernelSpec general_kernel(double delta, int degree, std::vector<double> table,
                                       double memory_t);

    void validate() const;
};

/// Default separable-kernel generators h1(t) = exp(-0.95 t) and
/// h2(t) = exp(-0.91 t) cos(pi t / 5), t in units of T.
double separable_h1(double t);
double separable_h2(double t);

/// Convert the kernel's delay/memory grid to fine samples for a given R.
/// Returns the number of delays that needed rounding (logged by callers).
int cubic_delays_on_grid(const CtKernelSpec& k, int fine_res, std::array<long, 3>& d);

/// Digital upconversion at 4 f_c: out[4n + s] = Re(x_d[n] * j^s),
/// i.e. the block (i_d[n], -q_d[n], -i_d[n], q_d[n]).
RealSignal upconvert_interleave(const ComplexSignal& xd);

/// Zero-order hold onto the fine grid: each sample repeated R times.
RealSignal zoh_to_fine(const RealSignal& xt, int fine_res);

/// Apply the CT nonlinearity on the periodic fine-grid record.
RealSignal apply_nonlinearity(const RealSignal& xc, const CtKernelSpec& k, const RateConfig& cfg);

struct ReferenceRun {
    ComplexSignal xd;    ///< encoder output (the model's input)
    ComplexSignal xhat;  ///< demodulated reference output at baseband
    std::size_t overload_count = 0;
    int rounded_delays = 0;  ///< kernel delays that were rounded to the fine grid
};

/// The full reference system S: encode, upconvert, ZOH, nonlinearity, ideal
/// bandpass + demodulation.
ReferenceRun simulate_reference(const ComplexSignal& x, const EncoderConfig& enc,
                                const CtKernelSpec& k, const RateConfig& cfg);

}  // namespace adtsim
