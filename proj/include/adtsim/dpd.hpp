#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>

#include "adtsim/encoder.hpp"
#include "adtsim/fir_bank.hpp"
#include "adtsim/identify.hpp"
#include "adtsim/monomial.hpp"
#include "adtsim/signal.hpp"

namespace adtsim {

/// Closure over the reference chain: x -> x_hat.
using ChainFn = std::function<ComplexSignal(const ComplexSignal&)>;

enum class PrototypeKind {
    forward_model,  ///< L0 = per-monomial FIRs of a forward model fitted on the same chain
    lowpass         ///< L0 = one long windowed-sinc low-pass prototype
};

struct DpdFitConfig {
    PrototypeKind prototypes = PrototypeKind::forward_model;
    Eigen::Index taps_per_monomial = 16;  ///< prototype FIR length
    double ridge = 1e-10;                 ///< relative ridge for both LS problems
    long max_delay = 4;                   ///< alignment search window at baseband
};

/// Predistorter C = I - K L0 X V P: the correction is the encoded input run
/// through the monomial generator, recombined by the coefficient matrix X into
/// the fixed prototype filters, summed and downsampled back to baseband.
/// X = 0 makes C the exact identity.
struct Compensator {
    MonomialBasis basis;
    Eigen::MatrixXcd prototypes;  ///< L_f x P, one column per fixed filter
    Eigen::MatrixXcd coeff;       ///< X, P x N (rows: prototype inputs, cols: monomials)
    int downsample = 1;
    EncoderConfig encoder;
    RateConfig rates;  ///< n_bb field is adapted to the record being compensated
    long align_delay = 0;
    cplx align_gain{1.0, 0.0};

    /// Per-monomial effective FIRs, prototypes * X (L_f x N).
    Eigen::MatrixXcd effective_taps() const { return prototypes * coeff; }

    void save(std::ostream& os) const;
    void save_file(const std::string& path) const;
    static Compensator load(std::istream& is);
    static Compensator load_file(const std::string& path);
};

/// Fits X by least squares so the correction reproduces the aligned first-order
/// residual Delta x = aligned(chain(x)) - x. Throws when the chain is not a
/// perturbation of identity (alignment gain near zero).
Compensator fit_compensator(const ComplexSignal& x, const ChainFn& chain,
                            const MonomialBasis& basis, const DpdFitConfig& cfg,
                            const EncoderConfig& enc, const RateConfig& rates);

struct CompensatedSignal {
    ComplexSignal x;
    std::size_t clipped = 0;  ///< components limited to full scale
};

/// C(x) = x - correction, components clamped to [-1, 1]; clamp events counted.
CompensatedSignal apply_compensator(const ComplexSignal& x, const Compensator& comp,
                                    FilterMode mode = FilterMode::periodic);

struct DpdEval {
    double nmse_plain_db = 0.0;
    double nmse_dpd_db = 0.0;
    std::size_t clipped = 0;
};

/// Closed-loop comparison on a fresh stimulus, both outputs aligned with the
/// compensator's stored gain/delay convention.
DpdEval eval_compensated(const ComplexSignal& x, const Compensator& comp, const ChainFn& chain);

}  // namespace adtsim
