#pragma once

#include <cstddef>

#include "adtsim/fir_bank.hpp"
#include "adtsim/monomial.hpp"
#include "adtsim/signal.hpp"

namespace adtsim {

enum class Solver { normal_cholesky, qr };

struct FitConfig {
    Eigen::Index taps_per_monomial = 16;  ///< L_f; equal to n_d selects the exact full-length path
    double ridge = 1e-10;                 ///< lambda, relative to mean(diag(Gram))
    Solver solver = Solver::normal_cholesky;
};

struct FitReport {
    double train_nmse_db = 0.0;
    double val_nmse_db = std::numeric_limits<double>::quiet_NaN();  ///< filled by the caller
    double condition_estimate = 0.0;
    std::size_t unknowns = 0;
    bool rank_deficient = false;
};

struct FitResult {
    FirBankModel model;
    FitReport report;
};

/// Least-squares fit of the FIR bank against (x_d, x_hat) in periodic mode:
/// minimize sum_n |x_hat[n] - model(x_d)[n]|^2 + ridge' * |taps|^2 over complex
/// taps, solved as two real problems (real/imag targets) sharing one factorization.
/// L_f == n_d dispatches to an exact per-frequency-bin minimum-norm solve (the
/// time-domain problem is underdetermined there and the Gram is not formable).
FitResult fit_model(const ComplexSignal& xd, const ComplexSignal& xhat,
                    const MonomialBasis& basis, int downsample, const FitConfig& cfg);

/// NMSE of the model prediction on a held-out record.
double validate(const FirBankModel& model, const ComplexSignal& xd_val,
                const ComplexSignal& xhat_val);

}  // namespace adtsim
