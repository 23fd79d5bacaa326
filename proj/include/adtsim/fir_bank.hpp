#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "adtsim/monomial.hpp"
#include "adtsim/signal.hpp"

namespace adtsim {

enum class FilterMode { periodic, streaming };

/// The identified baseband-equivalent model: one complex FIR per monomial,
/// summed, then downsampled by K (phase 0).
struct FirBankModel {
    MonomialBasis basis;
    Eigen::MatrixXcd taps;  ///< L_f x N, column k filters monomial stream k
    int downsample = 1;     ///< K
    FilterMode mode = FilterMode::periodic;

    Eigen::Index n_taps() const { return taps.rows(); }

    /// Flat text serialization; round-trips bit-identically.
    void save(std::ostream& os) const;
    void save_file(const std::string& path) const;
    static FirBankModel load(std::istream& is);
    static FirBankModel load_file(const std::string& path);
};

/// x_hat[n'] = sum_k sum_l taps(l, k) * v_k[n'K - l], circular in periodic mode,
/// zero history in streaming mode.
ComplexSignal model_forward(const ComplexSignal& xd, const FirBankModel& model);

/// Same, on precomputed monomial streams (one column per basis element).
ComplexSignal model_forward(const Eigen::MatrixXd& v, double xd_rate, const FirBankModel& model);

}  // namespace adtsim
