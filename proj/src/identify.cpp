#include "adtsim/identify.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

#include "adtsim/fft.hpp"

namespace adtsim {

namespace {

// Like nmse_db but tolerant of an identically-zero target (legal fit input).
double train_nmse(const ComplexSignal& target, const ComplexSignal& pred) {
    double err = 0.0, sig = 0.0;
    for (std::size_t n = 0; n < target.size(); ++n) {
        err += std::norm(pred.samples[n] - target.samples[n]);
        sig += std::norm(target.samples[n]);
    }
    if (err == 0.0) return kNmseFloorDb;
    if (sig == 0.0) return std::numeric_limits<double>::infinity();
    return std::max(kNmseFloorDb, 10.0 * std::log10(err / sig));
}

// Regressor block rows [n0, n0+rows): A(r, k*L_f + l) = v_k[((n0+r)K - l) mod n_d].
void fill_block(const Eigen::MatrixXd& v, Eigen::Index n0, Eigen::Index rows, int K,
                Eigen::Index lf, Eigen::MatrixXd& block) {
    const Eigen::Index n_d = v.rows();
    const Eigen::Index N = v.cols();
    block.resize(rows, N * lf);
    for (Eigen::Index k = 0; k < N; ++k) {
        const double* col = v.col(k).data();
        for (Eigen::Index l = 0; l < lf; ++l) {
            double* dst = block.col(k * lf + l).data();
            Eigen::Index idx = ((n0 * K - l) % n_d + n_d) % n_d;
            for (Eigen::Index r = 0; r < rows; ++r) {
                dst[r] = col[idx];
                idx += K;
                if (idx >= n_d) idx -= n_d;
            }
        }
    }
}

FirBankModel make_model(const MonomialBasis& basis, int K, Eigen::Index lf) {
    FirBankModel m;
    m.basis = basis;
    m.downsample = K;
    m.mode = FilterMode::periodic;
    m.taps = Eigen::MatrixXcd::Zero(lf, static_cast<Eigen::Index>(basis.size()));
    return m;
}

void unpack_taps(const Eigen::VectorXd& t_re, const Eigen::VectorXd& t_im, Eigen::Index lf,
                 FirBankModel& model) {
    const Eigen::Index N = model.taps.cols();
    for (Eigen::Index k = 0; k < N; ++k)
        for (Eigen::Index l = 0; l < lf; ++l)
            model.taps(l, k) = {t_re[k * lf + l], t_im[k * lf + l]};
}

// Exact solve for L_f == n_d. Per baseband DFT bin the model output is
// sum_{k,p} H_k^{(p)}[b] * S_{k,p}[b] where S_{k,p} is the spectrum of the
// phase-p downsampled monomial stream, so the LS problem decouples into one
// underdetermined equation per bin; the minimum-norm solution is taken.
FitResult fit_full_length(const Eigen::MatrixXd& v, const ComplexSignal& xd,
                          const ComplexSignal& xhat, const MonomialBasis& basis, int K) {
    const Eigen::Index n_d = v.rows();
    const Eigen::Index N = v.cols();
    const Eigen::Index n_bb = static_cast<Eigen::Index>(xhat.size());

    const auto target = fft::forward(xhat.samples);

    // Spectra of all N*K polyphase streams.
    std::vector<std::vector<cplx>> spectra(static_cast<std::size_t>(N * K));
    {
        std::vector<cplx> s(static_cast<std::size_t>(n_bb));
        for (Eigen::Index k = 0; k < N; ++k) {
            const double* col = v.col(k).data();
            for (int p = 0; p < K; ++p) {
                for (Eigen::Index np = 0; np < n_bb; ++np) {
                    const Eigen::Index idx = ((np * K - p) % n_d + n_d) % n_d;
                    s[static_cast<std::size_t>(np)] = cplx{col[idx], 0.0};
                }
                spectra[static_cast<std::size_t>(k * K + p)] = fft::forward(s);
            }
        }
    }

    // Per-bin minimum-norm solve, collected as H_k^{(p)} spectra.
    std::vector<std::vector<cplx>> h_spec(static_cast<std::size_t>(N * K),
                                          std::vector<cplx>(static_cast<std::size_t>(n_bb)));
    double gram_min = std::numeric_limits<double>::infinity(), gram_max = 0.0;
    for (Eigen::Index b = 0; b < n_bb; ++b) {
        double g2 = 0.0;
        for (const auto& s : spectra) g2 += std::norm(s[static_cast<std::size_t>(b)]);
        if (g2 > 0.0) {
            gram_min = std::min(gram_min, g2);
            gram_max = std::max(gram_max, g2);
            const cplx w = target[static_cast<std::size_t>(b)] / g2;
            for (std::size_t j = 0; j < spectra.size(); ++j)
                h_spec[j][static_cast<std::size_t>(b)] =
                    std::conj(spectra[j][static_cast<std::size_t>(b)]) * w;
        }
    }

    FitResult res;
    res.model = make_model(basis, K, n_d);
    for (Eigen::Index k = 0; k < N; ++k) {
        for (int p = 0; p < K; ++p) {
            const auto h = fft::inverse(h_spec[static_cast<std::size_t>(k * K + p)]);
            for (Eigen::Index r = 0; r < n_bb; ++r)
                res.model.taps(r * K + p, k) = h[static_cast<std::size_t>(r)];
        }
    }

    res.report.unknowns = static_cast<std::size_t>(N * n_d);
    res.report.rank_deficient = true;  // vastly underdetermined by construction
    res.report.condition_estimate =
        (gram_min > 0.0 && std::isfinite(gram_min)) ? std::sqrt(gram_max / gram_min) : 0.0;
    res.report.train_nmse_db = train_nmse(xhat, model_forward(v, xd.rate, res.model));
    return res;
}

}  // namespace

FitResult fit_model(const ComplexSignal& xd, const ComplexSignal& xhat,
                    const MonomialBasis& basis, int downsample, const FitConfig& cfg) {
    if (downsample < 1) throw std::invalid_argument("fit_model: downsample factor must be >= 1");
    if (xd.size() != xhat.size() * static_cast<std::size_t>(downsample))
        throw std::invalid_argument("fit_model: need n_d == n_bb * K");
    if (cfg.ridge < 0.0) throw std::invalid_argument("fit_model: ridge must be >= 0");
    const Eigen::Index lf = cfg.taps_per_monomial;
    const Eigen::Index n_d = static_cast<Eigen::Index>(xd.size());
    if (lf < 1 || lf > n_d)
        throw std::invalid_argument("fit_model: taps_per_monomial must be in [1, n_d]");

    const Eigen::MatrixXd v = eval_monomials(xd, basis);
    if (lf == n_d) return fit_full_length(v, xd, xhat, basis, downsample);

    const Eigen::Index n_bb = static_cast<Eigen::Index>(xhat.size());
    const Eigen::Index N = v.cols();
    const Eigen::Index p = N * lf;

    Eigen::VectorXd y_re(n_bb), y_im(n_bb);
    for (Eigen::Index n = 0; n < n_bb; ++n) {
        y_re[n] = xhat.samples[static_cast<std::size_t>(n)].real();
        y_im[n] = xhat.samples[static_cast<std::size_t>(n)].imag();
    }

    FitResult res;
    res.model = make_model(basis, downsample, lf);
    res.report.unknowns = static_cast<std::size_t>(p);

    if (cfg.solver == Solver::qr) {
        // Explicit design matrix; intended for desk-scale cross-checks.
        if (static_cast<double>(n_bb + p) * static_cast<double>(p) > 2.5e8)
            throw std::invalid_argument("fit_model: problem too large for the qr solver");
        const Eigen::Index rows = (cfg.ridge > 0.0) ? n_bb + p : n_bb;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, p);
        {
            Eigen::MatrixXd block;
            fill_block(v, 0, n_bb, downsample, lf, block);
            a.topRows(n_bb) = block;
        }
        Eigen::VectorXd rhs_re = Eigen::VectorXd::Zero(rows), rhs_im = Eigen::VectorXd::Zero(rows);
        rhs_re.head(n_bb) = y_re;
        rhs_im.head(n_bb) = y_im;
        if (cfg.ridge > 0.0) {
            const double diag_mean = a.topRows(n_bb).colwise().squaredNorm().mean();
            a.bottomRows(p).diagonal().setConstant(std::sqrt(cfg.ridge * diag_mean));
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        res.report.rank_deficient = qr.rank() < p;
        const auto& rdiag = qr.matrixR().diagonal();
        double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < std::min<Eigen::Index>(qr.rank(), rdiag.size()); ++i) {
            rmax = std::max(rmax, std::abs(rdiag[i]));
            rmin = std::min(rmin, std::abs(rdiag[i]));
        }
        res.report.condition_estimate = (rmin > 0.0) ? rmax / rmin : 0.0;
        unpack_taps(qr.solve(rhs_re), qr.solve(rhs_im), lf, res.model);
    } else {
        // Blocked accumulation of the Gram and both right-hand sides.
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
        Eigen::VectorXd b_re = Eigen::VectorXd::Zero(p), b_im = Eigen::VectorXd::Zero(p);
        const Eigen::Index block_rows = std::max<Eigen::Index>(
            Eigen::Index{1}, std::min<Eigen::Index>(n_bb, Eigen::Index{1} << 12));
        Eigen::MatrixXd block;
        for (Eigen::Index n0 = 0; n0 < n_bb; n0 += block_rows) {
            const Eigen::Index rows = std::min(block_rows, n_bb - n0);
            fill_block(v, n0, rows, downsample, lf, block);
            gram.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
            b_re.noalias() += block.transpose() * y_re.segment(n0, rows);
            b_im.noalias() += block.transpose() * y_im.segment(n0, rows);
        }
        gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

        const double diag_mean = gram.diagonal().mean();
        if (cfg.ridge > 0.0 && diag_mean > 0.0)
            gram.diagonal().array() += cfg.ridge * diag_mean;

        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        bool ok = (llt.info() == Eigen::Success);
        double rcond = 0.0;
        if (ok) {
            rcond = llt.rcond();
            if (cfg.ridge == 0.0 && rcond < 1e-14) ok = false;
        }
        if (ok) {
            res.report.condition_estimate = (rcond > 0.0) ? 1.0 / rcond : 0.0;
            unpack_taps(llt.solve(b_re), llt.solve(b_im), lf, res.model);
        } else {
            // Singular normal equations with lambda = 0: minimum-norm solution via
            // an eigendecomposition pseudo-inverse of the Gram.
            res.report.rank_deficient = true;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
            const auto& ev = eig.eigenvalues();
            const double cutoff = ev[p - 1] * static_cast<double>(p) * 1e-15;
            Eigen::VectorXd inv = Eigen::VectorXd::Zero(p);
            double ev_min = 0.0;
            for (Eigen::Index i = 0; i < p; ++i)
                if (ev[i] > cutoff) {
                    inv[i] = 1.0 / ev[i];
                    if (ev_min == 0.0) ev_min = ev[i];
                }
            res.report.condition_estimate = (ev_min > 0.0) ? std::sqrt(ev[p - 1] / ev_min) : 0.0;
            const auto pinv_apply = [&](const Eigen::VectorXd& b) {
                return (eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * b)
                    .eval();
            };
            unpack_taps(pinv_apply(b_re), pinv_apply(b_im), lf, res.model);
        }
    }

    res.report.train_nmse_db = train_nmse(xhat, model_forward(v, xd.rate, res.model));
    return res;
}

double validate(const FirBankModel& model, const ComplexSignal& xd_val,
                const ComplexSignal& xhat_val) {
    if (xd_val.size() != xhat_val.size() * static_cast<std::size_t>(model.downsample))
        throw std::invalid_argument("validate: need n_d == n_bb * K");
    if (xd_val.rate != xhat_val.rate * model.downsample)
        throw std::invalid_argument("validate: rate lattice mismatch");
    return nmse_db(xhat_val, model_forward(xd_val, model));
}

}  // namespace adtsim
