// Acceptance suite: one criterion per section, one PASS/FAIL line each, full
// scale. Returns the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "adtsim/dpd.hpp"
#include "adtsim/experiment.hpp"
#include "adtsim/fft.hpp"
#include "adtsim/identify.hpp"
#include "adtsim/passband.hpp"
#include "exact_model_oracle.hpp"

using namespace adtsim;

namespace {

int g_jobs = 2;

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t pos = 0; pos < idx.size(); ++pos) r[idx[pos]] = static_cast<double>(pos);
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

ExperimentConfig paper_scale_config(CtKernelSpec::Kind kind) {
    ExperimentConfig cfg;
    cfg.example_id = (kind == CtKernelSpec::Kind::cubic_delay) ? "example1" : "example2";
    cfg.kernel_kind = kind;
    cfg.osr = 4;
    cfg.fine_res = 10;  // paper delays 1.2T/2.3T/0.4T land exactly on this grid
    cfg.max_degree = 3;
    cfg.mem_i = cfg.mem_q = 4;
    cfg.taps_per_monomial = 16;
    cfg.ridge = 1e-10;
    cfg.n_train = 40960;
    cfg.n_val = 8192;
    cfg.seed_train = 101;
    cfg.seed_val = 202;
    cfg.deltas.clear();
    const double lo = 0.001;
    const double hi = (kind == CtKernelSpec::Kind::cubic_delay) ? 0.2 : 0.015;
    for (int i = 0; i < 8; ++i)
        cfg.deltas.push_back(std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / 7.0));
    return cfg;
}

bool sweep_criterion(const ExperimentConfig& cfg, std::ostream& log) {
    const auto rows = run_sweep(cfg, g_jobs);
    bool ok = true;
    std::vector<double> deltas, vals;
    for (const auto& r : rows) {
        log << "    delta=" << r.delta << "  train=" << r.train_nmse_db
            << " dB  val=" << r.val_nmse_db << " dB";
        if (!r.error.empty()) {
            log << "  ERROR: " << r.error;
            ok = false;
        } else {
            if (r.val_nmse_db > -20.0) ok = false;
            deltas.push_back(r.delta);
            vals.push_back(r.val_nmse_db);
        }
        log << "\n";
    }
    if (deltas.size() == rows.size() && rows.size() > 1) {
        const double rho = spearman(deltas, vals);
        log << "    spearman(delta, val_nmse) = " << rho << "\n";
        if (!(rho > 0.0)) ok = false;
    } else {
        ok = false;
    }
    return ok;
}

bool criterion1(std::ostream& log) {
    return sweep_criterion(paper_scale_config(CtKernelSpec::Kind::cubic_delay), log);
}

bool criterion2(std::ostream& log) {
    return sweep_criterion(paper_scale_config(CtKernelSpec::Kind::separable_quad), log);
}

bool criterion3(std::ostream& log) {
    RateConfig rates{1024, 4, 10};
    EncoderConfig enc;
    enc.kind = EncoderKind::dsm1;
    enc.oversample = rates.osr;
    const auto kernel = CtKernelSpec::cubic(0.1, 1.2, 2.3, 0.4);
    const auto basis = enumerate_monomials(3, 4, 4);

    const auto train = simulate_reference(gen_stimulus(rates.n_bb, 7, 0.9), enc, kernel, rates);
    FitConfig fc;
    fc.taps_per_monomial = static_cast<Eigen::Index>(rates.n_d());
    fc.ridge = 0.0;
    const auto fit = fit_model(train.xd, train.xhat, basis, rates.osr, fc);
    log << "    full-length fit residual: " << fit.report.train_nmse_db << " dB (unknowns "
        << fit.report.unknowns << ", rank_deficient=" << fit.report.rank_deficient << ")\n";
    bool ok = fit.report.train_nmse_db <= -100.0;

    // Fresh-seed validation of the exact representation (constructed in closed
    // form, independently of the fit): this is the oracle for the main result.
    const auto val = simulate_reference(gen_stimulus(rates.n_bb, 8, 0.9), enc, kernel, rates);
    const auto oracle = testing::exact_equivalent_model(kernel, rates, basis);
    const double oracle_val = validate(oracle, val.xd, val.xhat);
    log << "    exact-model validation on fresh seed: " << oracle_val << " dB\n";
    if (oracle_val > -100.0) ok = false;

    // The single-record fitted taps are one of many zero-residual solutions and
    // are not identified by 1024 equations; reported for transparency.
    log << "    (single-record fitted taps on fresh seed: " << validate(fit.model, val.xd, val.xhat)
        << " dB, not gated)\n";
    return ok;
}

bool criterion4(std::ostream& log) {
    ExperimentConfig cfg;
    cfg.osr = 4;
    cfg.fine_res = 10;
    cfg.max_degree = 1;
    cfg.mem_i = cfg.mem_q = 4;
    cfg.n_train = 16384;
    cfg.n_val = 8192;
    cfg.seed_train = 301;
    cfg.seed_val = 302;
    const auto enc = cfg.encoder_config();
    const auto kernel = cfg.kernel_for(0.0);
    const auto basis = enumerate_monomials(cfg.max_degree, cfg.mem_i, cfg.mem_q);
    const auto train = simulate_reference(gen_stimulus(cfg.n_train, cfg.seed_train, cfg.peak),
                                          enc, kernel, cfg.rates_for(cfg.n_train));
    const auto val = simulate_reference(gen_stimulus(cfg.n_val, cfg.seed_val, cfg.peak), enc,
                                        kernel, cfg.rates_for(cfg.n_val));
    bool ok = true;
    double prev = 1e300, last = 0.0;
    for (const Eigen::Index lf : {16, 32, 64, 128}) {
        FitConfig fc;
        fc.taps_per_monomial = lf;
        fc.ridge = 1e-10;
        const auto fit = fit_model(train.xd, train.xhat, basis, cfg.osr, fc);
        last = validate(fit.model, val.xd, val.xhat);
        log << "    L_f=" << lf << "  val=" << last << " dB\n";
        if (!(last < prev)) ok = false;
        prev = last;
    }
    if (last > -30.0) ok = false;
    return ok;
}

bool criterion5(std::ostream& log) {
    const auto basis = enumerate_monomials(2, 2, 2);
    const int K = 2;
    const Eigen::Index lf = 8;
    FirBankModel truth;
    truth.basis = basis;
    truth.downsample = K;
    truth.taps.resize(lf, static_cast<Eigen::Index>(basis.size()));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < truth.taps.rows(); ++i)
        for (Eigen::Index j = 0; j < truth.taps.cols(); ++j)
            truth.taps(i, j) = cplx{dist(rng), dist(rng)};
    auto xd = gen_stimulus(4096, 501, 0.9);
    xd.rate = K;
    const auto xhat = model_forward(xd, truth);

    FitConfig fc;
    fc.taps_per_monomial = lf;
    fc.ridge = 0.0;
    const auto chol = fit_model(xd, xhat, basis, K, fc);
    fc.solver = Solver::qr;
    const auto qr = fit_model(xd, xhat, basis, K, fc);

    const double rel = (chol.model.taps - truth.taps).norm() / truth.taps.norm();
    const double agree = (chol.model.taps - qr.model.taps).norm() / qr.model.taps.norm();
    log << "    tap relative error: " << rel << ", solver agreement: " << agree
        << " (cond " << chol.report.condition_estimate << ")\n";
    return rel <= 1e-8 && agree <= 1e-6;
}

bool criterion6(std::ostream& log) {
    bool ok = true;

    // exact output alphabet
    RateConfig rates{4096, 4, 1};
    EncoderConfig enc;
    enc.kind = EncoderKind::dsm1;
    enc.oversample = rates.osr;
    const auto run = encode(gen_stimulus(rates.n_bb, 601, 0.9), enc, rates);
    for (const auto& s : run.xd.samples) {
        const bool ri = std::count(enc.levels.begin(), enc.levels.end(), s.real()) == 1;
        const bool qi = std::count(enc.levels.begin(), enc.levels.end(), s.imag()) == 1;
        if (!ri || !qi) {
            ok = false;
            break;
        }
    }
    log << "    alphabet exact: " << (ok ? "yes" : "NO") << "\n";

    // dc tracking
    RateConfig r1{10000, 1, 1};
    EncoderConfig e1 = enc;
    e1.oversample = 1;
    for (const double c : {0.3, -0.77}) {
        ComplexSignal x;
        x.rate = 1.0;
        x.samples.assign(10000, cplx{c, 0.0});
        const auto er = encode(x, e1, r1);
        double acc = 0.0;
        for (const auto& s : er.xd.samples) acc += s.real();
        const double drift = std::abs(acc / 1e4 - c);
        log << "    dc tracking c=" << c << ": |mean-c|=" << drift << "\n";
        if (drift >= 1e-3) ok = false;
    }

    // first-order shaping: lowest decade of [0, f_d/2] below the highest decade
    RateConfig r8{4096, 8, 1};
    EncoderConfig e8 = enc;
    e8.oversample = 8;
    const auto x8 = gen_stimulus(r8.n_bb, 602, 0.9);
    const auto enc8 = encode(x8, e8, r8);
    const auto up8 = upsample_ideal(x8, 8);
    std::vector<cplx> err(up8.size());
    for (std::size_t n = 0; n < err.size(); ++n) err[n] = enc8.xd.samples[n] - up8.samples[n];
    const auto spec = fft::forward(err);
    const std::size_t half = err.size() / 2;
    auto band_power = [&](double lo, double hi) {
        double p = 0.0;
        for (std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(lo * half));
             k < static_cast<std::size_t>(hi * half); ++k)
            p += std::norm(spec[k]) + std::norm(spec[err.size() - k]);
        return p;
    };
    const double low = band_power(0.01, 0.1);
    const double high = band_power(0.1, 1.0);
    log << "    shaped noise decades: low=" << low << " high=" << high << "\n";
    if (!(low < high)) ok = false;
    return ok;
}

bool criterion7(std::ostream& log) {
    bool ok = true;

    // (a) X = 0 is the exact identity.
    {
        RateConfig rates{512, 4, 1};
        Compensator comp;
        comp.basis = enumerate_monomials(3, 2, 2);
        comp.downsample = rates.osr;
        comp.encoder.kind = EncoderKind::dsm1;
        comp.encoder.oversample = rates.osr;
        comp.rates = rates;
        comp.prototypes = Eigen::MatrixXcd::Zero(8, static_cast<Eigen::Index>(comp.basis.size()));
        comp.coeff = Eigen::MatrixXcd::Zero(comp.prototypes.cols(),
                                            static_cast<Eigen::Index>(comp.basis.size()));
        const auto x = gen_stimulus(rates.n_bb, 701, 0.9);
        const auto cx = apply_compensator(x, comp);
        bool identical = cx.clipped == 0;
        for (std::size_t n = 0; n < x.size() && identical; ++n)
            identical = (cx.x.samples[n] == x.samples[n]);
        log << "    X=0 identity: " << (identical ? "exact" : "VIOLATED") << "\n";
        if (!identical) ok = false;
    }

    // (b,c) improvement collapses as delta -> 0 and clears 6 dB at delta1 = 0.05.
    // R = 1 realizes the ideal chain exactly (delays round to whole T with a
    // recorded warning); the oversampled DSM sets the delta-independent floor.
    RateConfig rates{4096, 32, 1};
    EncoderConfig enc;
    enc.kind = EncoderKind::dsm1;
    enc.oversample = rates.osr;
    const auto basis = enumerate_monomials(3, 2, 2);
    const auto x_fit = gen_stimulus(rates.n_bb, 702, 0.9);
    const auto x_eval = gen_stimulus(rates.n_bb, 703, 0.9);
    auto improvement_at = [&](double delta) {
        const auto kernel = CtKernelSpec::cubic(delta, 1.2, 2.3, 0.4);
        ChainFn chain = [&](const ComplexSignal& in) {
            RateConfig r = rates;
            r.n_bb = in.size();
            return simulate_reference(in, enc, kernel, r).xhat;
        };
        DpdFitConfig dc;
        dc.taps_per_monomial = 16;
        const auto comp = fit_compensator(x_fit, chain, basis, dc, enc, rates);
        const auto ev = eval_compensated(x_eval, comp, chain);
        log << "    delta=" << delta << "  plain=" << ev.nmse_plain_db
            << " dB  dpd=" << ev.nmse_dpd_db
            << " dB  improvement=" << (ev.nmse_plain_db - ev.nmse_dpd_db) << " dB\n";
        return ev.nmse_plain_db - ev.nmse_dpd_db;
    };
    const double small_improvement = improvement_at(1e-4);
    if (!(std::abs(small_improvement) <= 1.0)) ok = false;
    const double big_improvement = improvement_at(0.05);
    if (!(big_improvement >= 6.0)) ok = false;
    return ok;
}

bool criterion8(std::ostream& log) {
    bool ok = true;

    // Eq. (1) constant input closed form.
    {
        RateConfig cfg{4, 1, 10};
        RealSignal x;
        x.rate = cfg.f_fine();
        x.samples.assign(cfg.n_fine(), 0.5);
        const auto y = apply_nonlinearity(x, CtKernelSpec::cubic(0.1, 1.2, 2.3, 0.4), cfg);
        double worst = 0.0;
        for (double v : y.samples) worst = std::max(worst, std::abs(v - 0.4875));
        log << "    cubic constant-input error: " << worst << "\n";
        if (worst > 1e-14) ok = false;
    }

    // Eq. (2) constant input against the quadrature oracle.
    {
        const int R = 40;
        RateConfig cfg{4, 1, R};
        const double c = 0.31, delta = 0.02;
        RealSignal x;
        x.rate = cfg.f_fine();
        x.samples.assign(cfg.n_fine(), c);
        const auto y = apply_nonlinearity(x, CtKernelSpec::separable(delta), cfg);
        const double i1 = (1.0 - std::exp(-0.95 * 4.0)) / 0.95;
        const double a = -0.91, b = std::numbers::pi / 5.0;
        auto f2 = [&](double t) {
            return std::exp(a * t) * (a * std::cos(b * t) + b * std::sin(b * t)) / (a * a + b * b);
        };
        const double expect = c - delta * c * c * i1 * (f2(4.0) - f2(0.0));
        const double err = std::abs(y.samples[0] - expect) / std::abs(expect);
        log << "    separable constant-input relative error: " << err
            << " (Riemann order 1/R, R=" << R << ")\n";
        if (err > 5.0 / R) ok = false;
    }

    // Demodulator tone contract, exact to 1e-12.
    {
        RateConfig cfg{64, 4, 5};
        const double kc = static_cast<double>(cfg.carrier_bin());
        const double f0 = 0.125, amp = 0.7, phi = 0.3;
        RealSignal tone;
        tone.rate = cfg.f_fine();
        tone.samples.resize(cfg.n_fine());
        for (std::size_t m = 0; m < tone.samples.size(); ++m)
            tone.samples[m] =
                amp * std::cos(2.0 * std::numbers::pi * (kc + f0 * cfg.n_bb) *
                                   static_cast<double>(m) / static_cast<double>(cfg.n_fine()) +
                               phi);
        const auto xhat = band_extract_demod(tone, cfg);
        double worst = 0.0;
        for (std::size_t n = 0; n < xhat.size(); ++n) {
            const double ph = 2.0 * std::numbers::pi * f0 * static_cast<double>(n) + phi;
            worst = std::max(worst,
                             std::abs(xhat.samples[n] - amp * cplx{std::cos(ph), std::sin(ph)}));
        }
        log << "    demod tone contract worst error: " << worst << "\n";
        if (worst > 1e-12) ok = false;
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) g_jobs = std::atoi(argv[++i]);
    }

    struct Entry {
        int id;
        const char* name;
        std::function<bool(std::ostream&)> run;
    };
    const std::vector<Entry> criteria = {
        {1, "example-1 reproduction (cubic kernel sweep)", criterion1},
        {2, "example-2 reproduction (separable kernel sweep)", criterion2},
        {3, "structural exactness (full-length taps)", criterion3},
        {4, "linear-chain FIR convergence", criterion4},
        {5, "identification round trip and solver agreement", criterion5},
        {6, "encoder properties", criterion6},
        {7, "DPD property suite", criterion7},
        {8, "analytic spot checks", criterion8},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        std::ostringstream log;
        bool ok = false;
        try {
            ok = c.run(log);
        } catch (const std::exception& e) {
            log << "    exception: " << e.what() << "\n";
        }
        std::cout << (ok ? "PASS" : "FAIL") << " criterion-" << c.id << ": " << c.name << "\n"
                  << log.str();
        std::cout.flush();
        if (!ok) ++failures;
    }
    if (failures) std::cout << failures << " criterion(s) failed\n";
    return failures;
}
