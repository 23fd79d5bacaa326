#include "adtsim/dpd.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace adtsim {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Eigen::MatrixXcd lowpass_prototype(Eigen::Index length, int K) {
    // Windowed sinc covering the baseband band |f| <= f_bb/2 at rate f_d.
    Eigen::MatrixXcd h(length, 1);
    const double nu = 0.5 / K;
    const double c = 0.5 * static_cast<double>(length - 1);
    for (Eigen::Index l = 0; l < length; ++l) {
        const double t = static_cast<double>(l) - c;
        const double s = (t == 0.0) ? 1.0 : std::sin(2.0 * std::numbers::pi * nu * t) /
                                                (2.0 * std::numbers::pi * nu * t);
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (l + 1) /
                                              static_cast<double>(length + 1));
        h(l, 0) = 2.0 * nu * s * w;
    }
    return h;
}

// Correction regressor for prototype j and monomial k: the prototype filter run
// over the monomial stream, downsampled to baseband (phase 0, circular).
void correction_column(const Eigen::VectorXd& stream, const Eigen::VectorXcd& proto, int K,
                       Eigen::VectorXcd& out) {
    const Eigen::Index n_d = stream.size();
    const Eigen::Index lf = proto.size();
    const Eigen::Index n_bb = n_d / K;
    out.resize(n_bb);
    for (Eigen::Index np = 0; np < n_bb; ++np) {
        cplx acc{0.0, 0.0};
        Eigen::Index idx = np * K;
        for (Eigen::Index l = 0; l < lf; ++l) {
            acc += proto[l] * stream[idx];
            idx = (idx == 0) ? n_d - 1 : idx - 1;
        }
        out[np] = acc;
    }
}

ComplexSignal aligned_by(const ComplexSignal& y, long delay, cplx gain) {
    const long n = static_cast<long>(y.size());
    ComplexSignal out;
    out.rate = y.rate;
    out.samples.resize(y.size());
    for (long i = 0; i < n; ++i) {
        const long j = ((i + delay) % n + n) % n;
        out.samples[static_cast<std::size_t>(i)] = y.samples[static_cast<std::size_t>(j)] / gain;
    }
    return out;
}

}  // namespace

Compensator fit_compensator(const ComplexSignal& x, const ChainFn& chain,
                            const MonomialBasis& basis, const DpdFitConfig& cfg,
                            const EncoderConfig& enc, const RateConfig& rates) {
    if (x.size() != rates.n_bb)
        throw std::invalid_argument("fit_compensator: stimulus length does not match rates.n_bb");

    const ComplexSignal xhat = chain(x);
    const AlignmentResult al = align_gain_delay(x, xhat, cfg.max_delay);
    if (std::abs(al.gain) < 1e-9)
        throw std::runtime_error("fit_compensator: chain is not a perturbation of identity (gain ~ 0)");

    Compensator comp;
    comp.basis = basis;
    comp.downsample = rates.osr;
    comp.encoder = enc;
    comp.rates = rates;
    comp.align_delay = al.delay;
    comp.align_gain = al.gain;

    const ComplexSignal xd = encode(x, enc, rates).xd;
    const Eigen::MatrixXd v = eval_monomials(xd, basis);
    const Eigen::Index N = v.cols();

    if (cfg.prototypes == PrototypeKind::forward_model) {
        FitConfig fwd;
        fwd.taps_per_monomial = cfg.taps_per_monomial;
        fwd.ridge = cfg.ridge;
        comp.prototypes = fit_model(xd, xhat, basis, rates.osr, fwd).model.taps;
    } else {
        comp.prototypes = lowpass_prototype(cfg.taps_per_monomial, rates.osr);
    }
    const Eigen::Index P = comp.prototypes.cols();

    // Target: first-order residual of the aligned chain.
    const Eigen::Index n_bb = static_cast<Eigen::Index>(x.size());
    Eigen::VectorXcd delta(n_bb);
    for (Eigen::Index n = 0; n < n_bb; ++n)
        delta[n] = al.aligned.samples[static_cast<std::size_t>(n)] -
                   x.samples[static_cast<std::size_t>(n)];

    // Complex LS over all (prototype, monomial) pairs.
    const Eigen::Index cols = P * N;
    Eigen::MatrixXcd reg(n_bb, cols);
    {
        Eigen::VectorXcd col;
        for (Eigen::Index j = 0; j < P; ++j)
            for (Eigen::Index k = 0; k < N; ++k) {
                correction_column(v.col(k), comp.prototypes.col(j), rates.osr, col);
                reg.col(j * N + k) = col;
            }
    }
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(cols, cols);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(reg.adjoint());
    gram = gram.selfadjointView<Eigen::Lower>();
    const double diag_mean = gram.diagonal().real().mean();
    const double lam = std::max(cfg.ridge, 1e-14);  // keep the solve defined for degenerate streams
    if (diag_mean > 0.0) gram.diagonal().array() += lam * diag_mean;
    const Eigen::VectorXcd rhs = reg.adjoint() * delta;
    const Eigen::VectorXcd sol = Eigen::LLT<Eigen::MatrixXcd>(gram).solve(rhs);

    comp.coeff.resize(P, N);
    for (Eigen::Index j = 0; j < P; ++j)
        for (Eigen::Index k = 0; k < N; ++k) comp.coeff(j, k) = sol[j * N + k];
    return comp;
}

CompensatedSignal apply_compensator(const ComplexSignal& x, const Compensator& comp,
                                    FilterMode mode) {
    RateConfig rates = comp.rates;
    rates.n_bb = x.size();

    FirBankModel correction;
    correction.basis = comp.basis;
    correction.taps = comp.effective_taps();
    correction.downsample = comp.downsample;
    correction.mode = mode;

    const ComplexSignal xd = encode(x, comp.encoder, rates).xd;
    const ComplexSignal corr = model_forward(xd, correction);

    CompensatedSignal out;
    out.x.rate = x.rate;
    out.x.samples.resize(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        double re = x.samples[n].real() - corr.samples[n].real();
        double im = x.samples[n].imag() - corr.samples[n].imag();
        if (std::abs(re) > 1.0) {
            re = std::clamp(re, -1.0, 1.0);
            ++out.clipped;
        }
        if (std::abs(im) > 1.0) {
            im = std::clamp(im, -1.0, 1.0);
            ++out.clipped;
        }
        out.x.samples[n] = {re, im};
    }
    return out;
}

DpdEval eval_compensated(const ComplexSignal& x, const Compensator& comp, const ChainFn& chain) {
    DpdEval ev;
    const ComplexSignal plain = chain(x);
    const CompensatedSignal cx = apply_compensator(x, comp);
    ev.clipped = cx.clipped;
    const ComplexSignal dpd = chain(cx.x);
    ev.nmse_plain_db = nmse_db(x, aligned_by(plain, comp.align_delay, comp.align_gain));
    ev.nmse_dpd_db = nmse_db(x, aligned_by(dpd, comp.align_delay, comp.align_gain));
    return ev;
}

void Compensator::save(std::ostream& os) const {
    os << "compensator v1\n";
    os << "M " << basis.max_degree << "\n";
    os << "m_i " << basis.mem_i << "\n";
    os << "m_q " << basis.mem_q << "\n";
    os << "K " << downsample << "\n";
    os << "L_f " << prototypes.rows() << "\n";
    os << "P " << prototypes.cols() << "\n";
    os << "align_delay " << align_delay << "\n";
    os << "align_gain " << fmt_double(align_gain.real()) << ' ' << fmt_double(align_gain.imag())
       << "\n";
    os << "encoder_kind "
       << (encoder.kind == EncoderKind::dsm1
               ? "dsm1"
               : (encoder.kind == EncoderKind::quantizer ? "quantizer" : "passthrough"))
       << "\n";
    os << "encoder_interp " << (encoder.interpolation == InterpKind::ideal ? "ideal" : "hold")
       << "\n";
    os << "encoder_levels";
    for (double l : encoder.levels) os << ' ' << fmt_double(l);
    os << "\n";
    os << "rates " << rates.n_bb << ' ' << rates.osr << ' ' << rates.fine_res << "\n";
    os << "prototypes j,l,re,im\n";
    for (Eigen::Index j = 0; j < prototypes.cols(); ++j)
        for (Eigen::Index l = 0; l < prototypes.rows(); ++l)
            os << j << ',' << l << ',' << fmt_double(prototypes(l, j).real()) << ','
               << fmt_double(prototypes(l, j).imag()) << "\n";
    os << "coeff j,monomial,re,im\n";
    for (Eigen::Index j = 0; j < coeff.rows(); ++j)
        for (Eigen::Index k = 0; k < coeff.cols(); ++k)
            os << j << ',' << basis.specs[static_cast<std::size_t>(k)].str() << ','
               << fmt_double(coeff(j, k).real()) << ',' << fmt_double(coeff(j, k).imag()) << "\n";
    os << "end\n";
}

void Compensator::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("Compensator: cannot open '" + path + "' for writing");
    save(os);
    if (!os) throw std::runtime_error("Compensator: write to '" + path + "' failed");
}

Compensator Compensator::load(std::istream& is) {
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(is, line))
            throw std::runtime_error(std::string("Compensator: truncated file, expected ") + what);
        return line;
    };
    if (next_line("magic") != "compensator v1")
        throw std::runtime_error("Compensator: bad magic line '" + line + "'");

    auto kv = [&](const char* key) {
        next_line(key);
        std::istringstream ss(line);
        std::string k;
        ss >> k;
        if (k != key)
            throw std::runtime_error(std::string("Compensator: expected '") + key + "', got '" +
                                     line + "'");
        std::string rest;
        std::getline(ss, rest);
        if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
        return rest;
    };

    Compensator c;
    const int M = std::stoi(kv("M"));
    const int mi = std::stoi(kv("m_i"));
    const int mq = std::stoi(kv("m_q"));
    c.basis = enumerate_monomials(M, mi, mq);
    c.downsample = std::stoi(kv("K"));
    const Eigen::Index lf = std::stol(kv("L_f"));
    const Eigen::Index P = std::stol(kv("P"));
    c.align_delay = std::stol(kv("align_delay"));
    {
        std::istringstream ss(kv("align_gain"));
        double re, im;
        ss >> re >> im;
        c.align_gain = {re, im};
    }
    {
        const std::string k = kv("encoder_kind");
        if (k == "dsm1")
            c.encoder.kind = EncoderKind::dsm1;
        else if (k == "quantizer")
            c.encoder.kind = EncoderKind::quantizer;
        else if (k == "passthrough")
            c.encoder.kind = EncoderKind::passthrough;
        else
            throw std::runtime_error("Compensator: unknown encoder kind '" + k + "'");
    }
    c.encoder.interpolation =
        (kv("encoder_interp") == "hold") ? InterpKind::hold : InterpKind::ideal;
    {
        std::istringstream ss(kv("encoder_levels"));
        c.encoder.levels.clear();
        double v;
        while (ss >> v) c.encoder.levels.push_back(v);
    }
    {
        std::istringstream ss(kv("rates"));
        ss >> c.rates.n_bb >> c.rates.osr >> c.rates.fine_res;
    }
    c.encoder.oversample = c.rates.osr;

    c.prototypes = Eigen::MatrixXcd::Zero(lf, P);
    if (next_line("prototypes header").rfind("prototypes", 0) != 0)
        throw std::runtime_error("Compensator: expected prototypes header");
    for (Eigen::Index count = 0; count < lf * P; ++count) {
        std::istringstream ss(next_line("prototype row"));
        std::string j_s, l_s, re_s, im_s;
        std::getline(ss, j_s, ',');
        std::getline(ss, l_s, ',');
        std::getline(ss, re_s, ',');
        std::getline(ss, im_s);
        c.prototypes(std::stol(l_s), std::stol(j_s)) = {std::stod(re_s), std::stod(im_s)};
    }
    if (next_line("coeff header").rfind("coeff", 0) != 0)
        throw std::runtime_error("Compensator: expected coeff header");
    c.coeff = Eigen::MatrixXcd::Zero(P, static_cast<Eigen::Index>(c.basis.size()));
    for (Eigen::Index count = 0; count < P * static_cast<Eigen::Index>(c.basis.size()); ++count) {
        std::istringstream ss(next_line("coeff row"));
        std::string j_s, name, re_s, im_s;
        std::getline(ss, j_s, ',');
        std::getline(ss, name, ',');
        std::getline(ss, re_s, ',');
        std::getline(ss, im_s);
        const long k = c.basis.index_of(MonomialSpec::parse(name));
        if (k < 0) throw std::runtime_error("Compensator: monomial '" + name + "' not in basis");
        c.coeff(std::stol(j_s), static_cast<Eigen::Index>(k)) = {std::stod(re_s), std::stod(im_s)};
    }
    if (next_line("end") != "end") throw std::runtime_error("Compensator: missing end marker");
    return c;
}

Compensator Compensator::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("Compensator: cannot open '" + path + "'");
    return load(is);
}

}  // namespace adtsim
