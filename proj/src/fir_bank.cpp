#include "adtsim/fir_bank.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace adtsim {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void FirBankModel::save(std::ostream& os) const {
    os << "firbank v1\n";
    os << "M " << basis.max_degree << "\n";
    os << "m_i " << basis.mem_i << "\n";
    os << "m_q " << basis.mem_q << "\n";
    os << "K " << downsample << "\n";
    os << "L_f " << taps.rows() << "\n";
    os << "mode " << (mode == FilterMode::periodic ? "periodic" : "streaming") << "\n";
    os << "taps monomial,l,re,im\n";
    for (Eigen::Index k = 0; k < taps.cols(); ++k) {
        const std::string name = basis.specs[static_cast<std::size_t>(k)].str();
        for (Eigen::Index l = 0; l < taps.rows(); ++l) {
            os << name << ',' << l << ',' << fmt_double(taps(l, k).real()) << ','
               << fmt_double(taps(l, k).imag()) << "\n";
        }
    }
    os << "end\n";
}

void FirBankModel::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("FirBankModel: cannot open '" + path + "' for writing");
    save(os);
    if (!os) throw std::runtime_error("FirBankModel: write to '" + path + "' failed");
}

FirBankModel FirBankModel::load(std::istream& is) {
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(is, line))
            throw std::runtime_error(std::string("FirBankModel: truncated file, expected ") + what);
        return line;
    };
    if (next_line("magic") != "firbank v1")
        throw std::runtime_error("FirBankModel: bad magic line '" + line + "'");

    auto field = [&](const char* key) {
        next_line(key);
        std::istringstream ss(line);
        std::string k, v;
        ss >> k >> v;
        if (k != key) throw std::runtime_error(std::string("FirBankModel: expected '") + key + "', got '" + line + "'");
        return v;
    };
    const int M = std::stoi(field("M"));
    const int mi = std::stoi(field("m_i"));
    const int mq = std::stoi(field("m_q"));
    const int K = std::stoi(field("K"));
    const Eigen::Index lf = std::stol(field("L_f"));
    const std::string mode_s = field("mode");

    FirBankModel m;
    m.basis = enumerate_monomials(M, mi, mq);
    m.downsample = K;
    if (mode_s == "periodic")
        m.mode = FilterMode::periodic;
    else if (mode_s == "streaming")
        m.mode = FilterMode::streaming;
    else
        throw std::runtime_error("FirBankModel: unknown mode '" + mode_s + "'");
    m.taps = Eigen::MatrixXcd::Zero(lf, static_cast<Eigen::Index>(m.basis.size()));

    next_line("taps header");
    if (line.rfind("taps", 0) != 0)
        throw std::runtime_error("FirBankModel: expected taps header, got '" + line + "'");
    while (next_line("tap row or end") != "end") {
        std::istringstream ss(line);
        std::string name, l_s, re_s, im_s;
        if (!std::getline(ss, name, ',') || !std::getline(ss, l_s, ',') ||
            !std::getline(ss, re_s, ',') || !std::getline(ss, im_s))
            throw std::runtime_error("FirBankModel: malformed tap row '" + line + "'");
        const long k = m.basis.index_of(MonomialSpec::parse(name));
        if (k < 0) throw std::runtime_error("FirBankModel: monomial '" + name + "' not in basis");
        const Eigen::Index l = std::stol(l_s);
        if (l < 0 || l >= lf) throw std::runtime_error("FirBankModel: tap index out of range in '" + line + "'");
        m.taps(l, static_cast<Eigen::Index>(k)) = {std::stod(re_s), std::stod(im_s)};
    }
    return m;
}

FirBankModel FirBankModel::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("FirBankModel: cannot open '" + path + "'");
    return load(is);
}

ComplexSignal model_forward(const Eigen::MatrixXd& v, double xd_rate, const FirBankModel& model) {
    const Eigen::Index n_d = v.rows();
    const Eigen::Index N = v.cols();
    if (N != static_cast<Eigen::Index>(model.basis.size()) || N != model.taps.cols())
        throw std::invalid_argument("model_forward: stream count does not match basis");
    const int K = model.downsample;
    if (K < 1) throw std::invalid_argument("model_forward: downsample factor must be >= 1");
    if (model.mode == FilterMode::periodic && n_d % K != 0)
        throw std::invalid_argument("model_forward: K must divide the record length in periodic mode");
    const Eigen::Index lf = model.taps.rows();
    if (model.mode == FilterMode::periodic && lf > n_d)
        throw std::invalid_argument("model_forward: tap length exceeds record length in periodic mode");

    const Eigen::Index n_out = n_d / K;
    ComplexSignal out;
    out.rate = xd_rate / K;
    out.samples.assign(static_cast<std::size_t>(n_out), cplx{0.0, 0.0});

    for (Eigen::Index k = 0; k < N; ++k) {
        const double* col = v.col(k).data();
        const cplx* h = model.taps.col(k).data();
        for (Eigen::Index np = 0; np < n_out; ++np) {
            const Eigen::Index base = np * K;
            cplx acc{0.0, 0.0};
            if (model.mode == FilterMode::periodic) {
                // indices base, base-1, ... wrap once at most since lf <= n_d
                Eigen::Index idx = base;
                for (Eigen::Index l = 0; l < lf; ++l) {
                    acc += h[l] * col[idx];
                    idx = (idx == 0) ? n_d - 1 : idx - 1;
                }
            } else {
                const Eigen::Index lmax = std::min<Eigen::Index>(lf, base + 1);
                for (Eigen::Index l = 0; l < lmax; ++l) acc += h[l] * col[base - l];
            }
            out.samples[static_cast<std::size_t>(np)] += acc;
        }
    }
    return out;
}

ComplexSignal model_forward(const ComplexSignal& xd, const FirBankModel& model) {
    const Eigen::MatrixXd v = (model.mode == FilterMode::periodic)
                                  ? eval_monomials(xd, model.basis)
                                  : eval_monomials_streaming(xd, model.basis);
    return model_forward(v, xd.rate, model);
}

}  // namespace adtsim
