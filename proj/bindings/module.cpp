// Python bindings for the chain, the baseband model and the identification and
// predistortion entry points. Signals cross the boundary as 1-d numpy arrays.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "adtsim/dpd.hpp"
#include "adtsim/experiment.hpp"
#include "adtsim/identify.hpp"
#include "adtsim/passband.hpp"

namespace py = pybind11;
using namespace adtsim;

namespace {

ComplexSignal to_signal(const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a,
                        double rate) {
    ComplexSignal s;
    s.rate = rate;
    s.samples.assign(a.data(), a.data() + a.size());
    return s;
}

RealSignal to_real(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                   double rate) {
    RealSignal s;
    s.rate = rate;
    s.samples.assign(a.data(), a.data() + a.size());
    return s;
}

py::array_t<cplx> from_signal(const ComplexSignal& s) {
    return py::array_t<cplx>(static_cast<py::ssize_t>(s.size()), s.samples.data());
}

py::array_t<double> from_real(const RealSignal& s) {
    return py::array_t<double>(static_cast<py::ssize_t>(s.size()), s.samples.data());
}

EncoderConfig make_encoder(const std::string& kind, const std::vector<double>& levels,
                           int oversample, const std::string& interpolation) {
    EncoderConfig enc;
    if (kind == "dsm1")
        enc.kind = EncoderKind::dsm1;
    else if (kind == "quantizer")
        enc.kind = EncoderKind::quantizer;
    else if (kind == "passthrough")
        enc.kind = EncoderKind::passthrough;
    else
        throw std::invalid_argument("unknown encoder kind: " + kind);
    enc.levels = levels;
    enc.oversample = oversample;
    if (interpolation == "ideal")
        enc.interpolation = InterpKind::ideal;
    else if (interpolation == "hold")
        enc.interpolation = InterpKind::hold;
    else
        throw std::invalid_argument("unknown interpolation: " + interpolation);
    return enc;
}

CtKernelSpec make_kernel(const std::string& kind, double delta, double tau1, double tau2,
                         double tau3) {
    if (kind == "cubic_delay") return CtKernelSpec::cubic(delta, tau1, tau2, tau3);
    if (kind == "separable_quad") return CtKernelSpec::separable(delta);
    throw std::invalid_argument("unknown kernel kind: " + kind);
}

}  // namespace

PYBIND11_MODULE(_adtsim, m) {
    m.doc() = "All-digital transmitter chain simulation and baseband-equivalent modeling";

    py::class_<RateConfig>(m, "RateConfig")
        .def(py::init([](std::size_t n_bb, int K, int R) {
                 RateConfig c{n_bb, K, R};
                 c.validate();
                 return c;
             }),
             py::arg("n_bb"), py::arg("K"), py::arg("R"))
        .def_readonly("n_bb", &RateConfig::n_bb)
        .def_readonly("K", &RateConfig::osr)
        .def_readonly("R", &RateConfig::fine_res)
        .def_property_readonly("n_d", &RateConfig::n_d)
        .def_property_readonly("n_fine", &RateConfig::n_fine)
        .def_property_readonly("carrier_bin", &RateConfig::carrier_bin);

    py::class_<FirBankModel>(m, "FirBankModel")
        .def_property_readonly("taps", [](const FirBankModel& f) { return f.taps; })
        .def_property_readonly("downsample", [](const FirBankModel& f) { return f.downsample; })
        .def_property_readonly(
            "monomials",
            [](const FirBankModel& f) {
                std::vector<std::string> names;
                for (const auto& s : f.basis.specs) names.push_back(s.str());
                return names;
            })
        .def("save", &FirBankModel::save_file, py::arg("path"))
        .def_static("load", &FirBankModel::load_file, py::arg("path"))
        .def("__repr__", [](const FirBankModel& f) {
            std::ostringstream ss;
            ss << "FirBankModel(N=" << f.basis.size() << ", L_f=" << f.taps.rows()
               << ", K=" << f.downsample << ")";
            return ss.str();
        });

    py::class_<Compensator>(m, "Compensator")
        .def_property_readonly("coeff", [](const Compensator& c) { return c.coeff; })
        .def_property_readonly("align_delay", [](const Compensator& c) { return c.align_delay; })
        .def_property_readonly("align_gain", [](const Compensator& c) { return c.align_gain; })
        .def("save", &Compensator::save_file, py::arg("path"))
        .def_static("load", &Compensator::load_file, py::arg("path"));

    m.def(
        "gen_stimulus",
        [](std::size_t n_bb, std::uint64_t seed, double peak) {
            return from_signal(gen_stimulus(n_bb, seed, peak));
        },
        py::arg("n_bb"), py::arg("seed"), py::arg("peak") = 0.9);

    m.def(
        "nmse_db",
        [](py::array_t<cplx> ref, py::array_t<cplx> est) {
            return nmse_db(to_signal(ref, 1.0), to_signal(est, 1.0));
        },
        py::arg("ref"), py::arg("est"));

    m.def(
        "align_gain_delay",
        [](py::array_t<cplx> ref, py::array_t<cplx> meas, long max_delay) {
            const auto al = align_gain_delay(to_signal(ref, 1.0), to_signal(meas, 1.0), max_delay);
            return py::make_tuple(al.delay, al.gain, from_signal(al.aligned));
        },
        py::arg("ref"), py::arg("meas"), py::arg("max_delay"));

    m.def(
        "encode",
        [](py::array_t<cplx> x, int K, const std::string& kind, const std::vector<double>& levels,
           const std::string& interpolation) {
            RateConfig rates{static_cast<std::size_t>(x.size()), K, 1};
            const auto res = to_signal(x, 1.0);
            const auto out = encode(res, make_encoder(kind, levels, K, interpolation), rates);
            return py::make_tuple(from_signal(out.xd), out.overload_count);
        },
        py::arg("x"), py::arg("K") = 1, py::arg("kind") = "dsm1",
        py::arg("levels") = std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0},
        py::arg("interpolation") = "ideal");

    m.def(
        "upconvert_interleave",
        [](py::array_t<cplx> xd) { return from_real(upconvert_interleave(to_signal(xd, 1.0))); },
        py::arg("xd"));

    m.def(
        "band_extract_demod",
        [](py::array_t<double> xc, const RateConfig& cfg) {
            return from_signal(band_extract_demod(to_real(xc, cfg.f_fine()), cfg));
        },
        py::arg("xc"), py::arg("rates"));

    m.def(
        "apply_nonlinearity",
        [](py::array_t<double> xc, const RateConfig& cfg, const std::string& kind, double delta,
           double tau1, double tau2, double tau3) {
            return from_real(apply_nonlinearity(to_real(xc, cfg.f_fine()),
                                                make_kernel(kind, delta, tau1, tau2, tau3), cfg));
        },
        py::arg("xc"), py::arg("rates"), py::arg("kind"), py::arg("delta"), py::arg("tau1") = 1.2,
        py::arg("tau2") = 2.3, py::arg("tau3") = 0.4);

    m.def(
        "simulate_reference",
        [](py::array_t<cplx> x, const RateConfig& rates, const std::string& encoder_kind,
           const std::vector<double>& levels, const std::string& interpolation,
           const std::string& kernel_kind, double delta, double tau1, double tau2, double tau3) {
            const auto run = simulate_reference(
                to_signal(x, 1.0), make_encoder(encoder_kind, levels, rates.osr, interpolation),
                make_kernel(kernel_kind, delta, tau1, tau2, tau3), rates);
            return py::make_tuple(from_signal(run.xd), from_signal(run.xhat), run.overload_count);
        },
        py::arg("x"), py::arg("rates"), py::arg("encoder_kind") = "dsm1",
        py::arg("levels") = std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0},
        py::arg("interpolation") = "ideal", py::arg("kernel_kind") = "cubic_delay",
        py::arg("delta") = 0.0, py::arg("tau1") = 1.2, py::arg("tau2") = 2.3,
        py::arg("tau3") = 0.4);

    m.def(
        "enumerate_monomials",
        [](int M, int m_i, int m_q) {
            std::vector<std::string> names;
            for (const auto& s : enumerate_monomials(M, m_i, m_q).specs) names.push_back(s.str());
            return names;
        },
        py::arg("M"), py::arg("m_i"), py::arg("m_q"));

    m.def(
        "eval_monomials",
        [](py::array_t<cplx> xd, int M, int m_i, int m_q) {
            return eval_monomials(to_signal(xd, 1.0), enumerate_monomials(M, m_i, m_q));
        },
        py::arg("xd"), py::arg("M"), py::arg("m_i"), py::arg("m_q"));

    m.def(
        "fit_model",
        [](py::array_t<cplx> xd, py::array_t<cplx> xhat, int K, int M, int m_i, int m_q,
           Eigen::Index taps, double ridge, const std::string& solver) {
            FitConfig cfg;
            cfg.taps_per_monomial = taps;
            cfg.ridge = ridge;
            cfg.solver = (solver == "qr") ? Solver::qr : Solver::normal_cholesky;
            auto res = fit_model(to_signal(xd, static_cast<double>(K)), to_signal(xhat, 1.0),
                                 enumerate_monomials(M, m_i, m_q), K, cfg);
            py::dict report;
            report["train_nmse_db"] = res.report.train_nmse_db;
            report["condition_estimate"] = res.report.condition_estimate;
            report["unknowns"] = res.report.unknowns;
            report["rank_deficient"] = res.report.rank_deficient;
            return py::make_tuple(std::move(res.model), report);
        },
        py::arg("xd"), py::arg("xhat"), py::arg("K"), py::arg("M") = 3, py::arg("m_i") = 4,
        py::arg("m_q") = 4, py::arg("taps") = 16, py::arg("ridge") = 1e-10,
        py::arg("solver") = "normal_cholesky");

    m.def(
        "model_forward",
        [](py::array_t<cplx> xd, const FirBankModel& model) {
            return from_signal(model_forward(to_signal(xd, static_cast<double>(model.downsample)),
                                             model));
        },
        py::arg("xd"), py::arg("model"));

    m.def(
        "validate",
        [](const FirBankModel& model, py::array_t<cplx> xd, py::array_t<cplx> xhat) {
            return validate(model, to_signal(xd, static_cast<double>(model.downsample)),
                            to_signal(xhat, 1.0));
        },
        py::arg("model"), py::arg("xd"), py::arg("xhat"));

    m.def(
        "fit_compensator",
        [](py::array_t<cplx> x, const RateConfig& rates, const std::string& encoder_kind,
           const std::vector<double>& levels, const std::string& interpolation,
           const std::string& kernel_kind, double delta, double tau1, double tau2, double tau3,
           int M, int m_i, int m_q, Eigen::Index taps, double ridge, long max_delay) {
            const auto enc = make_encoder(encoder_kind, levels, rates.osr, interpolation);
            const auto kernel = make_kernel(kernel_kind, delta, tau1, tau2, tau3);
            ChainFn chain = [enc, kernel, rates](const ComplexSignal& in) {
                RateConfig r = rates;
                r.n_bb = in.size();
                return simulate_reference(in, enc, kernel, r).xhat;
            };
            DpdFitConfig cfg;
            cfg.taps_per_monomial = taps;
            cfg.ridge = ridge;
            cfg.max_delay = max_delay;
            return fit_compensator(to_signal(x, 1.0), chain, enumerate_monomials(M, m_i, m_q),
                                   cfg, enc, rates);
        },
        py::arg("x"), py::arg("rates"), py::arg("encoder_kind") = "dsm1",
        py::arg("levels") = std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0},
        py::arg("interpolation") = "ideal", py::arg("kernel_kind") = "cubic_delay",
        py::arg("delta") = 0.0, py::arg("tau1") = 1.2, py::arg("tau2") = 2.3,
        py::arg("tau3") = 0.4, py::arg("M") = 3, py::arg("m_i") = 2, py::arg("m_q") = 2,
        py::arg("taps") = 16, py::arg("ridge") = 1e-10, py::arg("max_delay") = 4);

    m.def(
        "eval_compensated",
        [](py::array_t<cplx> x, const Compensator& comp, const std::string& kernel_kind,
           double delta, double tau1, double tau2, double tau3) {
            const auto kernel = make_kernel(kernel_kind, delta, tau1, tau2, tau3);
            const EncoderConfig enc = comp.encoder;
            const RateConfig rates = comp.rates;
            ChainFn chain = [enc, kernel, rates](const ComplexSignal& in) {
                RateConfig r = rates;
                r.n_bb = in.size();
                return simulate_reference(in, enc, kernel, r).xhat;
            };
            const auto ev = eval_compensated(to_signal(x, 1.0), comp, chain);
            py::dict d;
            d["nmse_plain_db"] = ev.nmse_plain_db;
            d["nmse_dpd_db"] = ev.nmse_dpd_db;
            d["clipped"] = ev.clipped;
            return d;
        },
        py::arg("x"), py::arg("comp"), py::arg("kernel_kind") = "cubic_delay",
        py::arg("delta") = 0.0, py::arg("tau1") = 1.2, py::arg("tau2") = 2.3,
        py::arg("tau3") = 0.4);

    m.def(
        "run_sweep",
        [](const std::string& config_path, int jobs) {
            const auto cfg = parse_config_file(config_path);
            const auto rows = run_sweep(cfg, jobs);
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["example_id"] = r.example_id;
                d["delta"] = r.delta;
                d["train_nmse_db"] = r.train_nmse_db;
                d["val_nmse_db"] = r.val_nmse_db;
                d["condition_estimate"] = r.condition_estimate;
                d["error"] = r.error;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("config_path"), py::arg("jobs") = 1);
}
