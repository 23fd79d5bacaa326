#include "adtsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace adtsim {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            std::pow(10.0, llo + (lhi - llo) * i / static_cast<double>(count - 1));
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

RateConfig ExperimentConfig::rates_for(std::size_t n_bb) const {
    RateConfig r;
    r.n_bb = n_bb;
    r.osr = osr;
    r.fine_res = fine_res;
    return r;
}

EncoderConfig ExperimentConfig::encoder_config() const {
    EncoderConfig e;
    e.kind = encoder_kind;
    e.levels = levels;
    e.oversample = osr;
    e.interpolation = interpolation;
    return e;
}

CtKernelSpec ExperimentConfig::kernel_for(double delta) const {
    if (kernel_kind == CtKernelSpec::Kind::cubic_delay)
        return CtKernelSpec::cubic(delta, tau1, tau2, tau3);
    if (kernel_kind == CtKernelSpec::Kind::separable_quad)
        return CtKernelSpec::separable(delta);
    throw std::invalid_argument("ExperimentConfig: general kernels are not expressible in configs");
}

void ExperimentConfig::validate() const {
    rates_for(n_train).validate();
    encoder_config().validate();
    if (deltas.empty()) throw std::invalid_argument("ExperimentConfig: empty delta sweep list");
    if (n_train < 16 || n_val < 16)
        throw std::invalid_argument("ExperimentConfig: records must hold at least 16 samples");
    if (seed_train == seed_val)
        throw std::invalid_argument("ExperimentConfig: train and validation seeds must differ");
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config file not found: " + path);
    return parse_config(is, path);
}

ExperimentConfig parse_config(std::istream& is, const std::string& origin) {
    ExperimentConfig cfg;
    bool have_deltas = false;
    std::vector<std::string> unknown;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        auto kind_error = [&](const std::string& what) {
            return std::runtime_error(origin + ":" + std::to_string(lineno) + ": bad " + what +
                                      " value '" + val + "'");
        };

        if (key == "example.id") {
            cfg.example_id = val;
        } else if (key == "rates.K") {
            cfg.osr = std::stoi(val);
        } else if (key == "rates.R") {
            cfg.fine_res = std::stoi(val);
        } else if (key == "encoder.kind") {
            if (val == "dsm1")
                cfg.encoder_kind = EncoderKind::dsm1;
            else if (val == "quantizer")
                cfg.encoder_kind = EncoderKind::quantizer;
            else if (val == "passthrough")
                cfg.encoder_kind = EncoderKind::passthrough;
            else
                throw kind_error("encoder.kind");
        } else if (key == "encoder.levels") {
            cfg.levels = parse_double_list(val);
        } else if (key == "encoder.interpolation") {
            if (val == "ideal")
                cfg.interpolation = InterpKind::ideal;
            else if (val == "hold")
                cfg.interpolation = InterpKind::hold;
            else
                throw kind_error("encoder.interpolation");
        } else if (key == "kernel.kind") {
            if (val == "cubic_delay")
                cfg.kernel_kind = CtKernelSpec::Kind::cubic_delay;
            else if (val == "separable_quad")
                cfg.kernel_kind = CtKernelSpec::Kind::separable_quad;
            else
                throw kind_error("kernel.kind");
        } else if (key == "kernel.delta") {
            cfg.deltas = parse_double_list(val);
            have_deltas = true;
        } else if (key == "kernel.tau1") {
            cfg.tau1 = std::stod(val);
        } else if (key == "kernel.tau2") {
            cfg.tau2 = std::stod(val);
        } else if (key == "kernel.tau3") {
            cfg.tau3 = std::stod(val);
        } else if (key == "model.M") {
            cfg.max_degree = std::stoi(val);
        } else if (key == "model.m_i") {
            cfg.mem_i = std::stoi(val);
        } else if (key == "model.m_q") {
            cfg.mem_q = std::stoi(val);
        } else if (key == "model.L_f") {
            cfg.taps_per_monomial = std::stol(val);
        } else if (key == "model.lambda") {
            cfg.ridge = std::stod(val);
        } else if (key == "model.solver") {
            if (val == "normal_cholesky")
                cfg.solver = Solver::normal_cholesky;
            else if (val == "qr")
                cfg.solver = Solver::qr;
            else
                throw kind_error("model.solver");
        } else if (key == "data.n_train") {
            cfg.n_train = std::stoul(val);
        } else if (key == "data.n_val") {
            cfg.n_val = std::stoul(val);
        } else if (key == "data.seed_train") {
            cfg.seed_train = std::stoull(val);
        } else if (key == "data.seed_val") {
            cfg.seed_val = std::stoull(val);
        } else if (key == "data.peak") {
            cfg.peak = std::stod(val);
        } else if (key == "dpd.M") {
            cfg.dpd_max_degree = std::stoi(val);
        } else if (key == "dpd.m_i") {
            cfg.dpd_mem_i = std::stoi(val);
        } else if (key == "dpd.m_q") {
            cfg.dpd_mem_q = std::stoi(val);
        } else if (key == "dpd.L_f") {
            cfg.dpd_taps = std::stol(val);
        } else if (key == "dpd.lambda") {
            cfg.dpd_ridge = std::stod(val);
        } else if (key == "dpd.prototypes") {
            if (val == "forward")
                cfg.dpd_prototypes = PrototypeKind::forward_model;
            else if (val == "lowpass")
                cfg.dpd_prototypes = PrototypeKind::lowpass;
            else
                throw kind_error("dpd.prototypes");
        } else if (key == "dpd.max_delay") {
            cfg.dpd_max_delay = std::stol(val);
        } else if (key == "dpd.seed_eval") {
            cfg.dpd_seed_eval = std::stoull(val);
        } else if (key == "outputs.csv") {
            cfg.csv_path = val;
        } else {
            unknown.push_back(key);
        }
    }
    if (!unknown.empty()) {
        std::string msg = origin + ": unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw std::runtime_error(msg);
    }
    if (!have_deltas) {
        // Default grids follow the studied delta intervals for each kernel.
        cfg.deltas = (cfg.kernel_kind == CtKernelSpec::Kind::cubic_delay)
                         ? log_spaced(0.001, 0.2, 8)
                         : log_spaced(0.001, 0.015, 8);
    }
    return cfg;
}

void print_config(const ExperimentConfig& cfg, std::ostream& os) {
    os << "example.id = " << cfg.example_id << "\n";
    os << "rates.K = " << cfg.osr << "\n";
    os << "rates.R = " << cfg.fine_res << "\n";
    os << "encoder.kind = "
       << (cfg.encoder_kind == EncoderKind::dsm1
               ? "dsm1"
               : (cfg.encoder_kind == EncoderKind::quantizer ? "quantizer" : "passthrough"))
       << "\n";
    os << "encoder.levels = ";
    for (std::size_t i = 0; i < cfg.levels.size(); ++i)
        os << (i ? "," : "") << fmt_double(cfg.levels[i]);
    os << "\n";
    os << "encoder.interpolation = "
       << (cfg.interpolation == InterpKind::ideal ? "ideal" : "hold") << "\n";
    os << "kernel.kind = "
       << (cfg.kernel_kind == CtKernelSpec::Kind::cubic_delay ? "cubic_delay" : "separable_quad")
       << "\n";
    os << "kernel.delta = ";
    for (std::size_t i = 0; i < cfg.deltas.size(); ++i)
        os << (i ? "," : "") << fmt_double(cfg.deltas[i]);
    os << "\n";
    os << "kernel.tau1 = " << fmt_double(cfg.tau1) << "\n";
    os << "kernel.tau2 = " << fmt_double(cfg.tau2) << "\n";
    os << "kernel.tau3 = " << fmt_double(cfg.tau3) << "\n";
    os << "model.M = " << cfg.max_degree << "\n";
    os << "model.m_i = " << cfg.mem_i << "\n";
    os << "model.m_q = " << cfg.mem_q << "\n";
    os << "model.L_f = " << cfg.taps_per_monomial << "\n";
    os << "model.lambda = " << fmt_double(cfg.ridge) << "\n";
    os << "model.solver = " << (cfg.solver == Solver::qr ? "qr" : "normal_cholesky") << "\n";
    os << "data.n_train = " << cfg.n_train << "\n";
    os << "data.n_val = " << cfg.n_val << "\n";
    os << "data.seed_train = " << cfg.seed_train << "\n";
    os << "data.seed_val = " << cfg.seed_val << "\n";
    os << "data.peak = " << fmt_double(cfg.peak) << "\n";
    os << "dpd.M = " << cfg.dpd_max_degree << "\n";
    os << "dpd.m_i = " << cfg.dpd_mem_i << "\n";
    os << "dpd.m_q = " << cfg.dpd_mem_q << "\n";
    os << "dpd.L_f = " << cfg.dpd_taps << "\n";
    os << "dpd.lambda = " << fmt_double(cfg.dpd_ridge) << "\n";
    os << "dpd.prototypes = "
       << (cfg.dpd_prototypes == PrototypeKind::forward_model ? "forward" : "lowpass") << "\n";
    os << "dpd.max_delay = " << cfg.dpd_max_delay << "\n";
    os << "dpd.seed_eval = " << cfg.dpd_seed_eval << "\n";
    os << "outputs.csv = " << cfg.csv_path << "\n";
}

namespace {

SweepRow run_point(const ExperimentConfig& cfg, double delta) {
    SweepRow row;
    row.example_id = cfg.example_id;
    row.delta = delta;
    row.n_train = cfg.n_train;
    row.n_val = cfg.n_val;
    row.max_degree = cfg.max_degree;
    row.mem_i = cfg.mem_i;
    row.mem_q = cfg.mem_q;
    row.taps_per_monomial = cfg.taps_per_monomial;
    row.ridge = cfg.ridge;
    row.seed_train = cfg.seed_train;
    row.seed_val = cfg.seed_val;

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const CtKernelSpec kernel = cfg.kernel_for(delta);
        const EncoderConfig enc = cfg.encoder_config();
        const MonomialBasis basis = enumerate_monomials(cfg.max_degree, cfg.mem_i, cfg.mem_q);

        const RateConfig rates_train = cfg.rates_for(cfg.n_train);
        const ComplexSignal x_train = gen_stimulus(cfg.n_train, cfg.seed_train, cfg.peak);
        const ReferenceRun train = simulate_reference(x_train, enc, kernel, rates_train);

        FitConfig fit_cfg;
        fit_cfg.taps_per_monomial = cfg.taps_per_monomial;
        fit_cfg.ridge = cfg.ridge;
        fit_cfg.solver = cfg.solver;
        FitResult fit = fit_model(train.xd, train.xhat, basis, cfg.osr, fit_cfg);

        const RateConfig rates_val = cfg.rates_for(cfg.n_val);
        const ComplexSignal x_val = gen_stimulus(cfg.n_val, cfg.seed_val, cfg.peak);
        const ReferenceRun val = simulate_reference(x_val, enc, kernel, rates_val);

        row.train_nmse_db = fit.report.train_nmse_db;
        row.val_nmse_db = validate(fit.model, val.xd, val.xhat);
        row.condition_estimate = fit.report.condition_estimate;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int jobs) {
    cfg.validate();
    const int n_points = static_cast<int>(cfg.deltas.size());
    std::vector<SweepRow> rows(static_cast<std::size_t>(n_points));
    jobs = std::max(1, std::min(jobs, n_points));
    if (jobs == 1) {
        for (int i = 0; i < n_points; ++i)
            rows[static_cast<std::size_t>(i)] = run_point(cfg, cfg.deltas[static_cast<std::size_t>(i)]);
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (int i = next.fetch_add(1); i < n_points; i = next.fetch_add(1))
                rows[static_cast<std::size_t>(i)] =
                    run_point(cfg, cfg.deltas[static_cast<std::size_t>(i)]);
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << kSweepCsvHeader;
    for (const auto& r : rows) {
        os << r.example_id << ',' << fmt_double(r.delta) << ',' << r.n_train << ',' << r.n_val
           << ',' << r.max_degree << ',' << r.mem_i << ',' << r.mem_q << ','
           << r.taps_per_monomial << ',' << fmt_double(r.ridge) << ','
           << fmt_double(r.train_nmse_db) << ',' << fmt_double(r.val_nmse_db) << ','
           << fmt_double(r.condition_estimate) << ',' << r.seed_train << ',' << r.seed_val << ','
           << fmt_double(r.wall_seconds) << ',' << r.error << "\n";
    }
}

void save_signal(const ComplexSignal& x, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_signal: cannot open '" + path + "' for writing");
    os << "# adtsim-signal v1\n";
    os << "rate " << fmt_double(x.rate) << "\n";
    os << "n " << x.size() << "\n";
    for (const auto& s : x.samples)
        os << fmt_double(s.real()) << ',' << fmt_double(s.imag()) << "\n";
    if (!os) throw std::runtime_error("save_signal: write to '" + path + "' failed");
}

ComplexSignal load_signal(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_signal: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line != "# adtsim-signal v1")
        throw std::runtime_error("load_signal: bad magic in '" + path + "'");
    ComplexSignal x;
    std::size_t n = 0;
    {
        std::getline(is, line);
        std::istringstream ss(line);
        std::string key;
        ss >> key >> x.rate;
        if (key != "rate") throw std::runtime_error("load_signal: expected rate line");
    }
    {
        std::getline(is, line);
        std::istringstream ss(line);
        std::string key;
        ss >> key >> n;
        if (key != "n") throw std::runtime_error("load_signal: expected n line");
    }
    x.samples.reserve(n);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("load_signal: malformed sample row '" + line + "'");
        x.samples.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    if (x.samples.size() != n)
        throw std::runtime_error("load_signal: sample count mismatch in '" + path + "'");
    return x;
}

}  // namespace adtsim
