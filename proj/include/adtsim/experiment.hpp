#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adtsim/dpd.hpp"
#include "adtsim/encoder.hpp"
#include "adtsim/identify.hpp"
#include "adtsim/passband.hpp"
#include "adtsim/signal.hpp"

namespace adtsim {

/// Flat dotted-key configuration for the experiment front end. Unknown keys in a
/// config file are a hard error.
struct ExperimentConfig {
    std::string example_id = "example1";

    // rates.*
    int osr = 4;       ///< rates.K
    int fine_res = 20; ///< rates.R

    // encoder.*
    EncoderKind encoder_kind = EncoderKind::dsm1;
    std::vector<double> levels = {-1.0, -0.5, 0.0, 0.5, 1.0};
    InterpKind interpolation = InterpKind::ideal;

    // kernel.*
    CtKernelSpec::Kind kernel_kind = CtKernelSpec::Kind::cubic_delay;
    std::vector<double> deltas;  ///< sweep list; default set by finalize()
    double tau1 = 1.2, tau2 = 2.3, tau3 = 0.4;

    // model.*
    int max_degree = 3;
    int mem_i = 4, mem_q = 4;
    Eigen::Index taps_per_monomial = 16;
    double ridge = 1e-10;
    Solver solver = Solver::normal_cholesky;

    // data.*
    std::size_t n_train = 40960;
    std::size_t n_val = 8192;
    std::uint64_t seed_train = 101;
    std::uint64_t seed_val = 202;
    double peak = 0.9;

    // dpd.*
    int dpd_max_degree = 3;
    int dpd_mem_i = 2, dpd_mem_q = 2;
    Eigen::Index dpd_taps = 16;
    double dpd_ridge = 1e-10;
    PrototypeKind dpd_prototypes = PrototypeKind::forward_model;
    long dpd_max_delay = 4;
    std::uint64_t dpd_seed_eval = 303;

    // outputs.*
    std::string csv_path = "sweep.csv";

    RateConfig rates_for(std::size_t n_bb) const;
    EncoderConfig encoder_config() const;
    CtKernelSpec kernel_for(double delta) const;
    void validate() const;
};

/// Parse a config file (key = value lines, '#' comments). Throws with the
/// offending key list when unknown keys are present.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config(std::istream& is, const std::string& origin);

/// Print every key with its effective value, in file syntax.
void print_config(const ExperimentConfig& cfg, std::ostream& os);

struct SweepRow {
    std::string example_id;
    double delta = 0.0;
    std::size_t n_train = 0, n_val = 0;
    int max_degree = 0, mem_i = 0, mem_q = 0;
    Eigen::Index taps_per_monomial = 0;
    double ridge = 0.0;
    double train_nmse_db = 0.0, val_nmse_db = 0.0, condition_estimate = 0.0;
    std::uint64_t seed_train = 0, seed_val = 0;
    double wall_seconds = 0.0;
    std::string error;  ///< empty on success
};

inline constexpr const char* kSweepCsvHeader =
    "# adtsim-sweep v1\n"
    "example_id,delta,n_train,n_val,M,m_i,m_q,L_f,lambda,train_nmse_db,val_nmse_db,"
    "condition_estimate,seed_train,seed_val,wall_seconds,error\n";

/// One fit/validate cycle per delta; deterministic given the config. Failed
/// points carry the error message and keep the sweep going.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int jobs = 1);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

/// Plain-text signal files used by the staged CLI subcommands.
void save_signal(const ComplexSignal& x, const std::string& path);
ComplexSignal load_signal(const std::string& path);

}  // namespace adtsim
