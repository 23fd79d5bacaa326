// Command-line front end: stimulus generation, chain simulation, model
// fitting/validation, delta sweeps and DPD experiments, driven by a flat
// key=value config file.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "adtsim/experiment.hpp"

using namespace adtsim;

namespace {

ComplexSignal stimulus_for(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t n) {
    return gen_stimulus(n, seed, cfg.peak);
}

ChainFn make_chain(const ExperimentConfig& cfg, double delta) {
    return [cfg, delta](const ComplexSignal& x) {
        return simulate_reference(x, cfg.encoder_config(), cfg.kernel_for(delta),
                                  cfg.rates_for(x.size()))
            .xhat;
    };
}

void report_rounded_delays(const ExperimentConfig& cfg, double delta) {
    if (cfg.kernel_kind != CtKernelSpec::Kind::cubic_delay) return;
    std::array<long, 3> d{};
    const int rounded = cubic_delays_on_grid(cfg.kernel_for(delta), cfg.fine_res, d);
    if (rounded > 0)
        std::cerr << "warning: " << rounded << " kernel delay(s) rounded to the fine grid ("
                  << d[0] << ", " << d[1] << ", " << d[2] << " fine samples)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"all-digital transmitter baseband model workbench"};
    app.require_subcommand(0, 1);

    std::string config_path;
    bool do_print_config = false;
    app.add_option("--config", config_path, "experiment config file");
    app.add_flag("--print-config", do_print_config,
                 "print the effective configuration (defaults + file) and exit");

    std::string out_path, out_xd, out_xhat, model_path, comp_path, xd_path, xhat_path;
    double delta = 0.0;
    bool have_delta = false;
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::size_t n_override = 0;
    int jobs = 1;

    auto* gen = app.add_subcommand("gen-stimulus", "write a seeded stimulus record");
    gen->add_option("--out", out_path, "output signal file")->required();
    gen->add_option("--seed", seed, "stimulus seed (default: data.seed_train)");
    gen->add_option("--n", n_override, "record length (default: data.n_train)");

    auto* sim = app.add_subcommand("simulate", "run the reference chain at one delta");
    sim->add_option("--delta", delta, "kernel delta")->required();
    sim->add_option("--seed", seed, "stimulus seed (default: data.seed_train)");
    sim->add_option("--n", n_override, "record length (default: data.n_train)");
    sim->add_option("--out-xd", out_xd, "encoded-signal output file");
    sim->add_option("--out-xhat", out_xhat, "demodulated-output file");

    auto* fit = app.add_subcommand("fit", "fit the FIR-bank model");
    fit->add_option("--delta", delta, "kernel delta (simulates internally)");
    fit->add_option("--xd", xd_path, "encoded signal file (with --xhat, skips simulation)");
    fit->add_option("--xhat", xhat_path, "reference output file");
    fit->add_option("--out-model", model_path, "model output file")->required();

    auto* val = app.add_subcommand("validate", "validate a model on a fresh record");
    val->add_option("--model", model_path, "model file")->required();
    val->add_option("--delta", delta, "kernel delta")->required();
    val->add_option("--seed", seed, "stimulus seed (default: data.seed_val)");
    val->add_option("--n", n_override, "record length (default: data.n_val)");

    auto* swp = app.add_subcommand("sweep", "run the configured delta sweep, write CSV");
    swp->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
    swp->add_option("--csv", out_path, "override outputs.csv");

    auto* dfit = app.add_subcommand("dpd-fit", "fit the predistorter at one delta");
    dfit->add_option("--delta", delta, "kernel delta")->required();
    dfit->add_option("--out-comp", comp_path, "compensator output file")->required();

    auto* deval = app.add_subcommand("dpd-eval", "closed-loop predistortion comparison");
    deval->add_option("--comp", comp_path, "compensator file")->required();
    deval->add_option("--delta", delta, "kernel delta")->required();
    deval->add_option("--seed", seed, "fresh stimulus seed (default: dpd.seed_eval)");
    deval->add_option("--n", n_override, "record length (default: data.n_val)");

    auto* exp = app.add_subcommand("export-model", "reload a model file and re-emit it");
    exp->add_option("--model", model_path, "model input file")->required();
    exp->add_option("--out", out_path, "re-serialized output file")->required();

    CLI11_PARSE(app, argc, argv);
    have_delta = sim->count("--delta") || fit->count("--delta") || val->count("--delta") ||
                 dfit->count("--delta") || deval->count("--delta");
    have_seed = gen->count("--seed") || sim->count("--seed") || val->count("--seed") ||
                deval->count("--seed");
    (void)have_delta;

    try {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = parse_config_file(config_path);

        if (do_print_config) {
            print_config(cfg, std::cout);
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << "error: no subcommand given (see --help)\n";
            return 1;
        }
        const bool needs_config = !gen->parsed() || !config_path.empty();
        if (config_path.empty() && !exp->parsed())
            throw std::runtime_error("--config is required for this subcommand");
        (void)needs_config;

        if (gen->parsed()) {
            const std::size_t n = n_override ? n_override : cfg.n_train;
            const std::uint64_t s = have_seed ? seed : cfg.seed_train;
            save_signal(stimulus_for(cfg, s, n), out_path);
            std::cout << "wrote " << out_path << " (n=" << n << ", seed=" << s << ")\n";
        } else if (sim->parsed()) {
            const std::size_t n = n_override ? n_override : cfg.n_train;
            const std::uint64_t s = have_seed ? seed : cfg.seed_train;
            report_rounded_delays(cfg, delta);
            const ComplexSignal x = stimulus_for(cfg, s, n);
            const ReferenceRun run = simulate_reference(x, cfg.encoder_config(),
                                                        cfg.kernel_for(delta), cfg.rates_for(n));
            if (run.overload_count)
                std::cerr << "warning: encoder overloaded on " << run.overload_count
                          << " samples\n";
            if (!out_xd.empty()) save_signal(run.xd, out_xd);
            if (!out_xhat.empty()) save_signal(run.xhat, out_xhat);
            std::cout << "simulated delta=" << delta << " n=" << n << " seed=" << s << "\n";
        } else if (fit->parsed()) {
            ComplexSignal xd, xhat;
            if (!xd_path.empty() || !xhat_path.empty()) {
                if (xd_path.empty() || xhat_path.empty())
                    throw std::runtime_error("fit: --xd and --xhat must be given together");
                xd = load_signal(xd_path);
                xhat = load_signal(xhat_path);
            } else {
                if (!fit->count("--delta"))
                    throw std::runtime_error("fit: need either --delta or --xd/--xhat");
                report_rounded_delays(cfg, delta);
                const ComplexSignal x = stimulus_for(cfg, cfg.seed_train, cfg.n_train);
                ReferenceRun run = simulate_reference(x, cfg.encoder_config(),
                                                      cfg.kernel_for(delta),
                                                      cfg.rates_for(cfg.n_train));
                xd = std::move(run.xd);
                xhat = std::move(run.xhat);
            }
            const MonomialBasis basis = enumerate_monomials(cfg.max_degree, cfg.mem_i, cfg.mem_q);
            FitConfig fc;
            fc.taps_per_monomial = cfg.taps_per_monomial;
            fc.ridge = cfg.ridge;
            fc.solver = cfg.solver;
            const FitResult res = fit_model(xd, xhat, basis, cfg.osr, fc);
            res.model.save_file(model_path);
            std::printf("fit: unknowns=%zu train_nmse_db=%.6f cond=%.3g rank_deficient=%d\n",
                        res.report.unknowns, res.report.train_nmse_db,
                        res.report.condition_estimate, res.report.rank_deficient ? 1 : 0);
        } else if (val->parsed()) {
            const FirBankModel model = FirBankModel::load_file(model_path);
            const std::size_t n = n_override ? n_override : cfg.n_val;
            const std::uint64_t s = have_seed ? seed : cfg.seed_val;
            const ComplexSignal x = stimulus_for(cfg, s, n);
            const ReferenceRun run = simulate_reference(x, cfg.encoder_config(),
                                                        cfg.kernel_for(delta), cfg.rates_for(n));
            std::printf("val_nmse_db=%.17g\n", validate(model, run.xd, run.xhat));
        } else if (swp->parsed()) {
            const std::string csv = out_path.empty() ? cfg.csv_path : out_path;
            const auto rows = run_sweep(cfg, jobs);
            std::ofstream os(csv);
            if (!os) throw std::runtime_error("cannot open '" + csv + "' for writing");
            write_sweep_csv(rows, os);
            int failed = 0;
            for (const auto& r : rows)
                if (!r.error.empty()) ++failed;
            std::cout << "wrote " << csv << " (" << rows.size() << " rows, " << failed
                      << " failed)\n";
            if (failed) return 2;
        } else if (dfit->parsed()) {
            report_rounded_delays(cfg, delta);
            const ComplexSignal x = stimulus_for(cfg, cfg.seed_train, cfg.n_train);
            const MonomialBasis basis =
                enumerate_monomials(cfg.dpd_max_degree, cfg.dpd_mem_i, cfg.dpd_mem_q);
            DpdFitConfig dc;
            dc.prototypes = cfg.dpd_prototypes;
            dc.taps_per_monomial = cfg.dpd_taps;
            dc.ridge = cfg.dpd_ridge;
            dc.max_delay = cfg.dpd_max_delay;
            const Compensator comp =
                fit_compensator(x, make_chain(cfg, delta), basis, dc, cfg.encoder_config(),
                                cfg.rates_for(cfg.n_train));
            comp.save_file(comp_path);
            std::printf("dpd-fit: delay=%ld |gain|=%.6g |X|=%.6g\n", comp.align_delay,
                        std::abs(comp.align_gain), comp.coeff.norm());
        } else if (deval->parsed()) {
            const Compensator comp = Compensator::load_file(comp_path);
            const std::size_t n = n_override ? n_override : cfg.n_val;
            const std::uint64_t s = have_seed ? seed : cfg.dpd_seed_eval;
            const ComplexSignal x = stimulus_for(cfg, s, n);
            const DpdEval ev = eval_compensated(x, comp, make_chain(cfg, delta));
            std::printf("nmse_plain_db=%.6f nmse_dpd_db=%.6f improvement_db=%.6f clipped=%zu\n",
                        ev.nmse_plain_db, ev.nmse_dpd_db, ev.nmse_plain_db - ev.nmse_dpd_db,
                        ev.clipped);
        } else if (exp->parsed()) {
            const FirBankModel model = FirBankModel::load_file(model_path);
            model.save_file(out_path);
            std::cout << "wrote " << out_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
