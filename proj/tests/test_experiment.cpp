#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "adtsim/experiment.hpp"

using namespace adtsim;

namespace {

// Desk-scale sweep config shared by the tests here.
ExperimentConfig small_cfg() {
    ExperimentConfig cfg;
    cfg.example_id = "test";
    cfg.osr = 2;
    cfg.fine_res = 10;
    cfg.max_degree = 2;
    cfg.mem_i = cfg.mem_q = 2;
    cfg.taps_per_monomial = 8;
    cfg.n_train = 1024;
    cfg.n_val = 512;
    cfg.seed_train = 11;
    cfg.seed_val = 12;
    cfg.deltas = {0.01, 0.05};
    return cfg;
}

}  // namespace

TEST_CASE("config print/parse round trip") {
    ExperimentConfig cfg = small_cfg();
    cfg.encoder_kind = EncoderKind::quantizer;
    cfg.interpolation = InterpKind::hold;
    cfg.kernel_kind = CtKernelSpec::Kind::separable_quad;
    cfg.solver = Solver::qr;
    cfg.dpd_prototypes = PrototypeKind::lowpass;
    std::stringstream ss;
    print_config(cfg, ss);
    const auto back = parse_config(ss, "<round-trip>");
    std::stringstream ss2;
    print_config(back, ss2);
    std::stringstream ss1;
    print_config(cfg, ss1);
    CHECK(ss1.str() == ss2.str());
}

TEST_CASE("unknown keys are a hard error listing the offenders") {
    std::stringstream ss;
    ss << "rates.K = 4\n";
    ss << "model.Lf = 16\n";       // typo
    ss << "encoder.kinds = dsm1\n";  // typo
    CHECK_THROWS_WITH_AS(parse_config(ss, "<mem>"),
                         doctest::Contains("model.Lf"), std::runtime_error);
    std::stringstream ss2;
    ss2 << "encoder.kinds = dsm1\n";
    CHECK_THROWS_WITH_AS(parse_config(ss2, "<mem>"),
                         doctest::Contains("encoder.kinds"), std::runtime_error);
}

TEST_CASE("missing config file names the path") {
    CHECK_THROWS_WITH_AS(parse_config_file("/nonexistent/path.cfg"),
                         doctest::Contains("/nonexistent/path.cfg"), std::runtime_error);
}

TEST_CASE("default delta grids cover the studied intervals") {
    std::stringstream ss;
    ss << "kernel.kind = cubic_delay\n";
    auto cfg = parse_config(ss, "<mem>");
    REQUIRE(cfg.deltas.size() == 8);
    CHECK(cfg.deltas.front() == doctest::Approx(0.001));
    CHECK(cfg.deltas.back() == doctest::Approx(0.2));
    std::stringstream ss2;
    ss2 << "kernel.kind = separable_quad\n";
    cfg = parse_config(ss2, "<mem>");
    REQUIRE(cfg.deltas.size() == 8);
    CHECK(cfg.deltas.front() == doctest::Approx(0.001));
    CHECK(cfg.deltas.back() == doctest::Approx(0.015));
}

TEST_CASE("sweep is deterministic and composition matches the staged pipeline") {
    ExperimentConfig cfg = small_cfg();
    const auto rows1 = run_sweep(cfg, 1);
    const auto rows2 = run_sweep(cfg, 2);
    REQUIRE(rows1.size() == 2);
    REQUIRE(rows2.size() == 2);
    for (std::size_t i = 0; i < rows1.size(); ++i) {
        CHECK(rows1[i].error.empty());
        CHECK(rows1[i].train_nmse_db == rows2[i].train_nmse_db);
        CHECK(rows1[i].val_nmse_db == rows2[i].val_nmse_db);
        CHECK(rows1[i].condition_estimate == rows2[i].condition_estimate);
    }

    // Staged: simulate -> fit -> validate with the same seeds must reproduce the
    // sweep's numbers exactly.
    const double delta = cfg.deltas[1];
    const auto enc = cfg.encoder_config();
    const auto kernel = cfg.kernel_for(delta);
    const auto train =
        simulate_reference(gen_stimulus(cfg.n_train, cfg.seed_train, cfg.peak), enc, kernel,
                           cfg.rates_for(cfg.n_train));
    FitConfig fc;
    fc.taps_per_monomial = cfg.taps_per_monomial;
    fc.ridge = cfg.ridge;
    fc.solver = cfg.solver;
    const auto fit =
        fit_model(train.xd, train.xhat, enumerate_monomials(cfg.max_degree, cfg.mem_i, cfg.mem_q),
                  cfg.osr, fc);
    const auto val = simulate_reference(gen_stimulus(cfg.n_val, cfg.seed_val, cfg.peak), enc,
                                        kernel, cfg.rates_for(cfg.n_val));
    CHECK(validate(fit.model, val.xd, val.xhat) == rows1[1].val_nmse_db);
    CHECK(fit.report.train_nmse_db == rows1[1].train_nmse_db);
}

TEST_CASE("sweep rows survive per-point failures") {
    ExperimentConfig cfg = small_cfg();
    cfg.taps_per_monomial = 1 << 20;  // invalid L_f > n_d for every point
    const auto rows = run_sweep(cfg, 1);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) CHECK(!r.error.empty());
}

TEST_CASE("csv emission carries the versioned header and the error column") {
    ExperimentConfig cfg = small_cfg();
    cfg.deltas = {0.02};
    const auto rows = run_sweep(cfg, 1);
    std::stringstream ss;
    write_sweep_csv(rows, ss);
    const std::string text = ss.str();
    CHECK(text.rfind("# adtsim-sweep v1\n", 0) == 0);
    CHECK(text.find("example_id,delta,") != std::string::npos);
    CHECK(text.find("test,") != std::string::npos);

    // Byte-identical re-run apart from the wall_seconds column.
    const auto rows2 = run_sweep(cfg, 1);
    std::stringstream ss2;
    write_sweep_csv(rows2, ss2);
    auto strip_wall = [](std::string s) {
        // wall_seconds is the second-to-last field of each data row
        std::istringstream is(s);
        std::string line, out;
        while (std::getline(is, line)) {
            if (!line.empty() && line[0] != '#' && line.find(',') != std::string::npos) {
                const auto last = line.rfind(',');
                const auto prev = line.rfind(',', last - 1);
                line.erase(prev, last - prev);
            }
            out += line + "\n";
        }
        return out;
    };
    CHECK(strip_wall(ss.str()) == strip_wall(ss2.str()));
}

TEST_CASE("signal files round trip exactly") {
    const auto x = gen_stimulus(64, 3, 0.9);
    const std::string path = "test_signal_roundtrip.tmp";
    save_signal(x, path);
    const auto back = load_signal(path);
    std::remove(path.c_str());
    REQUIRE(back.size() == x.size());
    CHECK(back.rate == x.rate);
    for (std::size_t n = 0; n < x.size(); ++n) CHECK(back.samples[n] == x.samples[n]);
    CHECK_THROWS_WITH_AS(load_signal("missing_signal_file.tmp"),
                         doctest::Contains("missing_signal_file.tmp"), std::runtime_error);
}

TEST_CASE("config validation catches degenerate setups") {
    ExperimentConfig cfg = small_cfg();
    cfg.deltas.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_cfg();
    cfg.seed_val = cfg.seed_train;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
