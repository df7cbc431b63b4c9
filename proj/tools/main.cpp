// Command-line front end: simulate from a model, fit parameters, run
// goodness-of-fit tests with bootstrap p-values, run a size/power study,
// estimate the KLIC between two models, and validate model files.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vinegof/bootstrap.hpp"
#include "vinegof/io.hpp"

using namespace vinegof;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_format = 2;
constexpr int exit_numeric = 3;

RVineSpec load_valid_model(const std::string& path) {
    auto spec = load_model(path);
    const auto violations = validate(spec);
    if (!violations.empty()) {
        std::string msg = path + ": invalid model:";
        for (const auto& v : violations) {
            msg += "\n  ";
            if (v.row > 0) msg += "cell (" + std::to_string(v.row) + "," + std::to_string(v.col) + "): ";
            else if (v.col > 0) msg += "column " + std::to_string(v.col) + ": ";
            msg += v.message;
        }
        throw FormatError(msg);
    }
    return spec;
}

json report_to_json(const TestReport& r) {
    return json{{"test", r.test},     {"statistic", r.statistic}, {"p_value", r.p_value}, {"B", r.B},
                {"seed", r.seed},     {"n", r.n},                 {"d", r.d}};
}

int cmd_simulate(const std::string& model_path, int n, std::uint64_t seed, const std::string& out) {
    const auto spec = load_valid_model(model_path);
    const auto sample = simulate(spec, n, seed);
    write_csv(out, sample.u);
    std::printf("rows: %d\ncolumns: %d\nseed: %llu\nout: %s\n", sample.n(), sample.d(),
                static_cast<unsigned long long>(seed), out.c_str());
    return exit_ok;
}

int cmd_fit(const std::string& model_path, const std::string& data_path, const std::string& out,
            const std::string& method) {
    const auto structure = load_valid_model(model_path);
    const auto data = read_csv(data_path);
    if (data.d() != structure.dim()) throw FormatError("data dimension does not match the model");
    if (data.clamped > 0) std::printf("clamped_entries: %ld\n", data.clamped);
    RVineSpec fitted;
    if (method == "seq") {
        fitted = fit_sequential(structure, data);
        std::printf("method: seq\nloglik: %.6f\n", loglik(fitted, data).total);
    } else {
        const auto res = fit_mle(fit_sequential_clamped(structure, data), data);
        fitted = res.spec;
        std::printf("method: mle\nloglik: %.6f\nconverged: %s\niterations: %d\n", res.loglik,
                    res.converged ? "true" : "false", res.iterations);
    }
    save_json(out, model_to_json(fitted));
    std::printf("out: %s\n", out.c_str());
    return exit_ok;
}

int cmd_gof(const std::string& model_path, const std::string& data_path, const std::string& test, int B,
            std::uint64_t seed, const std::string& out) {
    const auto spec = load_valid_model(model_path);
    const auto data = read_csv(data_path);
    if (data.d() != spec.dim()) throw FormatError("data dimension does not match the model");
    const std::vector<GofTest> tests = test == "all" ? all_gof_tests() : std::vector<GofTest>{parse_gof_test(test)};
    const auto reports = bootstrap_pvalues(tests, spec, data, B, seed);
    std::vector<double> pvals;
    json jreports = json::array();
    for (const auto& r : reports) {
        pvals.push_back(r.p_value);
        jreports.push_back(report_to_json(r));
        std::printf("%s.statistic: %.10g\n%s.p_value: %.10g\n", r.test.c_str(), r.statistic, r.test.c_str(),
                    r.p_value);
    }
    const double hybrid = hybrid_pvalue(pvals);
    std::printf("hybrid_p_value: %.10g\n", hybrid);
    save_json(out, json{{"reports", jreports}, {"hybrid_p_value", hybrid}});
    std::printf("out: %s\n", out.c_str());
    return exit_ok;
}

StudyConfig parse_study_config(const json& j) {
    StudyConfig config;
    if (!j.contains("true_model")) throw FormatError("study config: missing true_model");
    config.true_model = model_from_json(j.at("true_model"));
    if (j.contains("alternatives"))
        for (const auto& alt : j.at("alternatives")) config.alternatives.push_back(model_from_json(alt));
    config.n = j.value("n", 1000);
    config.B = j.value("B", 100);
    config.alpha = j.value("alpha", 0.05);
    config.seed = j.value("seed", std::uint64_t{1});
    config.approx_factor = j.value("approx_factor", 10);
    if (!j.contains("tests")) throw FormatError("study config: missing tests");
    for (const auto& name : j.at("tests")) config.tests.push_back(parse_gof_test(name.get<std::string>()));
    if (!validate(config.true_model).empty()) throw FormatError("study config: invalid true model");
    for (const auto& spec : config.alternatives)
        if (!validate(spec).empty()) throw FormatError("study config: invalid alternative model");
    return config;
}

int cmd_power_study(const std::string& config_path, const std::string& out, int workers) {
    auto config = parse_study_config(load_json(config_path));
    config.workers = workers;
    const auto res = size_power_study(config);
    json jtests;
    for (const auto& [test, cells] : res.cells) {
        json jcells = json::array();
        for (const auto& cell : cells) {
            jcells.push_back(json{{"model", cell.model},
                                  {"estimate", cell.estimate},
                                  {"failures", cell.failures},
                                  {"p_values", cell.p_values}});
            std::printf("%s.%s: %.10g\n", gof_test_name(test).c_str(), cell.model.c_str(), cell.estimate);
        }
        jtests[gof_test_name(test)] = std::move(jcells);
    }
    save_json(out, json{{"n", res.n},
                        {"B", res.B},
                        {"alpha", res.alpha},
                        {"seed", res.seed},
                        {"tests", jtests}});
    std::printf("out: %s\n", out.c_str());
    return exit_ok;
}

int cmd_klic(const std::string& true_path, const std::string& alt_path, int n_draws, std::uint64_t seed,
             const std::string& out) {
    const auto true_spec = load_valid_model(true_path);
    const auto alt_spec = load_valid_model(alt_path);
    const auto res = klic_mc(true_spec, alt_spec, n_draws, seed);
    std::printf("klic: %.10g\nse: %.10g\ndraws: %ld\n", res.estimate, res.se, res.n_draws);
    if (!out.empty())
        save_json(out, json{{"klic", res.estimate}, {"se", res.se}, {"draws", res.n_draws}, {"seed", seed}});
    return exit_ok;
}

int cmd_validate(const std::string& model_path) {
    const auto spec = load_model(model_path);
    const auto violations = validate(spec);
    if (violations.empty()) {
        std::printf("valid: true\nd: %d\nparameters: %d\n", spec.dim(), spec.param_count());
        return exit_ok;
    }
    std::printf("valid: false\n");
    for (const auto& v : violations) {
        if (v.row > 0) std::printf("violation: cell (%d,%d): %s\n", v.row, v.col, v.message.c_str());
        else if (v.col > 0) std::printf("violation: column %d: %s\n", v.col, v.message.c_str());
        else std::printf("violation: %s\n", v.message.c_str());
    }
    return exit_format;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vine copula modeling and goodness-of-fit toolkit"};
    app.require_subcommand(1);

    std::string model_path, data_path, out_path, config_path, true_path, alt_path;
    std::string test_name = "all", method = "mle";
    int n = 1000, B = 200, n_draws = 100000, workers = 1;
    std::uint64_t seed = 1;

    auto* sim = app.add_subcommand("simulate", "draw a sample from a model");
    sim->add_option("--model", model_path)->required();
    sim->add_option("--n", n)->required();
    sim->add_option("--seed", seed)->required();
    sim->add_option("--out", out_path)->required();

    auto* fit = app.add_subcommand("fit", "estimate parameters on data (structure and families fixed)");
    fit->add_option("--model", model_path)->required();
    fit->add_option("--data", data_path)->required();
    fit->add_option("--out", out_path)->required();
    fit->add_option("--method", method)->check(CLI::IsMember({"seq", "mle"}));

    auto* gof = app.add_subcommand("gof", "bootstrap goodness-of-fit tests");
    gof->add_option("--model", model_path)->required();
    gof->add_option("--data", data_path)->required();
    gof->add_option("--test", test_name, "test id or 'all'");
    gof->add_option("--B", B)->required();
    gof->add_option("--seed", seed)->required();
    gof->add_option("--out", out_path)->required();

    auto* study = app.add_subcommand("power-study", "Monte Carlo size/power study");
    study->add_option("--config", config_path)->required();
    study->add_option("--out", out_path)->required();
    study->add_option("--workers", workers)->check(CLI::PositiveNumber);

    auto* klic = app.add_subcommand("klic", "Monte Carlo KLIC between two models");
    klic->add_option("--true", true_path)->required();
    klic->add_option("--alt", alt_path)->required();
    klic->add_option("--N", n_draws)->required();
    klic->add_option("--seed", seed)->required();
    klic->add_option("--out", out_path);

    auto* val = app.add_subcommand("validate", "check a model file");
    val->add_option("--model", model_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(model_path, n, seed, out_path);
        if (fit->parsed()) return cmd_fit(model_path, data_path, out_path, method);
        if (gof->parsed()) return cmd_gof(model_path, data_path, test_name, B, seed, out_path);
        if (study->parsed()) return cmd_power_study(config_path, out_path, workers);
        if (klic->parsed()) return cmd_klic(true_path, alt_path, n_draws, seed, out_path);
        if (val->parsed()) return cmd_validate(model_path);
    } catch (const FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_format;
    } catch (const DomainError& e) {
        // bad test names or invalid argument combinations are usage errors
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_numeric;
    }
    return exit_usage;
}
