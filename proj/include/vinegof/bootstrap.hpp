#pragma once

// Parametric-bootstrap p-values and the Monte Carlo size/power study: for
// each replication, data are drawn from a model, the null structure is
// refitted, and the statistic recomputed; empirical tail frequencies with
// the >= tie convention give the p-values. Replications address disjoint
// counter-based substreams, so results are bit-identical for a given seed
// regardless of the number of workers.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "vinegof/gof_tests.hpp"
#include "vinegof/rvine_fit.hpp"

namespace vinegof {

struct TestReport {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    int B = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int d = 0;
};

struct BootstrapOptions {
    int approx_factor = 10;        // ECP surrogate sample size factor
    double min_success = 0.95;     // required fraction of usable replications
};

namespace boot_detail {

inline FitResult refit(const RVineSpec& h0, const SampleMatrix& data) {
    return fit_mle(fit_sequential_clamped(h0, data), data);
}

inline double tail_pvalue(const std::vector<double>& reference, double observed) {
    long hits = 0;
    for (double t : reference) hits += (t >= observed) ? 1 : 0;
    const double b = static_cast<double>(reference.size());
    return std::max(1.0 / b, static_cast<double>(hits) / b);
}

} // namespace boot_detail

// Bootstrap p-values for several statistics in one pass: the observed
// statistics are computed after refitting the null structure on the data;
// each replication simulates from that fitted model, refits, and recomputes.
inline std::vector<TestReport> bootstrap_pvalues(const std::vector<GofTest>& tests, const RVineSpec& spec_h0,
                                                 const SampleMatrix& data, int B, std::uint64_t seed,
                                                 const BootstrapOptions& opts = {}) {
    if (B < 2) throw DomainError("bootstrap_pvalues: B must be at least 2");
    const int n = data.n();
    const auto fitted = boot_detail::refit(spec_h0, data);
    const EvalPlan plan = build_plan(fitted.spec);

    GofContext ctx;
    ctx.seed = seed;
    ctx.approx_factor = opts.approx_factor;
    ctx.ecp_stream = rng::substream(rng::Purpose::ecp_surrogate, 0, 0);
    const auto observed = compute_gof_statistics(tests, fitted.spec, data, ctx, &plan);

    std::map<GofTest, std::vector<double>> reference;
    int failures = 0;
    for (int r = 1; r <= B; ++r) {
        try {
            const auto sim = simulate(fitted.spec, n, seed, rng::substream(rng::Purpose::bootstrap, 0,
                                                                           static_cast<std::uint64_t>(r)),
                                      &plan);
            const auto refit = boot_detail::refit(spec_h0, sim);
            GofContext rctx = ctx;
            rctx.ecp_stream = rng::substream(rng::Purpose::ecp_surrogate, 0, static_cast<std::uint64_t>(r));
            const auto stats = compute_gof_statistics(tests, refit.spec, sim, rctx, &plan);
            bool ok = true;
            for (const auto& [t, v] : stats) ok = ok && !std::isnan(v);
            if (!ok) { ++failures; continue; }
            for (const auto& [t, v] : stats) reference[t].push_back(v);
        } catch (const std::exception&) {
            ++failures;
        }
    }
    const int successes = B - failures;
    if (successes < static_cast<int>(std::ceil(opts.min_success * B)))
        throw StudyError("bootstrap_pvalues: only " + std::to_string(successes) + " of " + std::to_string(B) +
                         " replications usable");

    std::vector<TestReport> reports;
    for (GofTest t : tests) {
        TestReport rep;
        rep.test = gof_test_name(t);
        rep.statistic = observed.at(t);
        rep.p_value = boot_detail::tail_pvalue(reference.at(t), rep.statistic);
        rep.B = successes;
        rep.seed = seed;
        rep.n = n;
        rep.d = data.d();
        reports.push_back(std::move(rep));
    }
    return reports;
}

inline TestReport bootstrap_pvalue(GofTest test, const RVineSpec& spec_h0, const SampleMatrix& data, int B,
                                   std::uint64_t seed, const BootstrapOptions& opts = {}) {
    return bootstrap_pvalues({test}, spec_h0, data, B, seed, opts).front();
}

// ---- size/power study ---------------------------------------------------------

struct StudyConfig {
    RVineSpec true_model;
    std::vector<RVineSpec> alternatives;
    int n = 1000;
    int B = 100;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::vector<GofTest> tests;
    int workers = 1;
    int approx_factor = 10;
};

struct StudyCell {
    std::string model;             // "true" or "altK"
    double estimate = 0.0;         // size for the true model, power otherwise
    std::vector<double> p_values;  // one per usable replication
    int failures = 0;
};

struct StudyResult {
    int n = 0;
    int B = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::map<GofTest, std::vector<StudyCell>> cells;  // per test, models in config order
};

namespace boot_detail {

// One replication of one model: simulate, refit the null structure, compute
// all statistics. Returns NaNs on failure.
template <class StatFn>
std::map<GofTest, double> study_replication(const StudyConfig& config, const EvalPlan& true_plan,
                                            const std::vector<EvalPlan>& alt_plans, int model_index, int r,
                                            StatFn&& stat_fn) {
    const RVineSpec& model = model_index == 0
                                 ? config.true_model
                                 : config.alternatives[static_cast<std::size_t>(model_index - 1)];
    const EvalPlan& plan = model_index == 0 ? true_plan : alt_plans[static_cast<std::size_t>(model_index - 1)];
    const auto data = simulate(model, config.n, config.seed,
                               rng::substream(rng::Purpose::simulate, static_cast<std::uint64_t>(model_index),
                                              static_cast<std::uint64_t>(r)),
                               &plan);
    const auto fitted = refit(config.true_model, data);
    return stat_fn(fitted.spec, data, model_index, r);
}

template <class StatFn>
StudyResult run_study(const StudyConfig& config, StatFn&& stat_fn) {
    if (config.B < 2) throw DomainError("size_power_study: B must be at least 2");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw DomainError("size_power_study: alpha outside (0,1)");
    if (config.tests.empty()) throw DomainError("size_power_study: no tests requested");
    const int n_models = 1 + static_cast<int>(config.alternatives.size());
    const EvalPlan true_plan = build_plan(config.true_model);
    std::vector<EvalPlan> alt_plans;
    for (const auto& alt : config.alternatives) {
        if (alt.dim() != config.true_model.dim())
            throw DomainError("size_power_study: alternative dimension mismatch");
        alt_plans.push_back(build_plan(alt));
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    // statistics indexed [model][replication][test]
    std::vector<std::vector<std::map<GofTest, double>>> stats(
        static_cast<std::size_t>(n_models),
        std::vector<std::map<GofTest, double>>(static_cast<std::size_t>(config.B)));

    std::atomic<int> next_task{0};
    const int total_tasks = n_models * config.B;
    auto worker = [&]() {
        for (;;) {
            const int task = next_task.fetch_add(1);
            if (task >= total_tasks) return;
            const int model_index = task / config.B;
            const int r = task % config.B + 1;
            auto& slot = stats[static_cast<std::size_t>(model_index)][static_cast<std::size_t>(r - 1)];
            try {
                slot = study_replication(config, true_plan, alt_plans, model_index, r, stat_fn);
                for (auto& [t, v] : slot)
                    if (std::isnan(v)) throw NumericalError("NaN statistic");
            } catch (const std::exception&) {
                slot.clear();
                for (GofTest t : config.tests) slot[t] = nan;
            }
        }
    };
    const int W = std::max(1, config.workers);
    if (W == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < W; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    StudyResult result;
    result.n = config.n;
    result.B = config.B;
    result.alpha = config.alpha;
    result.seed = config.seed;

    for (GofTest t : config.tests) {
        // reference sample: usable replications of the true model
        std::vector<double> reference;
        for (int r = 0; r < config.B; ++r) {
            const double v = stats[0][static_cast<std::size_t>(r)].at(t);
            if (!std::isnan(v)) reference.push_back(v);
        }
        if (static_cast<int>(reference.size()) < static_cast<int>(std::ceil(0.95 * config.B)))
            throw StudyError("size_power_study: too many failed replications of the true model");

        std::vector<StudyCell> cells;
        for (int m = 0; m < n_models; ++m) {
            StudyCell cell;
            cell.model = m == 0 ? "true" : "alt" + std::to_string(m);
            for (int r = 0; r < config.B; ++r) {
                const double v = stats[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)].at(t);
                if (std::isnan(v)) {
                    ++cell.failures;
                    continue;
                }
                cell.p_values.push_back(tail_pvalue(reference, v));
            }
            if (cell.p_values.empty())
                throw StudyError("size_power_study: no usable replications for model " + cell.model);
            long rejections = 0;
            for (double p : cell.p_values) rejections += (p <= config.alpha) ? 1 : 0;
            cell.estimate = static_cast<double>(rejections) / static_cast<double>(cell.p_values.size());
            cells.push_back(std::move(cell));
        }
        result.cells[t] = std::move(cells);
    }
    return result;
}

} // namespace boot_detail

// Size/power study following the shared-reference procedure: every model's
// statistics are referenced against the true-model bootstrap sample.
inline StudyResult size_power_study(const StudyConfig& config) {
    return boot_detail::run_study(config, [&](const RVineSpec& fitted, const SampleMatrix& data, int model_index,
                                              int r) {
        GofContext ctx;
        ctx.seed = config.seed;
        ctx.approx_factor = config.approx_factor;
        ctx.ecp_stream = rng::substream(rng::Purpose::ecp_surrogate, static_cast<std::uint64_t>(model_index),
                                        static_cast<std::uint64_t>(r));
        return compute_gof_statistics(config.tests, fitted, data, ctx);
    });
}

// ---- Monte Carlo KLIC ----------------------------------------------------------

struct KlicResult {
    double estimate = 0.0;
    double se = 0.0;
    long n_draws = 0;
};

// KLIC(c0, c_alt) = E0[ln c0(U)] - E0[ln c_alt(U)] by Monte Carlo under the
// true model.
inline KlicResult klic_mc(const RVineSpec& true_spec, const RVineSpec& alt_spec, int N, std::uint64_t seed) {
    if (N < 2) throw DomainError("klic_mc: need at least two draws");
    if (true_spec.dim() != alt_spec.dim()) throw DomainError("klic_mc: dimension mismatch");
    const auto draws = simulate(true_spec, N, seed);
    const auto ll_true = loglik(true_spec, draws).per_obs;
    const auto ll_alt = loglik(alt_spec, draws).per_obs;
    std::vector<double> diff(static_cast<std::size_t>(N));
    for (int t = 0; t < N; ++t) diff[static_cast<std::size_t>(t)] = ll_true[t] - ll_alt[t];
    std::sort(diff.begin(), diff.end());
    double mean = 0.0;
    for (double v : diff) mean += v;
    mean /= N;
    double ss = 0.0;
    for (double v : diff) ss += (v - mean) * (v - mean);
    KlicResult res;
    res.estimate = mean;
    res.se = std::sqrt(ss / (N - 1.0)) / std::sqrt(static_cast<double>(N));
    res.n_draws = N;
    return res;
}

} // namespace vinegof
