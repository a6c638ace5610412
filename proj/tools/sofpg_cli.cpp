/*
 Copyright 2026 The sofpg Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Command-line front end. Links only the C interface of libsofpg.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sofpg/sofpg.h"

namespace {

using json = nlohmann::ordered_json;

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDiverged = 2, kIo = 3 };

struct CliFailure {
    int code;
    std::string message;
};

struct ConfigDeleter {
    void operator()(sofpg_config* c) const { sofpg_config_free(c); }
};
struct ResultDeleter {
    void operator()(sofpg_result* r) const { sofpg_result_free(r); }
};
struct ReportDeleter {
    void operator()(sofpg_report* r) const { sofpg_report_free(r); }
};
using ConfigPtr = std::unique_ptr<sofpg_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<sofpg_result, ResultDeleter>;
using ReportPtr = std::unique_ptr<sofpg_report, ReportDeleter>;

int exit_code_for(sofpg_status s) {
    switch (s) {
        case SOFPG_OK: return kSuccess;
        case SOFPG_ERR_IO: return kIo;
        case SOFPG_ERR_DIVERGENCE:
        case SOFPG_ERR_INSTABILITY: return kDiverged;
        default: return kUsage;
    }
}

void check(sofpg_status s) {
    if (s != SOFPG_OK) {
        throw CliFailure{exit_code_for(s),
                         std::string(sofpg_status_name(s)) + ": " + sofpg_last_error()};
    }
}

/// JSON-safe number: non-finite values become strings.
json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

template <typename Fn>
std::string read_text(Fn&& fn) {
    size_t needed = 0;
    check(fn(nullptr, 0, &needed));
    std::string text(needed + 1, '\0');
    check(fn(text.data(), text.size(), &needed));
    text.resize(needed);
    return text;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliFailure{kIo, "cannot open '" + path + "' for writing"};
    out << text;
    out.close();
    if (!out) throw CliFailure{kIo, "failed writing '" + path + "'"};
}

struct Dims {
    size_t n = 0, m = 0, p = 0;
};

Dims dims_of(const sofpg_config* cfg) {
    Dims d;
    check(sofpg_config_dims(cfg, &d.n, &d.m, &d.p));
    return d;
}

json matrix_json(const std::vector<double>& data, size_t rows, size_t cols) {
    json out = json::array();
    for (size_t i = 0; i < rows; ++i) {
        json row = json::array();
        for (size_t j = 0; j < cols; ++j) row.push_back(num(data[i * cols + j]));
        out.push_back(std::move(row));
    }
    return out;
}

json summary_json(const sofpg_run_summary& s) {
    static const char* const names[] = {"stabilized", "max-iterations", "diverged"};
    json out;
    out["status"] = names[s.status];
    out["seed"] = s.seed;
    out["outer_iterations"] = s.outer_iterations;
    out["gamma_final"] = num(s.gamma_final);
    out["total_trajectories"] = s.total_trajectories;
    out["final_rho"] = num(s.final_rho);
    return out;
}

ConfigPtr open_config(const std::string& path, const std::vector<std::string>& overrides) {
    sofpg_config* raw = nullptr;
    check(sofpg_config_load(path.c_str(), &raw));
    ConfigPtr cfg(raw);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CliFailure{kUsage, "--set expects key=value, got '" + kv + "'"};
        check(sofpg_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    return cfg;
}

std::vector<double> load_policy(const sofpg_config* cfg, const std::string& path) {
    const Dims d = dims_of(cfg);
    std::vector<double> k(d.m * d.p, 0.0);
    if (path.empty()) return k;
    check(sofpg_gain_load(cfg, path.c_str(), k.data(), k.size()));
    return k;
}

int threads_or_default(int threads) { return threads > 0 ? threads : sofpg_default_threads(); }

// ---- subcommands ----

struct StabilizeArgs {
    std::string config;
    std::string out;
    std::string summary;
    std::optional<std::uint64_t> seed;
    bool no_oracle = false;
    int threads = 0;
    std::vector<std::string> overrides;
};

int cmd_stabilize(const StabilizeArgs& a) {
    ConfigPtr cfg = open_config(a.config, a.overrides);
    if (a.no_oracle) check(sofpg_config_set(cfg.get(), "experiment.oracle_logging", "false"));
    std::uint64_t seed = 0;
    check(sofpg_config_seed(cfg.get(), &seed));
    if (a.seed) seed = *a.seed;

    sofpg_result* raw = nullptr;
    check(sofpg_learn(cfg.get(), seed, threads_or_default(a.threads), &raw));
    ResultPtr res(raw);

    sofpg_run_summary s{};
    check(sofpg_result_summary(res.get(), &s));
    const Dims d = dims_of(cfg.get());
    std::vector<double> k(d.m * d.p);
    check(sofpg_result_gain(res.get(), k.data(), k.size()));

    write_output(a.out, read_text([&](char* b, size_t c, size_t* n) {
        return sofpg_result_trace_csv(res.get(), b, c, n);
    }));

    json report = summary_json(s);
    report["gain"] = matrix_json(k, d.m, d.p);
    report["message"] = read_text([&](char* b, size_t c, size_t* n) {
        return sofpg_result_message(res.get(), b, c, n);
    });
    const std::string text = report.dump(2) + "\n";
    if (a.summary.empty()) {
        std::cerr << text;
    } else {
        write_output(a.summary, text);
    }
    return s.status == SOFPG_RUN_STABILIZED ? kSuccess : kDiverged;
}

struct ExperimentArgs {
    std::string preset;
    std::string config;
    std::optional<size_t> runs;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 0;
    bool no_oracle = false;
    std::vector<std::string> overrides;
};

int cmd_experiment(const ExperimentArgs& a) {
    ConfigPtr cfg;
    if (!a.preset.empty()) {
        sofpg_config* raw = nullptr;
        check(sofpg_config_preset(a.preset.c_str(), &raw));
        cfg.reset(raw);
        for (const std::string& kv : a.overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw CliFailure{kUsage, "--set expects key=value"};
            check(sofpg_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
        }
    } else {
        cfg = open_config(a.config, a.overrides);
    }
    if (a.no_oracle) check(sofpg_config_set(cfg.get(), "experiment.oracle_logging", "false"));
    size_t runs = 0;
    check(sofpg_config_runs(cfg.get(), &runs));
    if (a.runs) runs = *a.runs;

    sofpg_report* raw = nullptr;
    check(sofpg_experiment_run(cfg.get(), runs, a.seed, threads_or_default(a.threads),
                               a.out.empty() ? nullptr : a.out.c_str(), &raw));
    ReportPtr rep(raw);

    size_t count = 0, successes = 0, verified = 0;
    double mean_traj = 0.0;
    check(sofpg_report_counts(rep.get(), &count, &successes, &verified, &mean_traj));
    json out;
    out["runs"] = count;
    out["successes"] = successes;
    out["verified_stable"] = verified;
    out["mean_total_trajectories"] = num(mean_traj);
    json list = json::array();
    for (size_t i = 0; i < count; ++i) {
        sofpg_run_summary s{};
        check(sofpg_report_run(rep.get(), i, &s));
        list.push_back(summary_json(s));
    }
    out["per_run"] = std::move(list);
    std::cout << out.dump(2) << "\n";
    return kSuccess;
}

struct EvalArgs {
    std::string config;
    std::string policy;
    double gamma = 1.0;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::vector<std::string> overrides;
};

int cmd_estimate_grad(const EvalArgs& a) {
    ConfigPtr cfg = open_config(a.config, a.overrides);
    const std::vector<double> k = load_policy(cfg.get(), a.policy);
    std::uint64_t seed = 0;
    check(sofpg_config_seed(cfg.get(), &seed));
    if (a.seed) seed = *a.seed;
    const Dims d = dims_of(cfg.get());
    std::vector<double> g(d.m * d.p);
    double norm = 0.0;
    std::uint64_t traj = 0;
    check(sofpg_estimate_gradient(cfg.get(), a.gamma, k.data(), seed, threads_or_default(a.threads),
                                  g.data(), &norm, &traj));
    json out;
    out["gamma"] = a.gamma;
    out["gradient"] = matrix_json(g, d.m, d.p);
    out["fro_norm"] = num(norm);
    out["trajectories"] = traj;
    std::cout << out.dump(2) << "\n";
    return kSuccess;
}

int cmd_eval_cost(const EvalArgs& a) {
    ConfigPtr cfg = open_config(a.config, a.overrides);
    const std::vector<double> k = load_policy(cfg.get(), a.policy);
    std::uint64_t seed = 0;
    check(sofpg_config_seed(cfg.get(), &seed));
    if (a.seed) seed = *a.seed;
    double cost = 0.0;
    check(sofpg_estimate_cost(cfg.get(), a.gamma, k.data(), seed, threads_or_default(a.threads),
                              &cost));
    json out;
    out["gamma"] = a.gamma;
    out["cost_estimate"] = num(cost);
    std::cout << out.dump(2) << "\n";
    return kSuccess;
}

int cmd_oracle(const EvalArgs& a) {
    ConfigPtr cfg = open_config(a.config, a.overrides);
    const std::vector<double> k = load_policy(cfg.get(), a.policy);
    const Dims d = dims_of(cfg.get());
    std::vector<double> g(d.m * d.p, std::nan(""));
    sofpg_oracle_report r{};
    const sofpg_status st = sofpg_oracle_evaluate(cfg.get(), a.gamma, k.data(), &r, g.data());
    json out;
    out["model_free"] = false;
    out["gamma"] = a.gamma;
    out["rho"] = num(r.rho);
    out["damped_rho"] = num(r.damped_rho);
    if (st == SOFPG_ERR_INSTABILITY) {
        out["stable"] = false;
        out["cost"] = "inf";
        std::cout << out.dump(2) << "\n";
        return kDiverged;
    }
    check(st);
    out["stable"] = true;
    out["cost"] = num(r.cost);
    out["gradient"] = matrix_json(g, d.m, d.p);
    out["grad_norm"] = num(r.grad_norm);
    out["margin_bound"] = num(r.margin_bound);
    sofpg_theory_constants tc{};
    check(sofpg_theory_constants_compute(cfg.get(), r.cost, &tc));
    out["theory_constants"] = {{"nu", num(tc.nu)},         {"kappa", num(tc.kappa)},
                               {"varrho", num(tc.varrho)}, {"D", num(tc.d_radius)},
                               {"G", num(tc.g)},           {"L", num(tc.l)},
                               {"G0", num(tc.g0)}};
    std::cout << out.dump(2) << "\n";
    return kSuccess;
}

struct ScheduleArgs {
    std::string config;
    double nu = 0.0;
    std::optional<double> eps, delta0, delta1, zeta, gamma0, j_bar;
    std::vector<std::string> overrides;
};

int cmd_schedule(const ScheduleArgs& a) {
    ConfigPtr cfg = open_config(a.config, a.overrides);
    sofpg_schedule_inputs in{};
    check(sofpg_schedule_defaults(cfg.get(), a.nu, &in));
    if (a.eps) in.eps = *a.eps;
    if (a.delta0) in.delta0 = *a.delta0;
    if (a.delta1) in.delta1 = *a.delta1;
    if (a.zeta) in.zeta = *a.zeta;
    if (a.gamma0) in.gamma0 = *a.gamma0;
    if (a.j_bar) in.j_bar = *a.j_bar;
    sofpg_schedule_report r{};
    check(sofpg_schedule_compute(cfg.get(), &in, &r));
    json out;
    out["inputs"] = {{"nu", num(in.nu)},         {"eps", num(in.eps)},
                     {"delta0", num(in.delta0)}, {"delta1", num(in.delta1)},
                     {"zeta", num(in.zeta)},     {"gamma0", num(in.gamma0)},
                     {"j_bar", num(in.j_bar)}};
    out["nu"] = num(r.nu);
    out["r"] = num(r.r);
    out["tau_e"] = num(r.tau_e);
    out["n_e"] = num(r.n_e);
    out["eta"] = num(r.eta);
    out["tau"] = num(r.tau);
    out["n"] = num(r.n);
    out["m_iters"] = num(r.m_iters);
    out["k_prime"] = num(r.k_prime);
    std::cout << out.dump(2) << "\n";
    return kSuccess;
}

int cmd_preset(const std::string& name, const std::string& out) {
    sofpg_config* raw = nullptr;
    check(sofpg_config_preset(name.c_str(), &raw));
    ConfigPtr cfg(raw);
    write_output(out, read_text([&](char* b, size_t c, size_t* n) {
        return sofpg_config_to_string(cfg.get(), b, c, n);
    }));
    return kSuccess;
}

void add_eval_options(CLI::App* sub, EvalArgs& a, bool seeded) {
    sub->add_option("--config", a.config, "Experiment config file")->required();
    sub->add_option("--gamma", a.gamma, "Discount factor")->required();
    sub->add_option("--policy", a.policy, "Gain file (default: zero gain)");
    sub->add_option("--set", a.overrides, "Override a config entry, section.key=value");
    if (seeded) {
        sub->add_option("--seed", a.seed, "Random seed (default: config seed)");
        sub->add_option("--threads", a.threads, "Worker threads (default: SOFPG_THREADS or 1)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn static output feedback gains with zeroth-order policy gradient", "sofpg"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sofpg_version());

    StabilizeArgs st;
    CLI::App* stabilize = app.add_subcommand("stabilize", "Run one learning episode and emit its trace CSV");
    stabilize->add_option("--config", st.config, "Experiment config file")->required();
    stabilize->add_option("--out", st.out, "Trace CSV path (default: stdout)");
    stabilize->add_option("--summary", st.summary, "Summary JSON path (default: stderr)");
    stabilize->add_option("--seed", st.seed, "Random seed (default: config seed)");
    stabilize->add_option("--threads", st.threads, "Worker threads (default: SOFPG_THREADS or 1)");
    stabilize->add_option("--set", st.overrides, "Override a config entry, section.key=value");
    stabilize->add_flag("--no-oracle", st.no_oracle, "Leave the oracle columns empty");

    ExperimentArgs ex;
    CLI::App* experiment = app.add_subcommand("experiment", "Run seeded repetitions and aggregate them");
    auto* preset_opt = experiment->add_option("--preset", ex.preset, "numerical-example or cart-pole");
    auto* config_opt = experiment->add_option("--config", ex.config, "Experiment config file");
    preset_opt->excludes(config_opt);
    experiment->add_option("--runs", ex.runs, "Number of runs (default: from config)")->check(CLI::PositiveNumber);
    experiment->add_option("--out", ex.out, "Directory for run_<i>.csv, aggregate.csv, summary.csv");
    experiment->add_option("--seed", ex.seed, "Seed of run 0; run i uses seed + i");
    experiment->add_option("--threads", ex.threads, "Worker threads (default: SOFPG_THREADS or 1)");
    experiment->add_option("--set", ex.overrides, "Override a config entry, section.key=value");
    experiment->add_flag("--no-oracle", ex.no_oracle, "Leave the oracle columns empty");

    EvalArgs eg, ec, eo;
    CLI::App* estimate = app.add_subcommand("estimate-grad", "One two-point gradient estimate");
    add_eval_options(estimate, eg, true);
    CLI::App* evalcost = app.add_subcommand("eval-cost", "One empirical cost estimate");
    add_eval_options(evalcost, ec, true);
    CLI::App* oracle = app.add_subcommand("oracle", "Exact cost, gradient and constants (not model-free)");
    add_eval_options(oracle, eo, false);

    ScheduleArgs sc;
    CLI::App* schedule = app.add_subcommand("schedule", "Evaluate the theoretical parameter schedule");
    schedule->add_option("--config", sc.config, "Experiment config file")->required();
    schedule->add_option("--nu", sc.nu, "Sublevel value nu")->required();
    schedule->add_option("--eps", sc.eps, "Target gradient accuracy (default: config eps)");
    schedule->add_option("--delta0", sc.delta0, "Gradient failure probability (default 0.01)");
    schedule->add_option("--delta1", sc.delta1, "Cost failure probability (default 0.1)");
    schedule->add_option("--zeta", sc.zeta, "Discount step fraction (default: config zeta)");
    schedule->add_option("--gamma0", sc.gamma0, "Initial discount (default: config gamma0)");
    schedule->add_option("--j-bar", sc.j_bar, "Uniform cost bound (default: nu)");
    schedule->add_option("--set", sc.overrides, "Override a config entry, section.key=value");

    std::string preset_name, preset_out;
    CLI::App* preset = app.add_subcommand("preset", "Print a built-in experiment config");
    preset->add_option("name", preset_name, "numerical-example or cart-pole")->required();
    preset->add_option("--out", preset_out, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kSuccess : kUsage;
    }

    try {
        if (*stabilize) return cmd_stabilize(st);
        if (*experiment) {
            if (ex.preset.empty() && ex.config.empty()) {
                throw CliFailure{kUsage, "experiment needs --preset or --config"};
            }
            return cmd_experiment(ex);
        }
        if (*estimate) return cmd_estimate_grad(eg);
        if (*evalcost) return cmd_eval_cost(ec);
        if (*oracle) return cmd_oracle(eo);
        if (*schedule) return cmd_schedule(sc);
        if (*preset) return cmd_preset(preset_name, preset_out);
    } catch (const CliFailure& f) {
        std::cerr << "sofpg: " << f.message << "\n";
        return f.code;
    }
    return kUsage;
}
