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

#include "sofpg/sofpg.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "sofpg/config.hpp"
#include "sofpg/error.hpp"
#include "sofpg/estimator.hpp"
#include "sofpg/experiment.hpp"
#include "sofpg/oracle.hpp"
#include "sofpg/parallel.hpp"
#include "sofpg/stabilizer.hpp"

struct sofpg_config {
    sofpg::ExperimentConfig cfg;
};

struct sofpg_result {
    sofpg::StabilizationResult result;
    std::uint64_t seed;
    double final_rho;
};

struct sofpg_report {
    sofpg::AggregateReport report;
};

namespace {

thread_local std::string g_last_error;

sofpg_status status_of(sofpg::ErrorKind kind) {
    switch (kind) {
        case sofpg::ErrorKind::Dimension: return SOFPG_ERR_DIMENSION;
        case sofpg::ErrorKind::Domain: return SOFPG_ERR_DOMAIN;
        case sofpg::ErrorKind::Instability: return SOFPG_ERR_INSTABILITY;
        case sofpg::ErrorKind::Divergence: return SOFPG_ERR_DIVERGENCE;
        case sofpg::ErrorKind::Numerical: return SOFPG_ERR_NUMERICAL;
        case sofpg::ErrorKind::Io: return SOFPG_ERR_IO;
    }
    return SOFPG_ERR_INTERNAL;
}

sofpg_status fail(sofpg_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

/// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
sofpg_status guarded(Fn&& fn) noexcept {
    try {
        g_last_error.clear();
        return fn();
    } catch (const sofpg::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SOFPG_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SOFPG_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SOFPG_ERR_INTERNAL, "unknown error");
    }
}

sofpg_status copy_text(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
    if (needed != nullptr) *needed = text.size();
    if (buffer != nullptr && capacity > 0) {
        const size_t n = std::min(capacity - 1, text.size());
        std::memcpy(buffer, text.data(), n);
        buffer[n] = '\0';
    }
    return SOFPG_OK;
}

sofpg::Matrix gain_from(const sofpg::ExperimentConfig& cfg, const double* data) {
    const auto m = static_cast<Eigen::Index>(cfg.plant.input_dim());
    const auto p = static_cast<Eigen::Index>(cfg.plant.output_dim());
    sofpg::Matrix k(m, p);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) k(i, j) = data[i * p + j];
    }
    return k;
}

void gain_to(const sofpg::Matrix& k, double* data) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) data[i * k.cols() + j] = k(i, j);
    }
}

sofpg_run_summary summary_of(const sofpg::RunSummary& s) {
    sofpg_run_summary out{};
    out.status = static_cast<int>(s.status);
    out.seed = s.seed;
    out.outer_iterations = s.outer_iterations;
    out.gamma_final = s.gamma_final;
    out.total_trajectories = s.total_trajectories;
    out.final_rho = s.final_rho;
    return out;
}

#define SOFPG_REQUIRE(cond, what) \
    do {                           \
        if (!(cond)) return fail(SOFPG_ERR_INVALID_ARGUMENT, what); \
    } while (0)

}  // namespace

static_assert(static_cast<int>(sofpg::RunStatus::Stabilized) == SOFPG_RUN_STABILIZED);
static_assert(static_cast<int>(sofpg::RunStatus::MaxIterations) == SOFPG_RUN_MAX_ITERATIONS);
static_assert(static_cast<int>(sofpg::RunStatus::Diverged) == SOFPG_RUN_DIVERGED);

extern "C" {

const char* sofpg_version(void) { return "1.0.0"; }

const char* sofpg_last_error(void) { return g_last_error.c_str(); }

const char* sofpg_status_name(sofpg_status status) {
    switch (status) {
        case SOFPG_OK: return "ok";
        case SOFPG_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SOFPG_ERR_DIMENSION: return "dimension error";
        case SOFPG_ERR_DOMAIN: return "domain error";
        case SOFPG_ERR_INSTABILITY: return "instability error";
        case SOFPG_ERR_DIVERGENCE: return "divergence error";
        case SOFPG_ERR_NUMERICAL: return "numerical error";
        case SOFPG_ERR_IO: return "I/O error";
        case SOFPG_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

sofpg_status sofpg_config_load(const char* path, sofpg_config** out) {
    SOFPG_REQUIRE(path != nullptr && out != nullptr, "path and out must not be NULL");
    return guarded([&] {
        *out = new sofpg_config{sofpg::load_config(path)};
        return SOFPG_OK;
    });
}

sofpg_status sofpg_config_parse(const char* text, sofpg_config** out) {
    SOFPG_REQUIRE(text != nullptr && out != nullptr, "text and out must not be NULL");
    return guarded([&] {
        *out = new sofpg_config{sofpg::parse_config(text)};
        return SOFPG_OK;
    });
}

sofpg_status sofpg_config_preset(const char* name, sofpg_config** out) {
    SOFPG_REQUIRE(name != nullptr && out != nullptr, "name and out must not be NULL");
    return guarded([&] {
        *out = new sofpg_config{sofpg::preset(name)};
        return SOFPG_OK;
    });
}

void sofpg_config_free(sofpg_config* cfg) { delete cfg; }

sofpg_status sofpg_config_set(sofpg_config* cfg, const char* key, const char* value) {
    SOFPG_REQUIRE(cfg != nullptr && key != nullptr && value != nullptr,
                  "cfg, key and value must not be NULL");
    return guarded([&] {
        cfg->cfg = sofpg::with_override(cfg->cfg, key, value);
        return SOFPG_OK;
    });
}

sofpg_status sofpg_config_dims(const sofpg_config* cfg, size_t* n, size_t* m, size_t* p) {
    SOFPG_REQUIRE(cfg != nullptr, "cfg must not be NULL");
    if (n != nullptr) *n = cfg->cfg.plant.state_dim();
    if (m != nullptr) *m = cfg->cfg.plant.input_dim();
    if (p != nullptr) *p = cfg->cfg.plant.output_dim();
    return SOFPG_OK;
}

sofpg_status sofpg_config_runs(const sofpg_config* cfg, size_t* runs) {
    SOFPG_REQUIRE(cfg != nullptr && runs != nullptr, "cfg and runs must not be NULL");
    *runs = cfg->cfg.runs;
    return SOFPG_OK;
}

sofpg_status sofpg_config_seed(const sofpg_config* cfg, uint64_t* seed) {
    SOFPG_REQUIRE(cfg != nullptr && seed != nullptr, "cfg and seed must not be NULL");
    *seed = cfg->cfg.stabilizer.seed;
    return SOFPG_OK;
}

sofpg_status sofpg_config_to_string(const sofpg_config* cfg, char* buffer, size_t capacity,
                                    size_t* needed) {
    SOFPG_REQUIRE(cfg != nullptr, "cfg must not be NULL");
    return guarded([&] { return copy_text(sofpg::write_config(cfg->cfg), buffer, capacity, needed); });
}

sofpg_status sofpg_config_write(const sofpg_config* cfg, const char* path) {
    SOFPG_REQUIRE(cfg != nullptr && path != nullptr, "cfg and path must not be NULL");
    return guarded([&] {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw sofpg::IoError(std::string("cannot open '") + path + "' for writing", path);
        out << sofpg::write_config(cfg->cfg);
        out.close();
        if (!out) throw sofpg::IoError(std::string("failed writing '") + path + "'", path);
        return SOFPG_OK;
    });
}

sofpg_status sofpg_gain_load(const sofpg_config* cfg, const char* path, double* gain, size_t len) {
    SOFPG_REQUIRE(cfg != nullptr && path != nullptr && gain != nullptr,
                  "cfg, path and gain must not be NULL");
    return guarded([&] {
        std::ifstream in(path);
        if (!in) throw sofpg::IoError(std::string("cannot open gain file '") + path + "'", path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const sofpg::Matrix k = sofpg::parse_matrix(buf.str(), path);
        cfg->cfg.plant.check_gain(k);
        if (len < static_cast<size_t>(k.size())) {
            return fail(SOFPG_ERR_INVALID_ARGUMENT, "gain buffer too small");
        }
        gain_to(k, gain);
        return SOFPG_OK;
    });
}

sofpg_status sofpg_estimate_gradient(const sofpg_config* cfg, double gamma, const double* gain,
                                     uint64_t seed, int threads, double* grad_out,
                                     double* fro_norm, uint64_t* trajectories) {
    SOFPG_REQUIRE(cfg != nullptr && gain != nullptr, "cfg and gain must not be NULL");
    return guarded([&] {
        const sofpg::Simulator sim = cfg->cfg.make_simulator();
        sofpg::GradEstConfig g = cfg->cfg.stabilizer.inner;
        g.seed = seed;
        g.threads = threads;
        const sofpg::GradEstimate est =
            sofpg::estimate_gradient(sim, gain_from(cfg->cfg, gain), gamma, g);
        if (grad_out != nullptr) gain_to(est.matrix, grad_out);
        if (fro_norm != nullptr) *fro_norm = est.fro_norm;
        if (trajectories != nullptr) *trajectories = est.trajectories_used;
        return SOFPG_OK;
    });
}

sofpg_status sofpg_estimate_cost(const sofpg_config* cfg, double gamma, const double* gain,
                                 uint64_t seed, int threads, double* cost) {
    SOFPG_REQUIRE(cfg != nullptr && gain != nullptr && cost != nullptr,
                  "cfg, gain and cost must not be NULL");
    return guarded([&] {
        const sofpg::Simulator sim = cfg->cfg.make_simulator();
        sofpg::CostEstConfig c = cfg->cfg.stabilizer.cost;
        c.seed = seed;
        c.threads = threads;
        *cost = sofpg::estimate_cost(sim, gain_from(cfg->cfg, gain), gamma, c);
        return SOFPG_OK;
    });
}

sofpg_status sofpg_oracle_evaluate(const sofpg_config* cfg, double gamma, const double* gain,
                                   sofpg_oracle_report* report, double* grad_out) {
    SOFPG_REQUIRE(cfg != nullptr && gain != nullptr && report != nullptr,
                  "cfg, gain and report must not be NULL");
    return guarded([&] {
        const sofpg::ExperimentConfig& c = cfg->cfg;
        const sofpg::Matrix k = gain_from(c, gain);
        *report = sofpg_oracle_report{};
        report->rho = sofpg::spectral_radius(c.plant.closed_loop(k));
        report->damped_rho = std::sqrt(gamma) * report->rho;
        report->cost = std::numeric_limits<double>::infinity();
        report->margin_bound = std::numeric_limits<double>::quiet_NaN();
        report->grad_norm = std::numeric_limits<double>::quiet_NaN();
        const sofpg::LyapunovSolution sol = sofpg::exact_solution(c.plant, c.cost, k, gamma);
        report->cost = sol.cost;
        report->margin_bound = sofpg::spectral_margin_bound(sol.cost, c.cost.l0);
        report->grad_norm = sol.grad.norm();
        if (grad_out != nullptr) gain_to(sol.grad, grad_out);
        return SOFPG_OK;
    });
}

sofpg_status sofpg_theory_constants_compute(const sofpg_config* cfg, double nu,
                                            sofpg_theory_constants* out) {
    SOFPG_REQUIRE(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
    return guarded([&] {
        const sofpg::ExperimentConfig& c = cfg->cfg;
        const sofpg::TheoryConstants tc =
            sofpg::theory_constants(c.cost, nu, c.plant.input_dim(), c.plant.output_dim());
        *out = sofpg_theory_constants{tc.nu, tc.kappa, tc.varrho, tc.d_radius, tc.g, tc.l, tc.g0};
        return SOFPG_OK;
    });
}

sofpg_status sofpg_schedule_defaults(const sofpg_config* cfg, double nu,
                                     sofpg_schedule_inputs* inputs) {
    SOFPG_REQUIRE(cfg != nullptr && inputs != nullptr, "cfg and inputs must not be NULL");
    const sofpg::StabilizerConfig& s = cfg->cfg.stabilizer;
    *inputs = sofpg_schedule_inputs{nu, s.eps, 0.01, 0.1, s.zeta, s.gamma0, nu};
    return SOFPG_OK;
}

sofpg_status sofpg_schedule_compute(const sofpg_config* cfg, const sofpg_schedule_inputs* inputs,
                                    sofpg_schedule_report* out) {
    SOFPG_REQUIRE(cfg != nullptr && inputs != nullptr && out != nullptr,
                  "cfg, inputs and out must not be NULL");
    return guarded([&] {
        const sofpg::ExperimentConfig& c = cfg->cfg;
        const std::size_t m = c.plant.input_dim();
        const std::size_t p = c.plant.output_dim();
        const sofpg::TheoryConstants tc = sofpg::theory_constants(c.cost, inputs->nu, m, p);
        sofpg::ScheduleInputs in;
        in.eps = inputs->eps;
        in.delta0 = inputs->delta0;
        in.delta1 = inputs->delta1;
        in.zeta = inputs->zeta;
        in.gamma0 = inputs->gamma0;
        in.j_bar = inputs->j_bar;
        const sofpg::ScheduleReport r = sofpg::schedule(c.cost, tc, in, m, p);
        *out = sofpg_schedule_report{r.nu, r.r, r.tau_e, r.n_e, r.eta, r.tau, r.n, r.m_iters,
                                     r.k_prime};
        return SOFPG_OK;
    });
}

sofpg_status sofpg_learn(const sofpg_config* cfg, uint64_t seed, int threads, sofpg_result** out) {
    SOFPG_REQUIRE(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
    return guarded([&] {
        auto res = std::make_unique<sofpg_result>();
        res->result = sofpg::run_single(cfg->cfg, seed, threads);
        res->seed = seed;
        res->final_rho = cfg->cfg.oracle_logging
                             ? sofpg::spectral_radius(cfg->cfg.plant.closed_loop(res->result.gain))
                             : std::numeric_limits<double>::quiet_NaN();
        *out = res.release();
        return SOFPG_OK;
    });
}

void sofpg_result_free(sofpg_result* result) { delete result; }

sofpg_status sofpg_result_summary(const sofpg_result* result, sofpg_run_summary* out) {
    SOFPG_REQUIRE(result != nullptr && out != nullptr, "result and out must not be NULL");
    const sofpg::StabilizationResult& r = result->result;
    sofpg::RunSummary s;
    s.seed = result->seed;
    s.status = r.status;
    s.outer_iterations = r.outer_iterations;
    s.gamma_final = r.gamma_final;
    s.total_trajectories = r.total_trajectories;
    s.final_rho = result->final_rho;
    *out = summary_of(s);
    return SOFPG_OK;
}

sofpg_status sofpg_result_gain(const sofpg_result* result, double* gain, size_t len) {
    SOFPG_REQUIRE(result != nullptr && gain != nullptr, "result and gain must not be NULL");
    SOFPG_REQUIRE(len >= static_cast<size_t>(result->result.gain.size()), "gain buffer too small");
    gain_to(result->result.gain, gain);
    return SOFPG_OK;
}

sofpg_status sofpg_result_message(const sofpg_result* result, char* buffer, size_t capacity,
                                  size_t* needed) {
    SOFPG_REQUIRE(result != nullptr, "result must not be NULL");
    return copy_text(result->result.message, buffer, capacity, needed);
}

sofpg_status sofpg_result_trace_csv(const sofpg_result* result, char* buffer, size_t capacity,
                                    size_t* needed) {
    SOFPG_REQUIRE(result != nullptr, "result must not be NULL");
    return guarded([&] {
        return copy_text(sofpg::trace_csv(result->result.trace), buffer, capacity, needed);
    });
}

sofpg_status sofpg_experiment_run(const sofpg_config* cfg, size_t runs, uint64_t base_seed,
                                  int threads, const char* out_dir, sofpg_report** out) {
    SOFPG_REQUIRE(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
    return guarded([&] {
        sofpg::ExperimentOptions opts;
        opts.runs = runs;
        opts.base_seed = base_seed;
        opts.threads = threads;
        if (out_dir != nullptr) opts.out_dir = out_dir;
        auto rep = std::make_unique<sofpg_report>();
        rep->report = sofpg::run_experiment(cfg->cfg, opts);
        *out = rep.release();
        return SOFPG_OK;
    });
}

void sofpg_report_free(sofpg_report* report) { delete report; }

sofpg_status sofpg_report_counts(const sofpg_report* report, size_t* runs, size_t* successes,
                                 size_t* verified_stable, double* mean_total_trajectories) {
    SOFPG_REQUIRE(report != nullptr, "report must not be NULL");
    const sofpg::AggregateReport& r = report->report;
    if (runs != nullptr) *runs = r.runs.size();
    if (successes != nullptr) *successes = r.successes;
    if (verified_stable != nullptr) *verified_stable = r.verified_stable;
    if (mean_total_trajectories != nullptr) *mean_total_trajectories = r.mean_total_trajectories;
    return SOFPG_OK;
}

sofpg_status sofpg_report_run(const sofpg_report* report, size_t index, sofpg_run_summary* out) {
    SOFPG_REQUIRE(report != nullptr && out != nullptr, "report and out must not be NULL");
    SOFPG_REQUIRE(index < report->report.runs.size(), "run index out of range");
    *out = summary_of(report->report.runs[index]);
    return SOFPG_OK;
}

int sofpg_default_threads(void) { return sofpg::default_thread_count(); }

}  // extern "C"
