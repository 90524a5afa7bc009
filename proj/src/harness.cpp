#include "potts/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>

#include <CLI11.hpp>

#include "potts/ensembles.hpp"
#include "potts/errors.hpp"
#include "potts/exact_partition.hpp"
#include "potts/landscape.hpp"
#include "potts/mcmc.hpp"
#include "potts/moments.hpp"
#include "potts/parallel.hpp"
#include "potts/separability.hpp"

#ifndef POTTS_BUILD_ID
#define POTTS_BUILD_ID "unknown"
#endif

namespace potts {

const char* to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

OutputFormat parse_format(const std::string& s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    throw ParameterError("unknown format '" + s + "'");
}

const char* build_id() { return POTTS_BUILD_ID; }

Json to_json(const ExperimentConfig& c) {
    return {{"command", c.command},      {"params", c.params},          {"master_seed", c.master_seed},
            {"output_path", c.output_path}, {"format", to_string(c.format)}, {"threads", c.threads}};
}

ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig c;
    c.command = j.at("command").get<std::string>();
    c.params = j.at("params");
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.output_path = j.at("output_path").get<std::string>();
    c.format = parse_format(j.at("format").get<std::string>());
    c.threads = j.at("threads").get<int>();
    return c;
}

Json to_json(const RunRecord& r) {
    return {{"schema_version", kSchemaVersion}, {"build_id", r.build},
            {"config", to_json(r.config)},      {"started_at", r.started_at},
            {"finished_at", r.finished_at},     {"runtime_ms", r.runtime_ms},
            {"replica_seeds", r.replica_seeds}, {"result", r.result}};
}

RunRecord record_from_json(const Json& j) {
    if (j.at("schema_version").get<std::string>() != kSchemaVersion)
        throw IoError("unsupported schema version " + j.at("schema_version").dump());
    RunRecord r;
    r.config = config_from_json(j.at("config"));
    r.build = j.at("build_id").get<std::string>();
    r.started_at = j.at("started_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    r.runtime_ms = j.value("runtime_ms", 0.0);
    r.replica_seeds = j.at("replica_seeds").get<std::vector<std::uint64_t>>();
    r.result = j.at("result");
    return r;
}

namespace {

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.k(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.k(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json table(std::vector<std::string> columns) { return {{"columns", std::move(columns)}, {"rows", Json::array()}}; }

ModelParams model_params(const Json& p) {
    return ModelParams(p.at("k").get<int>(), p.at("n").get<int>(), p.at("d").get<double>(), p.at("beta").get<double>());
}

LandscapeParams landscape_params(const Json& p) {
    return LandscapeParams(p.at("k").get<int>(), p.at("d").get<double>(), p.at("beta").get<double>(),
                           p.value("kappa_cap", LandscapeParams::kDefaultKappaCap));
}

// ---- commands ---------------------------------------------------------------

Json run_exact(const ExperimentConfig& c, std::vector<std::uint64_t>&) {
    const auto& p = c.params;
    const auto g = load_graph(p.at("graph").get<std::string>());
    const int k = p.at("k").get<int>();
    const double beta = p.at("beta").get<double>();
    const std::string method = p.at("method").get<std::string>();
    Json r;
    if (p.value("balanced", false)) {
        r["log_z_balanced"] = z_balanced(g, k, beta, c.threads).log_z;
    }
    if (method == "enum" || method == "both") r["log_z_enumeration"] = z_enumerate(g, k, beta, c.threads).log_z;
    if (method == "fk" || method == "both") r["log_z_fk"] = z_fk(g, k, beta).log_z;
    if (method == "both") {
        r["difference"] = r["log_z_enumeration"].get<double>() - r["log_z_fk"].get<double>();
        r["log_z"] = r["log_z_enumeration"];
        r["method"] = "both";
    } else {
        r["log_z"] = method == "fk" ? r["log_z_fk"] : r["log_z_enumeration"];
        r["method"] = method == "fk" ? to_string(PartitionMethod::FkExpansion) : to_string(PartitionMethod::Enumeration);
    }
    r["n"] = g.n();
    r["edges"] = g.edge_count();
    return r;
}

Json run_moments(const ExperimentConfig& c, std::vector<std::uint64_t>& seeds) {
    const auto& p = c.params;
    const auto params = model_params(p);
    Json r;
    if (p.at("mode").get<std::string>() == "first") {
        const bool balanced = p.value("balanced", false);
        auto rep = exact_first_moment_total(params, balanced);
        const int samples = p.value("mc_samples", 0);
        if (samples > 0) {
            add_mc_first_moment(rep, params, balanced, samples, c.master_seed, c.threads);
            for (int i = 0; i < samples; ++i) seeds.push_back(SeededStream(c.master_seed, i).engine_seed());
            r["mc_estimate"] = rep.mc_estimate;
            r["mc_std_error"] = rep.mc_std_error;
            r["mc_z_score"] = (rep.mc_estimate - std::exp(rep.exact_value)) / rep.mc_std_error;
        }
        r["log_moment"] = rep.exact_value;
        r["log_reference"] = rep.log_reference;
        r["log_ratio"] = rep.log_ratio();
        r["n_samples"] = rep.n_samples;
        r["balanced"] = balanced;
        r["annealed_free_energy"] = annealed_free_energy(params);
        return r;
    }
    const auto rep = second_moment_by_overlap(params);
    const int k = params.k();
    std::vector<std::string> cols;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) cols.push_back("n_" + std::to_string(i) + std::to_string(j));
    for (const char* s : {"log_pairs", "log_value", "f_value", "scaled_gap"}) cols.emplace_back(s);
    Json t = table(cols);
    for (const auto& g : rep.groups) {
        Json row = Json::array();
        for (int x : g.counts) row.push_back(x);
        row.push_back(g.log_pairs);
        row.push_back(g.log_value);
        row.push_back(g.f_value);
        row.push_back(g.scaled_gap(params.n()));
        t["rows"].push_back(std::move(row));
    }
    const auto& dom = rep.dominant();
    r["log_second_moment"] = rep.log_total;
    r["groups"] = rep.groups.size();
    r["dominant"] = {{"counts", dom.counts},
                     {"log_value", dom.log_value},
                     {"f_value", dom.f_value},
                     {"scaled_gap", dom.scaled_gap(params.n())}};
    r["table"] = std::move(t);
    return r;
}

Json run_landscape(const ExperimentConfig& c, std::vector<std::uint64_t>& seeds) {
    const auto& p = c.params;
    const auto lp = landscape_params(p);
    AscentOptions opt;
    opt.random_starts = p.value("starts", 20);
    opt.seed = c.master_seed;
    opt.record_trace = true;
    opt.threads = c.threads;
    const Domain domain = parse_domain(p.at("domain").get<std::string>());
    seeds.push_back(SeededStream(c.master_seed, 0).engine_seed());
    Json r;
    LandscapeResult res = [&] {
        try {
            return maximize_f(lp, domain, opt);
        } catch (const OptimizationFailure& e) {
            r["warning"] = e.what();
            return e.best_effort();
        }
    }();
    r["maximizer"] = matrix_json(res.maximizer.entries());
    r["f_value"] = res.f_value;
    r["f_rho_bar"] = f_eval(make_rho_bar(lp.k()).entries(), lp);
    r["pg_norm"] = res.pg_norm;
    r["stability"] = res.stability;
    r["start_label"] = res.start_label;
    r["iterations"] = res.iterations;
    r["converged"] = res.converged;
    r["starts_run"] = res.starts_run;
    r["starts_converged"] = res.starts_converged;
    r["near_optimal"] = res.near_optimal.size();
    r["kappa_eff"] = lp.kappa_eff();
    r["domain"] = to_string(domain);
    Json t = table({"iteration", "f", "pg_norm"});
    for (const auto& tp : res.trace) t["rows"].push_back({tp.iteration, tp.f, tp.pg_norm});
    r["table"] = std::move(t);
    return r;
}

Json run_landscape_verify(const ExperimentConfig& c, std::vector<std::uint64_t>& seeds) {
    const auto& p = c.params;
    const auto lp = landscape_params(p);
    const int k = lp.k();
    Json r;
    Json t = table({"s", "f_bar", "f_candidate", "margin", "closed_form_margin"});
    bool all_positive = true;
    for (const auto& e : verify_barmax(k, lp.d(), lp.beta())) {
        t["rows"].push_back({e.s, e.f_bar, e.f_candidate, e.margin(), e.closed_form_margin});
        if (e.s != 0 && !(e.margin() > 0)) all_positive = false;
    }
    r["table"] = std::move(t);
    r["barmax_all_positive"] = all_positive;

    // random rho in S for the monotonicity and gradient suites
    const int samples = p.value("samples", 1000);
    SeededStream rng(c.master_seed, 0);
    seeds.push_back(rng.engine_seed());
    std::exponential_distribution<double> expo(1.0);
    int beta_violations = 0, d_violations = 0;
    double max_rel = 0;
    for (int s = 0; s < samples; ++s) {
        Matrix rho(k);
        for (int i = 0; i < k; ++i) {
            double total = 0;
            for (auto& x : rho.row(i)) total += (x = expo(rng.engine()));
            for (auto& x : rho.row(i)) x /= total;
        }
        if (!(monotonicity_check_beta(rho, lp) < 0)) ++beta_violations;
        if (!(monotonicity_check_d(rho, lp) < 0)) ++d_violations;
        const Matrix g = grad_f(rho, lp);
        const double h = 1e-6;
        for (std::size_t t2 = 0; t2 < rho.data().size(); ++t2) {
            Matrix up = rho, down = rho;
            up.data()[t2] += h;
            down.data()[t2] -= h;
            const double fd = (f_eval(up, lp) - f_eval(down, lp)) / (2 * h);
            max_rel = std::max(max_rel, std::abs(fd - g.data()[t2]) / std::max(1.0, std::abs(fd)));
        }
    }
    r["monotonicity_samples"] = samples;
    r["beta_derivative_violations"] = beta_violations;
    r["d_derivative_violations"] = d_violations;
    r["gradient_max_relative_error"] = max_rel;
    return r;
}

Json run_separability(const ExperimentConfig& c, std::vector<std::uint64_t>& seeds) {
    const auto& p = c.params;
    const auto params = model_params(p);
    SeparabilityOptions opt;
    opt.samples = p.at("samples").get<int>();
    opt.seed = c.master_seed;
    opt.exhaustive = p.value("exhaustive", false);
    opt.kappa_cap = p.value("kappa_cap", LandscapeParams::kDefaultKappaCap);
    opt.threads = c.threads;
    const auto rep = empirical_separability_rate(params, opt);
    for (int i = 0; i < opt.samples; ++i) seeds.push_back(SeededStream(c.master_seed, i).engine_seed());
    Json r{{"sep1_rate", rep.sep1_rate},
           {"sep2_rate", rep.sep2_rate},
           {"interval", {{"sep1", {rep.sep1_interval.lo, rep.sep1_interval.hi}},
                         {"sep2", {rep.sep2_interval.lo, rep.sep2_interval.hi}}}},
           {"samples", rep.samples},
           {"sep2_exhaustive", rep.sep2_exhaustive},
           {"sep1_threshold", SepConfig::sep1_threshold(params)},
           {"mean_mono_per_vertex", rep.mean_mono_per_vertex},
           {"predicted_mono_per_vertex", rep.predicted_mono_per_vertex},
           {"note", rep.sep2_exhaustive ? "finite-n surrogate"
                                        : "finite-n surrogate; SEP2 checked against sampled witnesses only"}};
    if (rep.warning) r["warning"] = *rep.warning;
    return r;
}

Json run_freeenergy(const ExperimentConfig& c, std::vector<std::uint64_t>& seeds) {
    const auto& p = c.params;
    std::vector<int> grid;
    for (int n = p.at("nmin").get<int>(); n <= p.at("nmax").get<int>(); n += p.value("nstep", 2)) grid.push_back(n);
    FreeEnergyOptions opt;
    opt.method = p.value("method", std::string("exact")) == "ti" ? FreeEnergyMethod::ThermoIntegration
                                                                 : FreeEnergyMethod::Exact;
    opt.sweeps_per_point = p.value("budget", std::int64_t{2000});
    opt.threads = c.threads;
    const int replicas = p.at("replicas").get<int>();
    const auto rows = free_energy_experiment(p.at("k").get<int>(), p.at("d").get<double>(), p.at("beta").get<double>(),
                                             grid, replicas, c.master_seed, opt);
    for (int n : grid) {
        const SeededStream base(c.master_seed, static_cast<std::uint64_t>(n));
        for (int r = 0; r < replicas; ++r) seeds.push_back(base.child(r).engine_seed());
    }
    Json t = table({"n", "mean", "std", "formula", "gap"});
    for (const auto& row : rows) t["rows"].push_back({row.n, row.mean, row.std, row.formula, row.gap()});
    return {{"table", std::move(t)}, {"replicas", replicas}};
}

Json run_ti(const ExperimentConfig& c, std::vector<std::uint64_t>& seeds) {
    const auto& p = c.params;
    const auto g = load_graph(p.at("graph").get<std::string>());
    const int k = p.at("k").get<int>();
    const auto schedule = TISchedule::uniform(p.at("beta").get<double>(), p.value("points", kDefaultGridPoints),
                                              p.value("sweeps", std::int64_t{10000}),
                                              p.value("burn_in", std::int64_t{100} * g.n()));
    TIResult res = [&] {
        if (p.value("exact", false)) return thermo_integrate_exact(g, k, schedule);
        SeededStream rng(c.master_seed, 0);
        seeds.push_back(rng.engine_seed());
        return thermo_integrate_lnZ(g, k, schedule, rng, parse_kernel(p.value("kernel", std::string("glauber"))));
    }();
    Json t = table({"beta", "mean_energy", "energy_error"});
    for (std::size_t i = 0; i < res.beta_grid.size(); ++i)
        t["rows"].push_back({res.beta_grid[i], res.mean_energy[i], res.energy_error[i]});
    return {{"log_z", res.log_z},
            {"statistical_error", res.statistical_error},
            {"quadrature_error", res.quadrature_error},
            {"total_error", res.total_error()},
            {"table", std::move(t)}};
}

Json run_sample(const ExperimentConfig& c, std::vector<std::uint64_t>& seeds) {
    const auto& p = c.params;
    const auto params = model_params(p);
    SeededStream rng(c.master_seed, 0);
    seeds.push_back(rng.engine_seed());
    Json r;
    SimpleGraph g;
    if (p.value("planted", false)) {
        const auto draw = p.value("balanced", false) ? sample_planted_balanced(params, rng, 1000000).sample
                                                     : sample_planted(params, rng);
        g = draw.graph;
        r["p1"] = draw.p1;
        r["p2"] = draw.p2;
        r["hamiltonian"] = hamiltonian(g, draw.sigma_hat);
        r["balanced"] = draw.sigma_hat.is_balanced();
        if (const auto path = p.value("sigma_out", std::string()); !path.empty()) {
            std::ofstream f(path);
            if (!f) throw IoError("cannot write " + path);
            write_assignment(f, draw.sigma_hat);
        }
    } else {
        g = sample_gnm(params, rng);
    }
    r["n"] = g.n();
    r["edges"] = g.edge_count();
    if (const auto path = p.value("graph_out", std::string()); !path.empty()) save_graph(path, g);
    return r;
}

Json run_selftest_command(const ExperimentConfig&, std::vector<std::uint64_t>&) {
    std::ostringstream log;
    const bool ok = run_selftest(log);
    return {{"passed", ok}, {"log", log.str()}};
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& config) {
    using Runner = Json (*)(const ExperimentConfig&, std::vector<std::uint64_t>&);
    static const std::vector<std::pair<std::string, Runner>> runners = {
        {"exact", run_exact},           {"moments", run_moments},         {"landscape", run_landscape},
        {"landscape-verify", run_landscape_verify}, {"separability", run_separability},
        {"freeenergy", run_freeenergy}, {"ti", run_ti},                   {"sample", run_sample},
        {"selftest", run_selftest_command}};
    for (const auto& [name, run] : runners) {
        if (name != config.command) continue;
        RunRecord rec;
        rec.config = config;
        rec.build = build_id();
        rec.started_at = iso_now();
        const auto t0 = std::chrono::steady_clock::now();
        rec.result = run(config, rec.replica_seeds);
        rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rec.finished_at = iso_now();
        return rec;
    }
    throw ParameterError("unknown command '" + config.command + "'");
}

// ---- output -------------------------------------------------------------------

namespace {

void write_csv_cell(const Json& v, std::ostream& out) {
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        out << buf;
    } else if (v.is_string()) {
        out << v.get<std::string>();
    } else {
        out << v.dump();
    }
}

}  // namespace

void write_csv_table(const Json& t, std::ostream& out) {
    const auto& cols = t.at("columns");
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].get<std::string>();
    out << '\n';
    for (const auto& row : t.at("rows")) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            write_csv_cell(row[i], out);
        }
        out << '\n';
    }
}

void emit_results(const RunRecord& record, std::ostream& out) {
    if (record.config.format == OutputFormat::Json) {
        out << to_json(record).dump(2) << '\n';
        return;
    }
    if (!record.result.contains("table")) throw ParameterError("command '" + record.config.command + "' has no table");
    write_csv_table(record.result.at("table"), out);
}

void emit_results(const RunRecord& record) {
    const auto& path = record.config.output_path;
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    emit_results(record, f);
    if (record.config.format == OutputFormat::Csv) {
        std::ofstream side(path + ".json");
        if (!side) throw IoError("cannot write " + path + ".json");
        side << to_json(record).dump(2) << '\n';
    }
}

// ---- command line ---------------------------------------------------------------

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Potts antiferromagnet on random graphs: exact oracles, moments, landscape, MCMC", "potts"};
    app.require_subcommand(1);
    app.fallthrough();

    int threads = default_thread_count();
    std::string out_path;
    std::string format = "json";
    app.add_option("--threads", threads, "worker threads (default POTTS_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    // shared parameter slots; each subcommand binds the ones it uses
    int k = 3, n = 10, samples = 100, replicas = 200, nmin = 8, nmax = 14, nstep = 2, starts = 20, points = 33;
    int mc_samples = 0;
    double d = 2.0, beta = 1.0, kappa_cap = LandscapeParams::kDefaultKappaCap;
    std::uint64_t seed = 1;
    std::int64_t budget = 2000, sweeps = 10000, burn_in = -1;
    std::string graph, method = "both", mode = "first", domain = "d", fe_method = "exact", kernel = "glauber";
    std::string graph_out, sigma_out;
    bool balanced = false, exhaustive = false, exact = false, planted = false;

    auto* exact_cmd = app.add_subcommand("exact", "exact ln Z of a graph file");
    exact_cmd->add_option("--graph", graph, "edge-list file")->required()->check(CLI::ExistingFile);
    exact_cmd->add_option("--k", k)->required()->check(CLI::Range(1, 1000));
    exact_cmd->add_option("--beta", beta)->required();
    exact_cmd->add_option("--method", method)->check(CLI::IsMember({"enum", "fk", "both"}));
    exact_cmd->add_flag("--balanced", balanced, "also report ln Z over balanced colorings");

    auto* moments_cmd = app.add_subcommand("moments", "exact first or second moment over G(n,m)");
    moments_cmd->add_option("--mode", mode)->check(CLI::IsMember({"first", "second"}));
    moments_cmd->add_option("--k", k)->required();
    moments_cmd->add_option("--n", n)->required();
    moments_cmd->add_option("--d", d)->required();
    moments_cmd->add_option("--beta", beta)->required();
    moments_cmd->add_flag("--balanced", balanced);
    moments_cmd->add_option("--mc-samples", mc_samples, "Monte Carlo graphs for the first moment");
    moments_cmd->add_option("--seed", seed);

    auto* land_cmd = app.add_subcommand("landscape", "maximise f over S, D or separable D");
    land_cmd->add_option("--k", k)->required();
    land_cmd->add_option("--d", d)->required();
    land_cmd->add_option("--beta", beta)->required();
    land_cmd->add_option("--domain", domain)->check(CLI::IsMember({"s", "d", "dsep"}));
    land_cmd->add_option("--kappa-cap", kappa_cap);
    land_cmd->add_option("--starts", starts, "random starts");
    land_cmd->add_option("--seed", seed);

    auto* verify_cmd = app.add_subcommand("landscape-verify", "barmax margins, monotonicity and gradient checks");
    verify_cmd->add_option("--k", k)->required();
    verify_cmd->add_option("--d", d)->required();
    verify_cmd->add_option("--beta", beta)->required();
    verify_cmd->add_option("--samples", samples, "random matrices for the sweeps");
    verify_cmd->add_option("--seed", seed);

    auto* sep_cmd = app.add_subcommand("separability", "SEP1/SEP2 pass rates on planted samples");
    sep_cmd->add_option("--n", n)->required();
    sep_cmd->add_option("--k", k)->required();
    sep_cmd->add_option("--d", d)->required();
    sep_cmd->add_option("--beta", beta)->required();
    sep_cmd->add_option("--samples", samples);
    sep_cmd->add_option("--seed", seed);
    sep_cmd->add_option("--kappa-cap", kappa_cap);
    sep_cmd->add_flag("--exhaustive", exhaustive, "SEP2 over every balanced coloring");

    auto* fe_cmd = app.add_subcommand("freeenergy", "(1/n) ln Z over G(n,m) against the annealed formula");
    fe_cmd->add_option("--k", k)->required();
    fe_cmd->add_option("--d", d)->required();
    fe_cmd->add_option("--beta", beta)->required();
    fe_cmd->add_option("--nmin", nmin)->required();
    fe_cmd->add_option("--nmax", nmax)->required();
    fe_cmd->add_option("--nstep", nstep)->check(CLI::PositiveNumber);
    fe_cmd->add_option("--replicas", replicas);
    fe_cmd->add_option("--budget", budget, "sweeps per grid point (ti)");
    fe_cmd->add_option("--method", fe_method)->check(CLI::IsMember({"exact", "ti"}));
    fe_cmd->add_option("--seed", seed);

    auto* ti_cmd = app.add_subcommand("ti", "thermodynamic integration of ln Z for a graph file");
    ti_cmd->add_option("--graph", graph)->required()->check(CLI::ExistingFile);
    ti_cmd->add_option("--k", k)->required();
    ti_cmd->add_option("--beta", beta)->required();
    ti_cmd->add_option("--points", points);
    ti_cmd->add_option("--sweeps", sweeps, "sweeps per grid point");
    ti_cmd->add_option("--burn-in", burn_in, "sweeps before each grid point (default 100 n)");
    ti_cmd->add_option("--kernel", kernel)->check(CLI::IsMember({"glauber", "metropolis"}));
    ti_cmd->add_flag("--exact", exact, "use exact <H> on the grid");
    ti_cmd->add_option("--seed", seed);

    auto* sample_cmd = app.add_subcommand("sample", "draw G(n,m) or a planted graph");
    sample_cmd->add_option("--n", n)->required();
    sample_cmd->add_option("--k", k)->required();
    sample_cmd->add_option("--d", d)->required();
    sample_cmd->add_option("--beta", beta)->required();
    sample_cmd->add_flag("--planted", planted);
    sample_cmd->add_flag("--balanced", balanced, "condition the planted coloring on balance");
    sample_cmd->add_option("--graph-out", graph_out);
    sample_cmd->add_option("--sigma-out", sigma_out);
    sample_cmd->add_option("--seed", seed);

    auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in example suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    ExperimentConfig config;
    config.master_seed = seed;
    config.output_path = out_path;
    config.format = parse_format(format);
    config.threads = threads;
    Json& p = config.params;
    if (exact_cmd->parsed()) {
        config.command = "exact";
        p = {{"graph", graph}, {"k", k}, {"beta", beta}, {"method", method}, {"balanced", balanced}};
    } else if (moments_cmd->parsed()) {
        config.command = "moments";
        p = {{"mode", mode}, {"k", k}, {"n", n}, {"d", d}, {"beta", beta}, {"balanced", balanced},
             {"mc_samples", mc_samples}};
    } else if (land_cmd->parsed()) {
        config.command = "landscape";
        p = {{"k", k}, {"d", d}, {"beta", beta}, {"domain", domain}, {"kappa_cap", kappa_cap}, {"starts", starts}};
    } else if (verify_cmd->parsed()) {
        config.command = "landscape-verify";
        p = {{"k", k}, {"d", d}, {"beta", beta}, {"samples", samples}};
    } else if (sep_cmd->parsed()) {
        config.command = "separability";
        p = {{"n", n},           {"k", k},         {"d", d},
             {"beta", beta},     {"samples", samples}, {"exhaustive", exhaustive},
             {"kappa_cap", kappa_cap}};
    } else if (fe_cmd->parsed()) {
        config.command = "freeenergy";
        p = {{"k", k},       {"d", d},           {"beta", beta},     {"nmin", nmin},      {"nmax", nmax},
             {"nstep", nstep}, {"replicas", replicas}, {"budget", budget}, {"method", fe_method}};
    } else if (ti_cmd->parsed()) {
        config.command = "ti";
        p = {{"graph", graph}, {"k", k},     {"beta", beta},   {"points", points},
             {"sweeps", sweeps}, {"exact", exact}, {"kernel", kernel}};
        if (burn_in >= 0) p["burn_in"] = burn_in;
    } else if (sample_cmd->parsed()) {
        config.command = "sample";
        p = {{"n", n},           {"k", k},           {"d", d},
             {"beta", beta},     {"planted", planted}, {"balanced", balanced},
             {"graph_out", graph_out}, {"sigma_out", sigma_out}};
    } else if (selftest_cmd->parsed()) {
        config.command = "selftest";
        p = Json::object();
    }

    try {
        const RunRecord rec = run_experiment(config);
        if (config.output_path.empty())
            emit_results(rec, out);
        else
            emit_results(rec);
        if (config.command == "selftest" && !rec.result.at("passed").get<bool>()) return 1;
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace potts
