#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "tenrec/baselines.hpp"
#include "tenrec/bench.hpp"
#include "tenrec/io.hpp"
#include "tenrec/linops.hpp"
#include "tenrec/pasd.hpp"
#include "tenrec/synth.hpp"

namespace tenrec {

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

constexpr double kDefaultMu0 = 1e-4;
constexpr double kDefaultMuMax = 1e10;
constexpr double kDefaultMuGrowth = 1.1;
constexpr double kDefaultEps = 1e-5;
constexpr int kDefaultMaxiter = 1000;

std::string checksum_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Axis spec: either a comma list ("2,6,10") or an inclusive range "lo:hi:step".
std::vector<double> parse_double_axis(const std::string& raw) {
    std::vector<double> values;
    if (raw.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(raw.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw ArgumentError("malformed axis range '" + raw + "' (want lo:hi:step)");
        const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i)
            values.push_back(lo + static_cast<double>(i) * step);
        return values;
    }
    std::string part;
    std::stringstream ss(raw);
    while (std::getline(ss, part, ',')) {
        char* end = nullptr;
        values.push_back(std::strtod(part.c_str(), &end));
        if (end == part.c_str() || *end != '\0')
            throw ArgumentError("malformed axis value '" + part + "'");
    }
    if (values.empty())
        throw ArgumentError("empty axis '" + raw + "'");
    return values;
}

std::vector<Index> parse_index_axis(const std::string& raw) {
    std::vector<Index> values;
    for (double v : parse_double_axis(raw)) {
        const auto i = static_cast<Index>(std::llround(v));
        if (std::fabs(v - static_cast<double>(i)) > 1e-9 || i < 1)
            throw ArgumentError("axis value '" + std::to_string(v) + "' is not a positive integer");
        values.push_back(i);
    }
    return values;
}

void ensure_parent_dir(const fs::path& path) {
    const fs::path parent = path.parent_path();
    if (!parent.empty())
        fs::create_directories(parent);
}

struct SolverOptions {
    std::string solver = "pasd";
    std::vector<double> lambdas; // empty: weight rule sqrt(max(I_n, prod_{j!=n} I_j))/N
    std::vector<Index> ranks;    // empty: floor(1.2 * target_rank) per mode
    Index target_rank = 0;
    std::vector<double> alphas;
    double mu0 = kDefaultMu0;
    double mu_max = kDefaultMuMax;
    double mu_growth = kDefaultMuGrowth;
    double eps = kDefaultEps;
    int maxiter = kDefaultMaxiter;
    double rpca_lambda = 0.0; // 0: 1/sqrt(max dim) per unfolding
};

void add_solver_flags(CLI::App* cmd, SolverOptions& o) {
    cmd->add_option("--solver", o.solver, "pasd | snn | rpca")
        ->check(CLI::IsMember({"pasd", "snn", "rpca"}));
    cmd->add_option("--lambdas", o.lambdas, "per-mode nuclear norm weights")->delimiter(',');
    cmd->add_option("--ranks", o.ranks, "per-mode subspace widths R_n (pasd)")->delimiter(',');
    cmd->add_option("--target-rank", o.target_rank,
                    "uniform target rank r; implies R_n = floor(1.2 r)");
    cmd->add_option("--alphas", o.alphas, "output combination weights (default: lambdas)")
        ->delimiter(',');
    cmd->add_option("--mu0", o.mu0, "initial penalty");
    cmd->add_option("--mu-max", o.mu_max, "penalty cap");
    cmd->add_option("--mu-growth", o.mu_growth, "penalty growth factor");
    cmd->add_option("--eps", o.eps, "stopping tolerance on the entrywise residual");
    cmd->add_option("--maxiter", o.maxiter, "iteration cap");
    cmd->add_option("--rpca-lambda", o.rpca_lambda, "sparsity weight for rpca (0 = rule)");
}

PasdConfig build_pasd_config(const SolverOptions& o, const std::vector<Index>& dims) {
    PasdConfig cfg;
    cfg.lambdas = o.lambdas.empty() ? PasdConfig::default_lambdas(dims) : o.lambdas;
    if (!o.ranks.empty()) {
        cfg.ranks = o.ranks;
    } else if (o.target_rank > 0) {
        cfg.ranks.assign(dims.size(), PasdConfig::default_rank_bound(o.target_rank));
    } else {
        throw ArgumentError("pasd needs --ranks or --target-rank");
    }
    cfg.mu0 = o.mu0;
    cfg.mu_max = o.mu_max;
    cfg.rho = o.mu_growth;
    cfg.eps = o.eps;
    cfg.maxiter = o.maxiter;
    cfg.output_weights = o.alphas;
    cfg.validate(dims);
    return cfg;
}

SnnConfig build_snn_config(const SolverOptions& o, const std::vector<Index>& dims) {
    SnnConfig cfg;
    cfg.lambdas = o.lambdas.empty() ? PasdConfig::default_lambdas(dims) : o.lambdas;
    cfg.mu0 = o.mu0;
    cfg.mu_max = o.mu_max;
    cfg.rho = o.mu_growth;
    cfg.eps = o.eps;
    cfg.maxiter = o.maxiter;
    cfg.output_weights = o.alphas;
    cfg.validate(dims);
    return cfg;
}

RpcaConfig build_rpca_config(const SolverOptions& o) {
    RpcaConfig cfg;
    cfg.lambda = o.rpca_lambda;
    cfg.mu0 = o.mu0;
    cfg.mu_max = o.mu_max;
    cfg.rho = o.mu_growth;
    cfg.eps = o.eps;
    cfg.maxiter = o.maxiter;
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
    std::vector<Index> dims;
    std::vector<Index> ranks;
    Index rank = 0;
    double corruption = 0.05;
    std::uint64_t seed = 0;
    std::string mode = "additive";
    std::string out_prefix;
};

int do_synth(const SynthArgs& a, std::ostream& out) {
    SynthSpec spec;
    spec.dims = a.dims;
    if (!a.ranks.empty())
        spec.ranks = a.ranks;
    else if (a.rank > 0)
        spec.ranks.assign(a.dims.size(), a.rank);
    else
        throw ArgumentError("synth needs --rank or --ranks");
    spec.corruption_fraction = a.corruption;
    spec.seed = a.seed;
    spec.validate();

    const DenseTensor truth = gen_lowrank_tucker(spec);
    const CorruptMode mode = a.mode == "replace255" ? CorruptMode::replace_uniform255
                                                    : CorruptMode::additive_uniform;
    const Corruption corrupted = corrupt_sparse(truth, spec.corruption_fraction, spec.seed, mode);

    const fs::path truth_path = a.out_prefix + "_truth.tnsr";
    const fs::path observed_path = a.out_prefix + "_observed.tnsr";
    ensure_parent_dir(truth_path);
    write_tensor(truth, truth_path);
    write_tensor(corrupted.tensor, observed_path);

    RunManifest manifest;
    manifest.set_int("manifest_version", 1);
    manifest.set("command", "synth");
    manifest.set_indices("dims", spec.dims);
    manifest.set_indices("ranks", spec.ranks);
    manifest.set_double("corruption", spec.corruption_fraction);
    manifest.set_int("seed", static_cast<long long>(spec.seed));
    manifest.set("corrupt_mode", a.mode);
    manifest.set("truth_out", truth_path.string());
    manifest.set("observed_out", observed_path.string());
    manifest.set("truth_checksum", checksum_hex(tensor_checksum(truth)));
    manifest.set("observed_checksum", checksum_hex(tensor_checksum(corrupted.tensor)));
    manifest.set_int("corrupted_entries", static_cast<long long>(corrupted.support.size()));
    manifest.save(a.out_prefix + "_synth.manifest");

    out << "wrote " << truth_path.string() << " and " << observed_path.string() << " ("
        << corrupted.support.size() << " corrupted entries)\n";
    return 0;
}

// -------------------------------------------------------------- recover ----

struct RecoverArgs {
    std::string input;
    std::string truth;
    std::string out_prefix;
    std::string from_manifest;
    bool strict = false;
    bool no_z = false;
    SolverOptions solver;
};

SolverOptions options_from_manifest(const RunManifest& m) {
    SolverOptions o;
    o.solver = m.get("solver");
    if (m.has("lambdas"))
        o.lambdas = m.get_doubles("lambdas");
    if (m.has("ranks"))
        o.ranks = m.get_indices("ranks");
    if (m.has("alphas"))
        o.alphas = m.get_doubles("alphas");
    o.mu0 = m.get_double("mu0");
    o.mu_max = m.get_double("mu_max");
    o.mu_growth = m.get_double("mu_growth");
    o.eps = m.get_double("eps");
    o.maxiter = static_cast<int>(m.get_int("maxiter"));
    if (m.has("rpca_lambda"))
        o.rpca_lambda = m.get_double("rpca_lambda");
    return o;
}

int do_recover(RecoverArgs a, std::ostream& out) {
    if (!a.from_manifest.empty()) {
        const RunManifest m = RunManifest::load(a.from_manifest);
        if (m.get("command") != "recover")
            throw ArgumentError("--from-manifest expects a recover manifest");
        a.solver = options_from_manifest(m);
        a.input = m.get("input");
        if (a.truth.empty() && m.has("truth"))
            a.truth = m.get("truth");
    }
    if (a.input.empty())
        throw ArgumentError("recover needs --input (or --from-manifest)");
    if (a.out_prefix.empty())
        throw ArgumentError("recover needs --out-prefix");

    const DenseTensor observed = read_tensor(a.input);
    const std::vector<Index>& dims = observed.dims();

    RunManifest manifest;
    manifest.set_int("manifest_version", 1);
    manifest.set("command", "recover");
    manifest.set("solver", a.solver.solver);
    manifest.set("input", a.input);
    manifest.set("input_checksum", checksum_hex(tensor_checksum(observed)));
    manifest.set_indices("dims", dims);

    RecoveryResult res;
    const auto start = clock_type::now();
    if (a.solver.solver == "pasd") {
        const PasdConfig cfg = build_pasd_config(a.solver, dims);
        res = pasd_recover(observed, cfg);
        manifest.set_doubles("lambdas", cfg.lambdas);
        manifest.set_indices("ranks", cfg.ranks);
        manifest.set_doubles("alphas", cfg.alphas());
    } else if (a.solver.solver == "snn") {
        const SnnConfig cfg = build_snn_config(a.solver, dims);
        res = snn_recover(observed, cfg);
        manifest.set_doubles("lambdas", cfg.lambdas);
        manifest.set_doubles("alphas", cfg.alphas());
    } else {
        const RpcaConfig cfg = build_rpca_config(a.solver);
        res = rpca_unfold_recover(observed, cfg);
        manifest.set_double("rpca_lambda", cfg.lambda);
    }
    const double elapsed = std::chrono::duration<double>(clock_type::now() - start).count();

    manifest.set_double("mu0", a.solver.mu0);
    manifest.set_double("mu_max", a.solver.mu_max);
    manifest.set_double("mu_growth", a.solver.mu_growth);
    manifest.set_double("eps", a.solver.eps);
    manifest.set_int("maxiter", a.solver.maxiter);

    const fs::path x_path = a.out_prefix + "_x.tnsr";
    const fs::path e_path = a.out_prefix + "_e.tnsr";
    ensure_parent_dir(x_path);
    write_tensor(res.x, x_path);
    write_tensor(res.e, e_path);
    manifest.set("x_out", x_path.string());
    manifest.set("e_out", e_path.string());
    if (!a.no_z) {
        std::string z_list;
        for (std::size_t n = 0; n < res.z.size(); ++n) {
            const fs::path z_path = a.out_prefix + "_z" + std::to_string(n + 1) + ".tnsr";
            write_tensor(res.z[n], z_path);
            if (n)
                z_list += ',';
            z_list += z_path.string();
        }
        manifest.set("z_out", z_list);
    }

    manifest.set_bool("converged", res.converged);
    manifest.set_int("iters", res.iters);
    manifest.set_double("time_s", elapsed);
    manifest.set_doubles("final_residuals", res.final_residuals);
    manifest.set_double("objective", res.objective);
    if (res.certificate) {
        manifest.set_double("cert_epsilon_hat", res.certificate->epsilon_hat);
        manifest.set_double("cert_c", res.certificate->c);
        manifest.set_double("cert_bound", res.certificate->bound);
    }

    double rse_value = std::numeric_limits<double>::quiet_NaN();
    if (!a.truth.empty()) {
        const DenseTensor truth = read_tensor(a.truth);
        rse_value = rse(res.x, truth);
        manifest.set("truth", a.truth);
        manifest.set_double("rse", rse_value);
    }

    const fs::path manifest_path = a.out_prefix + ".manifest";
    manifest.save(manifest_path);

    out << "solver = " << a.solver.solver << ", dims =";
    for (Index d : dims)
        out << ' ' << d;
    out << "\nconverged = " << (res.converged ? "true" : "false") << " after " << res.iters
        << " iterations in " << format_double(elapsed) << " s\n";
    out << "objective = " << format_double(res.objective) << "\n";
    if (!std::isnan(rse_value))
        out << "rse = " << format_double(rse_value) << "\n";
    if (res.certificate)
        out << "certificate: epsilon_hat = " << format_double(res.certificate->epsilon_hat)
            << ", c = " << format_double(res.certificate->c)
            << ", bound = " << format_double(res.certificate->bound) << "\n";
    out << "wrote " << manifest_path.string() << "\n";

    if (a.strict && !res.converged)
        return 4;
    return 0;
}

// ---------------------------------------------------------------- bench ----

struct BenchArgs {
    std::vector<Index> dims;
    Index rank = 0;
    std::string corruptions = "0.05,0.1,0.2";
    std::vector<std::string> solvers{"pasd", "snn", "rpca"};
    int trials = 10;
    std::uint64_t seed = 0;
    double eps = kDefaultEps;
    int maxiter = kDefaultMaxiter;
    std::string out;
};

SolverSpec named_solver(const std::string& name, double eps, int maxiter) {
    if (name == "pasd")
        return make_pasd_solver(eps, maxiter);
    if (name == "snn")
        return make_snn_solver(eps, maxiter);
    if (name == "rpca")
        return make_rpca_solver(eps, maxiter);
    throw ArgumentError("unknown solver '" + name + "'");
}

int do_bench(const BenchArgs& a, std::ostream& out) {
    std::vector<SolverSpec> solvers;
    for (const std::string& name : a.solvers)
        solvers.push_back(named_solver(name, a.eps, a.maxiter));
    const std::vector<double> rhos = parse_double_axis(a.corruptions);

    const auto rows = run_table_benchmark(a.dims, a.rank, rhos, solvers, a.trials, a.seed);
    if (!a.out.empty()) {
        ensure_parent_dir(a.out);
        write_metrics_csv(rows, a.out);
    }

    out << "solver      rho     rank  trials  mean_rse      mean_time_s  converged\n";
    for (const auto& row : rows) {
        out << std::left << std::setw(10) << row.solver << "  " << std::setw(6) << row.rho << "  "
            << std::setw(4) << row.rank << "  " << std::setw(6) << row.trials << "  "
            << std::setw(12) << row.mean_rse << "  " << std::setw(11) << row.mean_time_s << "  "
            << row.converged_frac << "\n";
    }
    if (!a.out.empty())
        out << "wrote " << a.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- phase ----

struct PhaseArgs {
    std::vector<Index> dims;
    std::string rank_axis = "2:50:2";
    std::string corruption_axis = "0.02:0.5:0.02";
    int trials = 10;
    double threshold = 1e-3;
    std::string solver = "pasd";
    std::uint64_t seed = 0;
    double eps = kDefaultEps;
    int maxiter = kDefaultMaxiter;
    int threads = 0;
    std::string out;
};

int do_phase(const PhaseArgs& a, std::ostream& out) {
    PhaseGridSpec spec;
    spec.dims = a.dims;
    spec.rank_axis = parse_index_axis(a.rank_axis);
    spec.corruption_axis = parse_double_axis(a.corruption_axis);
    spec.trials = a.trials;
    spec.rse_threshold = a.threshold;
    spec.seed = a.seed;

    const ExperimentGrid grid =
        phase_transition_sweep(spec, named_solver(a.solver, a.eps, a.maxiter), a.threads);

    if (!a.out.empty()) {
        ensure_parent_dir(a.out);
        write_phase_pgm(grid, a.out);
    }

    out << "success counts (rows: corruption ascending, cols: rank ascending, " << grid.trials
        << " trials)\n";
    for (std::size_t r = 0; r < grid.corruption_axis.size(); ++r) {
        out << std::setw(5) << grid.corruption_axis[r] << " |";
        for (std::size_t c = 0; c < grid.rank_axis.size(); ++c)
            out << ' ' << std::setw(2) << grid.count_at(r, c);
        out << "\n";
    }
    if (!a.out.empty())
        out << "wrote " << a.out << "\n";
    return 0;
}

// -------------------------------------------------------------- certify ----

struct CertifyArgs {
    std::string manifest;
    std::string truth;
};

int do_certify(const CertifyArgs& a, std::ostream& out) {
    const RunManifest m = RunManifest::load(a.manifest);
    if (m.get("command") != "recover" || m.get("solver") != "pasd")
        throw ArgumentError("certify needs a manifest written by `recover --solver pasd`");
    if (!m.has("cert_epsilon_hat"))
        throw ArgumentError("manifest carries no certificate (run did not converge?)");

    const DenseTensor t = read_tensor(m.get("input"));
    if (checksum_hex(tensor_checksum(t)) != m.get("input_checksum"))
        throw IoError("input tensor checksum does not match the manifest");

    const DenseTensor e = read_tensor(m.get("e_out"));
    std::vector<DenseTensor> z;
    {
        std::stringstream ss(m.get("z_out"));
        std::string path;
        while (std::getline(ss, path, ','))
            z.push_back(read_tensor(path));
    }
    const std::vector<double> lambdas = m.get_doubles("lambdas");
    const double eps = m.get_double("eps");
    const double mu0 = m.get_double("mu0");
    const double growth = m.get_double("mu_growth");
    const auto iters = m.get_int("iters");
    const double eps_hat = m.get_double("cert_epsilon_hat");
    const double c_stored = m.get_double("cert_c");
    const double bound_stored = m.get_double("cert_bound");
    const double objective = m.get_double("objective");
    if (z.size() != lambdas.size() || z.size() != t.dims().size())
        throw IoError("manifest z_out list does not cover every mode");

    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        out << (ok ? "[ OK ] " : "[FAIL] ") << name << ": " << detail << "\n";
        all_ok = all_ok && ok;
    };

    // Feasibility of the stored iterate.
    double worst_residual = 0.0;
    for (std::size_t n = 0; n < z.size(); ++n) {
        double worst = 0.0;
        for (Index i = 0; i < t.size(); ++i)
            worst = std::max(worst, std::fabs(t[i] - z[n][i] - e[i]));
        worst_residual = std::max(worst_residual, worst);
    }
    report("feasibility", worst_residual < eps,
           "max_n |T - Z_n - E|_inf = " + format_double(worst_residual) +
               " vs eps = " + format_double(eps));

    // Objective recomputed from the stored factors.
    double objective_re = tensor_norm(e, NormKind::l1);
    for (std::size_t n = 0; n < z.size(); ++n)
        objective_re += lambdas[n] * nuclear_norm(unfold(z[n], static_cast<Index>(n + 1)));
    report("objective", std::fabs(objective_re - objective) <= 1e-6 * (1.0 + std::fabs(objective)),
           "recomputed " + format_double(objective_re) + " vs stored " + format_double(objective));

    // Constant c and the bound, recomputed from scratch.
    const double n_modes = static_cast<double>(t.dims().size());
    const double total = static_cast<double>(t.size());
    const double geom = growth * (1.0 + growth) / (growth - 1.0) +
                        0.5 / std::pow(growth, static_cast<int>(iters) - 1);
    const double c_re =
        n_modes * total * geom / (mu0 * n_modes * n_modes) + tensor_norm(t, NormKind::l1);
    report("constant_c", std::fabs(c_re - c_stored) <= 1e-12 * c_re,
           "recomputed " + format_double(c_re) + " vs stored " + format_double(c_stored));

    double lam_sum = 0.0;
    double lam_term = 0.0;
    for (double l : lambdas) {
        lam_sum += l;
        lam_term += l * total * eps;
    }
    const double bound_re = c_re * eps_hat + lam_term;
    report("bound", std::fabs(bound_re - bound_stored) <= 1e-12 * (1.0 + bound_re),
           "recomputed " + format_double(bound_re) + " vs stored " + format_double(bound_stored));

    report("epsilon_hat", eps_hat <= 1.0 + lam_sum + 1e-9,
           format_double(eps_hat) + " <= 1 + sum(lambda) = " + format_double(1.0 + lam_sum));

    std::string truth_path = a.truth;
    if (truth_path.empty() && m.has("truth"))
        truth_path = m.get("truth");
    if (!truth_path.empty()) {
        const DenseTensor truth = read_tensor(truth_path);
        std::vector<double> diff(static_cast<std::size_t>(t.size()));
        for (Index i = 0; i < t.size(); ++i)
            diff[static_cast<std::size_t>(i)] = t[i] - truth[i];
        double f_feasible = tensor_norm(DenseTensor::from_raw(t.dims(), std::move(diff)), NormKind::l1);
        for (std::size_t n = 0; n < lambdas.size(); ++n)
            f_feasible += lambdas[n] * nuclear_norm(unfold(truth, static_cast<Index>(n + 1)));
        report("gap_bound", objective <= f_feasible + bound_stored,
               "f* = " + format_double(objective) + " vs f_feasible + bound = " +
                   format_double(f_feasible + bound_stored));
    }

    return all_ok ? 0 : 3;
}

// ------------------------------------------------------------- defaults ----

int do_defaults(std::ostream& out) {
    out << "mu0 = " << format_double(kDefaultMu0) << "\n";
    out << "mu_max = " << format_double(kDefaultMuMax) << "\n";
    out << "mu_growth = " << format_double(kDefaultMuGrowth) << "\n";
    out << "eps = " << format_double(kDefaultEps) << "\n";
    out << "maxiter = " << kDefaultMaxiter << "\n";
    out << "lambda_rule = sqrt(max(I_n, prod_{j!=n} I_j)) / N\n";
    out << "rank_bound_rule = floor(1.2 * target_rank)\n";
    out << "rpca_lambda_rule = 1 / sqrt(max(rows, cols))\n";
    return 0;
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"tenrec: low-rank + sparse tensor recovery"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic low-rank + sparse instance");
    synth_cmd->add_option("--dims", synth_args.dims, "tensor dimensions")->delimiter(',')->required();
    synth_cmd->add_option("--ranks", synth_args.ranks, "per-mode Tucker ranks")->delimiter(',');
    synth_cmd->add_option("--rank", synth_args.rank, "uniform Tucker rank");
    synth_cmd->add_option("--corruption", synth_args.corruption, "fraction of corrupted entries");
    synth_cmd->add_option("--seed", synth_args.seed, "generator seed");
    synth_cmd->add_option("--mode", synth_args.mode, "additive | replace255")
        ->check(CLI::IsMember({"additive", "replace255"}));
    synth_cmd->add_option("--out-prefix", synth_args.out_prefix, "output path prefix")->required();

    RecoverArgs recover_args;
    auto* recover_cmd = app.add_subcommand("recover", "split a tensor into low-rank + sparse parts");
    recover_cmd->add_option("--input", recover_args.input, "observed tensor (.tnsr)");
    recover_cmd->add_option("--truth", recover_args.truth, "ground truth tensor for RSE reporting");
    recover_cmd->add_option("--out-prefix", recover_args.out_prefix, "output path prefix");
    recover_cmd->add_option("--from-manifest", recover_args.from_manifest,
                            "re-run the configuration of an earlier manifest");
    recover_cmd->add_flag("--strict", recover_args.strict, "exit 4 if the solver does not converge");
    recover_cmd->add_flag("--no-z", recover_args.no_z, "skip writing per-mode estimates");
    add_solver_flags(recover_cmd, recover_args.solver);

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "multi-trial RSE/time comparison table");
    bench_cmd->add_option("--dims", bench_args.dims, "tensor dimensions")->delimiter(',')->required();
    bench_cmd->add_option("--rank", bench_args.rank, "uniform Tucker rank")->required();
    bench_cmd->add_option("--corruptions", bench_args.corruptions,
                          "corruption levels (list or lo:hi:step)");
    bench_cmd->add_option("--solvers", bench_args.solvers, "solvers to compare")->delimiter(',');
    bench_cmd->add_option("--trials", bench_args.trials, "independent trials per cell");
    bench_cmd->add_option("--seed", bench_args.seed, "master seed");
    bench_cmd->add_option("--eps", bench_args.eps, "stopping tolerance");
    bench_cmd->add_option("--maxiter", bench_args.maxiter, "iteration cap");
    bench_cmd->add_option("--out", bench_args.out, "metrics CSV path");

    PhaseArgs phase_args;
    auto* phase_cmd = app.add_subcommand("phase", "success-rate grid over (rank, corruption)");
    phase_cmd->add_option("--dims", phase_args.dims, "tensor dimensions")->delimiter(',')->required();
    phase_cmd->add_option("--rank-axis", phase_args.rank_axis, "rank axis (list or lo:hi:step)");
    phase_cmd->add_option("--corruption-axis", phase_args.corruption_axis,
                          "corruption axis (list or lo:hi:step)");
    phase_cmd->add_option("--trials", phase_args.trials, "trials per cell");
    phase_cmd->add_option("--threshold", phase_args.threshold, "success threshold on RSE");
    phase_cmd->add_option("--solver", phase_args.solver, "pasd | snn | rpca")
        ->check(CLI::IsMember({"pasd", "snn", "rpca"}));
    phase_cmd->add_option("--seed", phase_args.seed, "master seed");
    phase_cmd->add_option("--eps", phase_args.eps, "stopping tolerance");
    phase_cmd->add_option("--maxiter", phase_args.maxiter, "iteration cap");
    phase_cmd->add_option("--threads", phase_args.threads,
                          "worker cap (default: TENREC_THREADS or hardware)");
    phase_cmd->add_option("--out", phase_args.out, "output PGM path");

    CertifyArgs certify_args;
    auto* certify_cmd = app.add_subcommand("certify", "re-check the optimality certificate of a run");
    certify_cmd->add_option("--manifest", certify_args.manifest, "recover manifest")->required();
    certify_cmd->add_option("--truth", certify_args.truth, "ground truth tensor for the gap check");

    auto* defaults_cmd = app.add_subcommand("defaults", "print the built-in parameter defaults");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (synth_cmd->parsed())
            return do_synth(synth_args, out);
        if (recover_cmd->parsed())
            return do_recover(recover_args, out);
        if (bench_cmd->parsed())
            return do_bench(bench_args, out);
        if (phase_cmd->parsed())
            return do_phase(phase_args, out);
        if (certify_cmd->parsed())
            return do_certify(certify_args, out);
        if (defaults_cmd->parsed())
            return do_defaults(out);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const StateError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace tenrec
