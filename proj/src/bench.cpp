#include "tenrec/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>

#include "tenrec/baselines.hpp"
#include "tenrec/pasd.hpp"

namespace tenrec {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

int worker_count(int requested, std::size_t tasks) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("TENREC_THREADS"))
            n = std::atoi(env);
    }
    if (n <= 0)
        n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0)
        n = 1;
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(tasks, 1)));
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    std::atomic<bool> failed{false};
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load())
                    return;
                try {
                    body(i);
                } catch (...) {
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (failed.load())
        throw NumericalError("parallel sweep worker failed");
}

struct Instance {
    DenseTensor truth;
    DenseTensor observed;
};

Instance make_instance(const SynthSpec& spec) {
    Instance inst;
    inst.truth = gen_lowrank_tucker(spec);
    inst.observed = corrupt_sparse(inst.truth, spec.corruption_fraction, spec.seed).tensor;
    return inst;
}

void guard_unchanged(const DenseTensor& t, std::uint64_t checksum, const char* what) {
    if (tensor_checksum(t) != checksum)
        throw StateError(std::string("harness invariant violated: ") + what + " mutated during a trial");
}

} // namespace

SolverSpec make_pasd_solver(double eps, int maxiter) {
    return SolverSpec{"pasd", [eps, maxiter](const DenseTensor& observed, const SynthSpec& spec) {
                          PasdConfig cfg;
                          cfg.lambdas = PasdConfig::default_lambdas(observed.dims());
                          cfg.ranks.reserve(spec.ranks.size());
                          for (Index r : spec.ranks)
                              cfg.ranks.push_back(PasdConfig::default_rank_bound(r));
                          cfg.eps = eps;
                          cfg.maxiter = maxiter;
                          return pasd_recover(observed, cfg);
                      }};
}

SolverSpec make_snn_solver(double eps, int maxiter) {
    return SolverSpec{"snn", [eps, maxiter](const DenseTensor& observed, const SynthSpec&) {
                          SnnConfig cfg;
                          cfg.lambdas = PasdConfig::default_lambdas(observed.dims());
                          cfg.eps = eps;
                          cfg.maxiter = maxiter;
                          return snn_recover(observed, cfg);
                      }};
}

SolverSpec make_rpca_solver(double eps, int maxiter) {
    return SolverSpec{"rpca", [eps, maxiter](const DenseTensor& observed, const SynthSpec&) {
                          RpcaConfig cfg;
                          cfg.eps = eps;
                          cfg.maxiter = maxiter;
                          return rpca_unfold_recover(observed, cfg);
                      }};
}

std::uint64_t harness_trial_seed(std::uint64_t master_seed, std::uint64_t cell, std::uint64_t trial) {
    return derive_seed(master_seed, (cell << 20) ^ trial, rng_purpose::trial);
}

std::vector<BenchRow> run_table_benchmark(const std::vector<Index>& dims, Index rank,
                                          const std::vector<double>& rhos,
                                          const std::vector<SolverSpec>& solvers, int trials,
                                          std::uint64_t seed) {
    if (rhos.empty() || solvers.empty() || trials < 1)
        throw ArgumentError("benchmark: nothing to run");
    std::vector<BenchRow> rows;
    rows.reserve(rhos.size() * solvers.size());

    for (std::size_t ci = 0; ci < rhos.size(); ++ci) {
        std::vector<double> rse_sum(solvers.size(), 0.0);
        std::vector<double> time_sum(solvers.size(), 0.0);
        std::vector<int> ok(solvers.size(), 0);
        std::vector<int> converged(solvers.size(), 0);

        for (int trial = 0; trial < trials; ++trial) {
            SynthSpec spec;
            spec.dims = dims;
            spec.ranks.assign(dims.size(), rank);
            spec.corruption_fraction = rhos[ci];
            spec.seed = harness_trial_seed(seed, ci, static_cast<std::uint64_t>(trial));
            const Instance inst = make_instance(spec);
            const std::uint64_t truth_sum = tensor_checksum(inst.truth);
            const std::uint64_t obs_sum = tensor_checksum(inst.observed);

            for (std::size_t si = 0; si < solvers.size(); ++si) {
                try {
                    const auto start = clock_type::now();
                    const RecoveryResult res = solvers[si].run(inst.observed, spec);
                    const double elapsed = seconds_since(start);
                    rse_sum[si] += rse(res.x, inst.truth);
                    time_sum[si] += elapsed;
                    ok[si] += 1;
                    converged[si] += res.converged ? 1 : 0;
                } catch (const NumericalError&) {
                    // failed trial: counts against converged_frac only
                }
                guard_unchanged(inst.truth, truth_sum, "ground truth");
                guard_unchanged(inst.observed, obs_sum, "observed tensor");
            }
        }

        for (std::size_t si = 0; si < solvers.size(); ++si) {
            BenchRow row;
            row.solver = solvers[si].name;
            row.rho = rhos[ci];
            row.rank = rank;
            row.trials = trials;
            row.mean_rse = ok[si] > 0 ? rse_sum[si] / ok[si] : std::numeric_limits<double>::quiet_NaN();
            row.mean_time_s = ok[si] > 0 ? time_sum[si] / ok[si] : std::numeric_limits<double>::quiet_NaN();
            row.converged_frac = static_cast<double>(converged[si]) / trials;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void ExperimentGrid::validate() const {
    if (rank_axis.empty() || corruption_axis.empty())
        throw ArgumentError("grid: empty axis");
    if (trials < 1)
        throw ArgumentError("grid: trials must be positive");
    if (success_counts.size() != rank_axis.size() * corruption_axis.size())
        throw ArgumentError("grid: success_counts size mismatch");
    for (int c : success_counts)
        if (c < 0 || c > trials)
            throw ArgumentError("grid: success count outside [0, trials]");
    for (std::size_t i = 1; i < rank_axis.size(); ++i)
        if (rank_axis[i] <= rank_axis[i - 1])
            throw ArgumentError("grid: rank axis must be strictly increasing");
    for (std::size_t i = 1; i < corruption_axis.size(); ++i)
        if (corruption_axis[i] <= corruption_axis[i - 1])
            throw ArgumentError("grid: corruption axis must be strictly increasing");
}

ExperimentGrid phase_transition_sweep(const PhaseGridSpec& spec, const SolverSpec& solver,
                                      int threads) {
    if (spec.rank_axis.empty() || spec.corruption_axis.empty() || spec.trials < 1)
        throw ArgumentError("phase sweep: nothing to run");

    ExperimentGrid grid;
    grid.rank_axis = spec.rank_axis;
    grid.corruption_axis = spec.corruption_axis;
    grid.trials = spec.trials;
    grid.rse_threshold = spec.rse_threshold;
    grid.success_counts.assign(spec.rank_axis.size() * spec.corruption_axis.size(), 0);

    struct Task {
        std::size_t rho_idx;
        std::size_t rank_idx;
        int trial;
    };
    std::vector<Task> tasks;
    tasks.reserve(grid.success_counts.size() * static_cast<std::size_t>(spec.trials));
    for (std::size_t ri = 0; ri < spec.corruption_axis.size(); ++ri)
        for (std::size_t ki = 0; ki < spec.rank_axis.size(); ++ki)
            for (int trial = 0; trial < spec.trials; ++trial)
                tasks.push_back({ri, ki, trial});

    std::vector<std::atomic<int>> counts(grid.success_counts.size());
    for (auto& c : counts)
        c.store(0);

    const int workers = worker_count(threads, tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t i) {
        const Task& task = tasks[i];
        SynthSpec inst_spec;
        inst_spec.dims = spec.dims;
        inst_spec.ranks.assign(spec.dims.size(), spec.rank_axis[task.rank_idx]);
        inst_spec.corruption_fraction = spec.corruption_axis[task.rho_idx];
        const std::uint64_t cell = task.rho_idx * spec.rank_axis.size() + task.rank_idx;
        inst_spec.seed = harness_trial_seed(spec.seed, cell, static_cast<std::uint64_t>(task.trial));

        const Instance inst = make_instance(inst_spec);
        const std::uint64_t truth_sum = tensor_checksum(inst.truth);
        bool success = false;
        try {
            const RecoveryResult res = solver.run(inst.observed, inst_spec);
            success = rse(res.x, inst.truth) <= spec.rse_threshold;
        } catch (const NumericalError&) {
            success = false; // solver failure counts as an unsuccessful trial
        }
        guard_unchanged(inst.truth, truth_sum, "ground truth");
        if (success)
            counts[cell].fetch_add(1);
    });

    for (std::size_t i = 0; i < counts.size(); ++i)
        grid.success_counts[i] = counts[i].load();
    grid.validate();
    return grid;
}

std::vector<TimingRow> timing_sweep(const std::vector<Index>& sizes,
                                    const std::vector<SolverSpec>& solvers, Index rank, double rho,
                                    std::uint64_t seed) {
    if (sizes.empty() || solvers.empty())
        throw ArgumentError("timing sweep: nothing to run");
    std::vector<TimingRow> rows;
    rows.reserve(sizes.size() * solvers.size());

    for (std::size_t zi = 0; zi < sizes.size(); ++zi) {
        SynthSpec spec;
        spec.dims.assign(3, sizes[zi]);
        spec.ranks.assign(3, rank);
        spec.corruption_fraction = rho;
        spec.seed = harness_trial_seed(seed, zi, 0);
        const Instance inst = make_instance(spec);
        const std::uint64_t truth_sum = tensor_checksum(inst.truth);

        for (const SolverSpec& solver : solvers) {
            // Unmeasured warm-up touches the memory and the SVD workspaces.
            (void)solver.run(inst.observed, spec);
            const auto start = clock_type::now();
            const RecoveryResult res = solver.run(inst.observed, spec);
            const double elapsed = seconds_since(start);
            guard_unchanged(inst.truth, truth_sum, "ground truth");

            TimingRow row;
            row.size = sizes[zi];
            row.solver = solver.name;
            row.total_s = elapsed;
            row.iters = res.iters;
            row.per_iter_s = elapsed / std::max(res.iters, 1);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::uint64_t tensor_checksum(const DenseTensor& t) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const unsigned char* bytes, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t order = static_cast<std::uint64_t>(t.order());
    mix(reinterpret_cast<const unsigned char*>(&order), sizeof(order));
    for (Index d : t.dims()) {
        const std::uint64_t v = static_cast<std::uint64_t>(d);
        mix(reinterpret_cast<const unsigned char*>(&v), sizeof(v));
    }
    mix(reinterpret_cast<const unsigned char*>(t.data()),
        static_cast<std::size_t>(t.size()) * sizeof(double));
    return h;
}

} // namespace tenrec
