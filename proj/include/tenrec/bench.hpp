#pragma once

#include <functional>
#include <string>

#include "tenrec/recovery.hpp"
#include "tenrec/synth.hpp"

namespace tenrec {

/// A named solver the harness can run on a generated instance. The spec of the
/// instance is passed along so per-instance parameter rules (weights, rank
/// bounds) can be applied.
struct SolverSpec {
    std::string name;
    std::function<RecoveryResult(const DenseTensor& observed, const SynthSpec& spec)> run;
};

/// Built-in solver wiring with the defaults used throughout: weights
/// sqrt(max(I_n, prod I_j))/N, rank bounds floor(1.2 r); eps/maxiter overridable.
SolverSpec make_pasd_solver(double eps = 1e-5, int maxiter = 1000);
SolverSpec make_snn_solver(double eps = 1e-5, int maxiter = 1000);
SolverSpec make_rpca_solver(double eps = 1e-5, int maxiter = 1000);

/// Deterministic per-trial seed, shared by all harness entry points so a trial
/// can be regenerated outside the harness.
std::uint64_t harness_trial_seed(std::uint64_t master_seed, std::uint64_t cell, std::uint64_t trial);

struct BenchRow {
    std::string solver;
    double rho = 0.0;
    Index rank = 0;
    int trials = 0;
    double mean_rse = 0.0;    // over trials that produced a result
    double mean_time_s = 0.0; // wall time around the solve call only
    double converged_frac = 0.0;
};

/// Table-style benchmark: for every corruption level, `trials` instances are
/// generated and every solver runs on the same instances. Solver exceptions
/// are recorded as failed trials (they count against converged_frac and are
/// excluded from the means). Runs serially so wall times are honest.
std::vector<BenchRow> run_table_benchmark(const std::vector<Index>& dims, Index rank,
                                          const std::vector<double>& rhos,
                                          const std::vector<SolverSpec>& solvers, int trials,
                                          std::uint64_t seed);

struct ExperimentGrid {
    std::vector<Index> rank_axis;         // ascending
    std::vector<double> corruption_axis;  // ascending
    int trials = 0;
    double rse_threshold = 1e-3;
    std::vector<int> success_counts;      // row-major, rows = corruption, cols = rank

    int count_at(std::size_t rho_idx, std::size_t rank_idx) const {
        return success_counts[rho_idx * rank_axis.size() + rank_idx];
    }
    void validate() const;
};

struct PhaseGridSpec {
    std::vector<Index> dims;
    std::vector<Index> rank_axis;
    std::vector<double> corruption_axis;
    int trials = 10;
    double rse_threshold = 1e-3;
    std::uint64_t seed = 0;
};

/// Success-rate grid: per (rank, corruption) cell, `trials` seeded instances;
/// a trial succeeds when RSE <= threshold (solver failure counts as a miss).
/// Cells run concurrently; TENREC_THREADS (or the `threads` argument) caps the
/// worker count. Results do not depend on the schedule.
ExperimentGrid phase_transition_sweep(const PhaseGridSpec& spec, const SolverSpec& solver,
                                      int threads = 0);

struct TimingRow {
    Index size = 0;
    std::string solver;
    double total_s = 0.0;
    double per_iter_s = 0.0;
    int iters = 0;
};

/// Per-size, per-solver wall times on one seeded cubic instance each, run
/// serially with one unmeasured warm-up run. Pass solvers built with a small
/// maxiter to measure per-iteration cost rather than convergence speed.
std::vector<TimingRow> timing_sweep(const std::vector<Index>& sizes,
                                    const std::vector<SolverSpec>& solvers, Index rank, double rho,
                                    std::uint64_t seed);

/// FNV-1a over the dims and payload bytes; used for mutation guards and manifests.
std::uint64_t tensor_checksum(const DenseTensor& t);

} // namespace tenrec
