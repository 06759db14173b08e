#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tenrec/bench.hpp"
#include "tenrec/tensor.hpp"

namespace tenrec {

/// TNSR tensor file layout (all integers little-endian):
///   bytes 0..3   magic "TNSR"
///   bytes 4..5   version, uint16 (currently 1)
///   bytes 6..7   order N, uint16
///   then N uint64 dimensions
///   then prod(dims) IEEE-754 doubles, first index fastest.
/// read_tensor rejects bad magic/version, truncation (naming byte offsets),
/// trailing bytes and non-finite payload values.
DenseTensor read_tensor(const std::filesystem::path& path);

/// Inverse of read_tensor; writes to a temporary file in the same directory
/// and renames it into place.
void write_tensor(const DenseTensor& t, const std::filesystem::path& path);

/// CSV with header solver,rho,rank,trials,mean_rse,mean_time_s,converged_frac,
/// RFC-4180 quoting, floats at 17 significant digits. Rejects empty tables.
void write_metrics_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path);

void write_timing_csv(const std::vector<TimingRow>& rows, const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255): pixel = round(255 * successes / trials),
/// corruption ascending top to bottom, rank ascending left to right. A
/// companion <stem>.axes.csv records the axis values.
void write_phase_pgm(const ExperimentGrid& grid, const std::filesystem::path& path);

/// Flat ordered key = value text file describing one run; enough to re-run it.
class RunManifest {
public:
    void set(const std::string& key, std::string value);
    void set_double(const std::string& key, double value);          // 17 significant digits
    void set_int(const std::string& key, long long value);
    void set_bool(const std::string& key, bool value);
    void set_doubles(const std::string& key, const std::vector<double>& values);
    void set_indices(const std::string& key, const std::vector<Index>& values);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const; // throws IoError if missing
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<Index> get_indices(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    void save(const std::filesystem::path& path) const; // atomic
    static RunManifest load(const std::filesystem::path& path);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// %.17g rendering used everywhere a double must round-trip exactly.
std::string format_double(double value);

} // namespace tenrec
