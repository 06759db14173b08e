#include "tenrec/io.hpp"

#include <atomic>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <system_error>
#include <unistd.h>

namespace tenrec {

static_assert(std::endian::native == std::endian::little,
              "tensor file I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};
constexpr std::uint16_t kVersion = 1;

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
    static std::atomic<unsigned> counter{0};
    const unsigned id = counter.fetch_add(1);
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(static_cast<unsigned long>(::getpid())) + "." + std::to_string(id);
    return tmp;
}

// Writes everything to a sibling temp file, then renames over the target.
class AtomicFileWriter {
public:
    explicit AtomicFileWriter(const std::filesystem::path& path)
        : target_(path), temp_(temp_sibling(path)), out_(temp_, std::ios::binary | std::ios::trunc) {
        if (!out_)
            throw IoError("cannot open '" + temp_.string() + "' for writing");
    }

    ~AtomicFileWriter() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(temp_, ec);
        }
    }

    std::ostream& stream() { return out_; }

    void commit() {
        out_.flush();
        if (!out_)
            throw IoError("write to '" + temp_.string() + "' failed");
        out_.close();
        std::error_code ec;
        std::filesystem::rename(temp_, target_, ec);
        if (ec)
            throw IoError("cannot rename '" + temp_.string() + "' to '" + target_.string() +
                          "': " + ec.message());
        committed_ = true;
    }

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::ofstream out_;
    bool committed_ = false;
};

void put_u16(std::ostream& out, std::uint16_t v) {
    const unsigned char bytes[2] = {static_cast<unsigned char>(v & 0xff),
                                    static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(bytes), 2);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

} // namespace

DenseTensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");

    auto read_exact = [&](char* dst, std::streamsize count, std::uint64_t offset, const char* what) {
        in.read(dst, count);
        if (in.gcount() != count)
            throw IoError("'" + path.string() + "': truncated " + what + " at byte offset " +
                          std::to_string(offset + static_cast<std::uint64_t>(in.gcount())) +
                          " (needed " + std::to_string(count) + " bytes, got " +
                          std::to_string(in.gcount()) + ")");
    };

    char magic[4];
    read_exact(magic, 4, 0, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("'" + path.string() + "': bad magic at byte offset 0 (expected \"TNSR\")");

    unsigned char hdr[4];
    read_exact(reinterpret_cast<char*>(hdr), 4, 4, "header");
    const std::uint16_t version = static_cast<std::uint16_t>(hdr[0] | (hdr[1] << 8));
    const std::uint16_t order = static_cast<std::uint16_t>(hdr[2] | (hdr[3] << 8));
    if (version != kVersion)
        throw IoError("'" + path.string() + "': unsupported version " + std::to_string(version) +
                      " at byte offset 4");
    if (order == 0)
        throw IoError("'" + path.string() + "': zero order at byte offset 6");

    std::vector<Index> dims(order);
    for (std::uint16_t n = 0; n < order; ++n) {
        unsigned char raw[8];
        read_exact(reinterpret_cast<char*>(raw), 8, 8 + 8ull * n, "dimension");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(raw[i]) << (8 * i);
        if (v == 0 || v > static_cast<std::uint64_t>(std::numeric_limits<Index>::max()))
            throw IoError("'" + path.string() + "': invalid dimension " + std::to_string(v) +
                          " at byte offset " + std::to_string(8 + 8ull * n));
        dims[n] = static_cast<Index>(v);
    }

    const Index total = dims_product(dims);
    const std::uint64_t payload_offset = 8 + 8ull * order;
    std::vector<double> data(static_cast<std::size_t>(total));
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(sizeof(double) * data.size()));
    const auto got = in.gcount();
    if (got != static_cast<std::streamsize>(sizeof(double) * data.size()))
        throw IoError("'" + path.string() + "': truncated payload at byte offset " +
                      std::to_string(payload_offset + static_cast<std::uint64_t>(got)) + " (expected " +
                      std::to_string(sizeof(double) * data.size()) + " payload bytes, got " +
                      std::to_string(got) + ")");
    if (in.peek() != std::ifstream::traits_type::eof())
        throw IoError("'" + path.string() + "': trailing bytes after payload at byte offset " +
                      std::to_string(payload_offset + sizeof(double) * data.size()));

    for (std::size_t i = 0; i < data.size(); ++i)
        if (!std::isfinite(data[i]))
            throw IoError("'" + path.string() + "': non-finite value at payload index " +
                          std::to_string(i) + " (byte offset " +
                          std::to_string(payload_offset + sizeof(double) * i) + ")");

    return DenseTensor::from_raw(std::move(dims), std::move(data));
}

void write_tensor(const DenseTensor& t, const std::filesystem::path& path) {
    if (t.order() < 1)
        throw ArgumentError("write_tensor: empty tensor");
    if (!t.all_finite())
        throw ArgumentError("write_tensor: tensor contains non-finite entries");
    if (t.order() > std::numeric_limits<std::uint16_t>::max())
        throw ArgumentError("write_tensor: order does not fit the header");

    AtomicFileWriter writer(path);
    std::ostream& out = writer.stream();
    out.write(kMagic, 4);
    put_u16(out, kVersion);
    put_u16(out, static_cast<std::uint16_t>(t.order()));
    for (Index d : t.dims())
        put_u64(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(t.size())));
    writer.commit();
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n\r") == std::string::npos)
        return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

} // namespace

void write_metrics_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
    if (rows.empty())
        throw ArgumentError("write_metrics_csv: empty table");
    AtomicFileWriter writer(path);
    std::ostream& out = writer.stream();
    out << "solver,rho,rank,trials,mean_rse,mean_time_s,converged_frac\r\n";
    for (const BenchRow& row : rows) {
        out << csv_field(row.solver) << ',' << format_double(row.rho) << ',' << row.rank << ','
            << row.trials << ',' << format_double(row.mean_rse) << ','
            << format_double(row.mean_time_s) << ',' << format_double(row.converged_frac) << "\r\n";
    }
    writer.commit();
}

void write_timing_csv(const std::vector<TimingRow>& rows, const std::filesystem::path& path) {
    if (rows.empty())
        throw ArgumentError("write_timing_csv: empty table");
    AtomicFileWriter writer(path);
    std::ostream& out = writer.stream();
    out << "size,solver,total_s,per_iter_s,iters\r\n";
    for (const TimingRow& row : rows) {
        out << row.size << ',' << csv_field(row.solver) << ',' << format_double(row.total_s) << ','
            << format_double(row.per_iter_s) << ',' << row.iters << "\r\n";
    }
    writer.commit();
}

void write_phase_pgm(const ExperimentGrid& grid, const std::filesystem::path& path) {
    grid.validate();
    const std::size_t cols = grid.rank_axis.size();
    const std::size_t rows = grid.corruption_axis.size();

    AtomicFileWriter writer(path);
    std::ostream& out = writer.stream();
    out << "P5\n" << cols << ' ' << rows << "\n255\n";
    std::vector<unsigned char> scanline(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const long pixel =
                std::lround(255.0 * static_cast<double>(grid.count_at(r, c)) / grid.trials);
            scanline[c] = static_cast<unsigned char>(pixel);
        }
        out.write(reinterpret_cast<const char*>(scanline.data()),
                  static_cast<std::streamsize>(scanline.size()));
    }
    writer.commit();

    std::filesystem::path axes = path;
    axes.replace_extension();
    axes += ".axes.csv";
    AtomicFileWriter axes_writer(axes);
    std::ostream& aout = axes_writer.stream();
    aout << "axis,values\r\n";
    aout << "rank";
    for (Index r : grid.rank_axis)
        aout << ',' << r;
    aout << "\r\n";
    aout << "rho";
    for (double c : grid.corruption_axis)
        aout << ',' << format_double(c);
    aout << "\r\n";
    axes_writer.commit();
}

void RunManifest::set(const std::string& key, std::string value) {
    for (auto& entry : entries_) {
        if (entry.first == key) {
            entry.second = std::move(value);
            return;
        }
    }
    entries_.emplace_back(key, std::move(value));
}

void RunManifest::set_double(const std::string& key, double value) { set(key, format_double(value)); }
void RunManifest::set_int(const std::string& key, long long value) { set(key, std::to_string(value)); }
void RunManifest::set_bool(const std::string& key, bool value) { set(key, value ? "true" : "false"); }

void RunManifest::set_doubles(const std::string& key, const std::vector<double>& values) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            joined += ',';
        joined += format_double(values[i]);
    }
    set(key, std::move(joined));
}

void RunManifest::set_indices(const std::string& key, const std::vector<Index>& values) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            joined += ',';
        joined += std::to_string(values[i]);
    }
    set(key, std::move(joined));
}

bool RunManifest::has(const std::string& key) const {
    for (const auto& entry : entries_)
        if (entry.first == key)
            return true;
    return false;
}

const std::string& RunManifest::get(const std::string& key) const {
    for (const auto& entry : entries_)
        if (entry.first == key)
            return entry.second;
    throw IoError("manifest: missing key '" + key + "'");
}

double RunManifest::get_double(const std::string& key) const {
    const std::string& raw = get(key);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
        throw IoError("manifest: key '" + key + "' is not a number: '" + raw + "'");
    return v;
}

long long RunManifest::get_int(const std::string& key) const {
    const std::string& raw = get(key);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(raw.c_str(), &end, 10);
    if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
        throw IoError("manifest: key '" + key + "' is not an integer: '" + raw + "'");
    return v;
}

bool RunManifest::get_bool(const std::string& key) const {
    const std::string& raw = get(key);
    if (raw == "true")
        return true;
    if (raw == "false")
        return false;
    throw IoError("manifest: key '" + key + "' is not a boolean: '" + raw + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& raw) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : raw) {
        if (c == ',') {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!raw.empty())
        parts.push_back(current);
    return parts;
}

} // namespace

std::vector<double> RunManifest::get_doubles(const std::string& key) const {
    std::vector<double> values;
    for (const std::string& part : split_csv(get(key))) {
        char* end = nullptr;
        values.push_back(std::strtod(part.c_str(), &end));
        if (end == part.c_str() || *end != '\0')
            throw IoError("manifest: key '" + key + "' has a malformed number: '" + part + "'");
    }
    return values;
}

std::vector<Index> RunManifest::get_indices(const std::string& key) const {
    std::vector<Index> values;
    for (const std::string& part : split_csv(get(key))) {
        char* end = nullptr;
        values.push_back(static_cast<Index>(std::strtoll(part.c_str(), &end, 10)));
        if (end == part.c_str() || *end != '\0')
            throw IoError("manifest: key '" + key + "' has a malformed integer: '" + part + "'");
    }
    return values;
}

void RunManifest::save(const std::filesystem::path& path) const {
    AtomicFileWriter writer(path);
    std::ostream& out = writer.stream();
    for (const auto& [key, value] : entries_)
        out << key << " = " << value << '\n';
    writer.commit();
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open manifest '" + path.string() + "'");
    RunManifest manifest;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        const auto pos = line.find('=');
        if (pos == std::string::npos)
            throw IoError("manifest '" + path.string() + "': malformed line " + std::to_string(lineno));
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        manifest.set(trim(line.substr(0, pos)), trim(line.substr(pos + 1)));
    }
    return manifest;
}

} // namespace tenrec
