#include "turinglab/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace turinglab {

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-identical output
    if (!out) throw Error("cannot open for writing: " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw Error("write failed: " + path.string());
}

namespace {
constexpr char kMagic[4] = {'T', 'U', 'R', 'F'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_snapshot(const std::filesystem::path& path, const SpectralField& field,
                    double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());

    char header[32] = {};
    std::memcpy(header, kMagic, 4);
    const std::uint32_t version = kVersion;
    const std::uint32_t d = static_cast<std::uint32_t>(field.grid.d);
    const std::uint32_t n = static_cast<std::uint32_t>(field.grid.n);
    std::memcpy(header + 4, &version, 4);
    std::memcpy(header + 8, &d, 4);
    std::memcpy(header + 12, &n, 4);
    std::memcpy(header + 16, &t, 8);
    out.write(header, sizeof(header));

    const Eigen::Index cells = field.values.rows();
    for (int comp = 0; comp < 2; ++comp)
        out.write(reinterpret_cast<const char*>(field.values.col(comp).data()),
                  cells * static_cast<Eigen::Index>(sizeof(double)));
    if (!out) throw Error("write failed: " + path.string());
}

SnapshotData read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());

    char header[32];
    in.read(header, sizeof(header));
    if (!in || std::memcmp(header, kMagic, 4) != 0)
        throw Error("not a TURF snapshot: " + path.string());
    std::uint32_t version, d, n;
    std::memcpy(&version, header + 4, 4);
    std::memcpy(&d, header + 8, 4);
    std::memcpy(&n, header + 12, 4);
    if (version != kVersion)
        throw Error("unsupported TURF version in " + path.string());

    SnapshotData snap;
    std::memcpy(&snap.t, header + 16, 8);
    snap.grid = make_grid(static_cast<int>(d), static_cast<int>(n));
    const int cells = snap.grid.num_cells();
    snap.values.resize(cells, 2);
    for (int comp = 0; comp < 2; ++comp)
        in.read(reinterpret_cast<char*>(snap.values.col(comp).data()),
                cells * static_cast<std::streamsize>(sizeof(double)));
    if (!in) throw Error("truncated TURF snapshot: " + path.string());
    return snap;
}

}  // namespace turinglab
