#pragma once

// File emission: CSV with shortest round-trip decimal formatting, and the
// TURF binary snapshot format.
//
// TURF layout (little endian):
//   bytes  0..3   magic "TURF"
//   bytes  4..7   uint32 version (1)
//   bytes  8..11  uint32 d
//   bytes 12..15  uint32 n
//   bytes 16..23  float64 time
//   bytes 24..31  reserved (zero)
// followed by n^d row-major float64 u samples, then the v block.

#include <filesystem>
#include <string>
#include <vector>

#include "turinglab/spectral.hpp"

namespace turinglab {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

struct SnapshotData {
    double t = 0.0;
    Grid grid;
    Eigen::ArrayXXd values;  // num_cells x 2
};

void write_snapshot(const std::filesystem::path& path, const SpectralField& field,
                    double t);
SnapshotData read_snapshot(const std::filesystem::path& path);

}  // namespace turinglab
