#pragma once

// On-disk formats: plain-text matrices and generator systems, point-cloud
// CSV/PLY export, and the binary orbit-index spill format. All numeric
// text is written with 17 significant digits so artifacts round-trip and
// rerun byte-identically.

#include "chg/dynamics.hpp"

#include <iosfwd>
#include <string>

namespace chg {

std::string format_real(double x);          // %.17g
std::string format_complex(cplx z);         // a+bi
cplx parse_complex(const std::string& tok);

void write_matrix(std::ostream& out, const Mat& m);
Mat read_matrix(std::istream& in, int rows, int cols);

// Plain-text generator system:
//   # chg generator system v1
//   dim <d>
//   generators <k>
//   generator <label>
//   <d rows of d entries a+bi>
//   ...
//   relator <word>        (zero or more)
void write_generator_system(std::ostream& out, const GeneratorSystem& sys);
GeneratorSystem read_generator_system(std::istream& in);
void save_generator_system(const std::string& path, const GeneratorSystem& sys);
GeneratorSystem load_generator_system(const std::string& path);

// CSV columns: re/im coordinate pairs, word length, method.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);

// ASCII PLY of an n=2 cloud, S^3 mapped to R^3 by stereographic projection
// from the given pole (a unit vector in C^2).
void write_cloud_ply(std::ostream& out, const PointCloud& cloud, const Vec& pole);

// Length-prefixed binary records (fingerprint hash, matrix, word).
void write_orbit_spill(std::ostream& out, const OrbitIndex& index);
struct SpillRecord {
    std::uint64_t fingerprint;
    Mat matrix;
    Word word;
};
std::vector<SpillRecord> read_orbit_spill(std::istream& in);

}  // namespace chg
