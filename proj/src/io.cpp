#include "chg/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace chg {

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string format_complex(cplx z) {
    char buf[140];
    std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

cplx parse_complex(const std::string& tok) {
    if (tok.empty() || tok.back() != 'i')
        throw Error("parse_complex: expected trailing 'i' in '" + tok + "'");
    const std::string body = tok.substr(0, tok.size() - 1);
    // split at the sign of the imaginary part (not an exponent sign)
    for (size_t k = body.size(); k-- > 1;) {
        const char c = body[k];
        if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            return cplx(std::stod(body.substr(0, k)), std::stod(body.substr(k)));
        }
    }
    throw Error("parse_complex: malformed entry '" + tok + "'");
}

void write_matrix(std::ostream& out, const Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << format_complex(m(r, c));
        }
        out << '\n';
    }
}

Mat read_matrix(std::istream& in, int rows, int cols) {
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            std::string tok;
            if (!(in >> tok)) throw Error("read_matrix: unexpected end of input");
            m(r, c) = parse_complex(tok);
        }
    return m;
}

void write_generator_system(std::ostream& out, const GeneratorSystem& sys) {
    const int d = sys.ball_dim() + 1;
    out << "# chg generator system v1\n";
    out << "dim " << d << '\n';
    out << "generators " << sys.size() << '\n';
    for (int i = 0; i < sys.size(); ++i) {
        out << "generator " << sys.labels[i] << '\n';
        write_matrix(out, sys.generators[i].matrix());
    }
    for (const Word& w : sys.relators) out << "relator " << word_to_string(sys, w) << '\n';
}

GeneratorSystem read_generator_system(std::istream& in) {
    GeneratorSystem sys;
    int dim = 0, count = 0;
    std::string line;
    std::vector<std::string> relator_lines;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "dim") {
            ls >> dim;
            if (dim < 2) throw Error("generator system: bad dim");
        } else if (key == "generators") {
            ls >> count;
        } else if (key == "generator") {
            std::string label;
            ls >> label;
            if (label.empty()) throw Error("generator system: missing label");
            if (dim == 0) throw Error("generator system: dim must precede generators");
            sys.labels.push_back(label);
            sys.generators.push_back(Isometry(read_matrix(in, dim, dim)));
        } else if (key == "relator") {
            std::string rest;
            std::getline(ls, rest);
            relator_lines.push_back(rest);
        } else {
            throw Error("generator system: unknown key '" + key + "'");
        }
    }
    if (sys.generators.empty()) throw Error("generator system: no generators");
    if (count != sys.size()) throw Error("generator system: generator count mismatch");
    for (const std::string& r : relator_lines) sys.relators.push_back(parse_word(sys, r));
    return sys;
}

void save_generator_system(const std::string& path, const GeneratorSystem& sys) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    write_generator_system(out, sys);
}

GeneratorSystem load_generator_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    return read_generator_system(in);
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
    out << "# columns:";
    for (int k = 0; k < cloud.ball_dim; ++k) out << " re" << k << " im" << k;
    out << " word_length method\n";
    for (const auto& p : cloud.points) {
        const Vec& xi = p.point.coords();
        for (Eigen::Index k = 0; k < xi.size(); ++k) {
            if (k) out << ',';
            out << format_real(xi(k).real()) << ',' << format_real(xi(k).imag());
        }
        out << ',' << p.word_length << ',' << cloud.method << '\n';
    }
}

void write_cloud_ply(std::ostream& out, const PointCloud& cloud, const Vec& pole) {
    if (cloud.ball_dim != 2) throw Error("write_cloud_ply: only n = 2 clouds");
    if (pole.size() != 2 || std::abs(pole.norm() - 1.0) > 1e-9)
        throw Error("write_cloud_ply: pole must be a unit vector in C^2");

    // orthonormal frame of the pole's real-orthogonal complement in R^4
    auto to_r4 = [](const Vec& v) {
        Eigen::Vector4d r;
        r << v(0).real(), v(0).imag(), v(1).real(), v(1).imag();
        return r;
    };
    const Eigen::Vector4d p4 = to_r4(pole);
    Eigen::Matrix<double, 4, 3> frame;
    int have = 0;
    for (int k = 0; k < 4 && have < 3; ++k) {
        Eigen::Vector4d e = Eigen::Vector4d::Zero();
        e(k) = 1.0;
        e -= e.dot(p4) * p4;
        for (int j = 0; j < have; ++j) e -= e.dot(frame.col(j)) * frame.col(j);
        if (e.norm() < 1e-8) continue;
        frame.col(have++) = e / e.norm();
    }
    if (have != 3) throw Error("write_cloud_ply: failed to build projection frame");

    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.points.size() << '\n';
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "end_header\n";
    for (const auto& p : cloud.points) {
        const Eigen::Vector4d x = to_r4(p.point.coords());
        const double denom = 1.0 - x.dot(p4);
        if (std::abs(denom) < 1e-12) {
            out << "0 0 0\n";  // the pole itself has no finite image
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            if (k) out << ' ';
            out << format_real(x.dot(frame.col(k)) / denom);
        }
        out << '\n';
    }
}

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("orbit spill: truncated stream");
    return v;
}

std::uint64_t fingerprint_hash(const Mat& m) {
    const Mat unit = m / m.norm();
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](double x) {
        const double snapped = std::floor(x / 1e-7);
        std::uint64_t bits;
        std::memcpy(&bits, &snapped, sizeof(bits));
        h ^= bits;
        h *= 0x100000001b3ull;
    };
    const cplx tr = unit.trace();
    mix(tr.real());
    mix(tr.imag());
    mix(std::abs(unit(0, 0)));
    mix(unit.cwiseAbs().sum());
    return h;
}

}  // namespace

void write_orbit_spill(std::ostream& out, const OrbitIndex& index) {
    out.write("CHGORBIT1\n", 10);
    const auto& elems = index.elements();
    put<std::uint32_t>(out, elems.empty() ? 0 : static_cast<std::uint32_t>(
                                                    elems.front().matrix.rows()));
    put<std::uint64_t>(out, elems.size());
    for (const auto& e : elems) {
        put<std::uint64_t>(out, fingerprint_hash(e.matrix));
        for (Eigen::Index r = 0; r < e.matrix.rows(); ++r)
            for (Eigen::Index c = 0; c < e.matrix.cols(); ++c) {
                put<double>(out, e.matrix(r, c).real());
                put<double>(out, e.matrix(r, c).imag());
            }
        put<std::uint32_t>(out, static_cast<std::uint32_t>(e.word.size()));
        for (int letter : e.word) put<std::int32_t>(out, letter);
    }
}

std::vector<SpillRecord> read_orbit_spill(std::istream& in) {
    char magic[10];
    in.read(magic, 10);
    if (!in || std::memcmp(magic, "CHGORBIT1\n", 10) != 0)
        throw Error("orbit spill: bad magic");
    const auto dim = get<std::uint32_t>(in);
    const auto count = get<std::uint64_t>(in);
    std::vector<SpillRecord> records;
    records.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        SpillRecord rec;
        rec.fingerprint = get<std::uint64_t>(in);
        rec.matrix = Mat(dim, dim);
        for (std::uint32_t r = 0; r < dim; ++r)
            for (std::uint32_t c = 0; c < dim; ++c) {
                const double re = get<double>(in);
                const double im = get<double>(in);
                rec.matrix(r, c) = cplx(re, im);
            }
        const auto wl = get<std::uint32_t>(in);
        for (std::uint32_t k = 0; k < wl; ++k) rec.word.push_back(get<std::int32_t>(in));
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace chg
