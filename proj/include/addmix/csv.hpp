#pragma once
// CSV import/export for kernels and distributions. Format: a header line
// "# n=<n>" followed by comma-separated decimals, 17 significant digits.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "addmix/types.hpp"

namespace addmix {

namespace detail {

inline int parse_csv_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# n=", 0) != 0) {
        throw invariant_error("csv: missing '# n=<n>' header line");
    }
    try {
        return std::stoi(line.substr(4));
    } catch (const std::exception&) {
        throw invariant_error("csv: malformed header '" + line + "'");
    }
}

inline std::vector<double> parse_csv_row(const std::string& line, int expected) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            row.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw invariant_error("csv: cannot parse value '" + cell + "'");
        }
    }
    if (static_cast<int>(row.size()) != expected) {
        throw invariant_error("csv: row has " + std::to_string(row.size()) +
                              " values, expected " + std::to_string(expected));
    }
    return row;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw invariant_error("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace detail

inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
    out << "# n=" << m.rows() << "\n" << std::setprecision(17);
    for (Eigen::Index x = 0; x < m.rows(); ++x) {
        for (Eigen::Index y = 0; y < m.cols(); ++y) {
            if (y > 0) out << ",";
            out << m(x, y);
        }
        out << "\n";
    }
}

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    auto out = detail::open_output(path);
    write_matrix_csv(out, m);
}

inline Matrix read_matrix_csv(std::istream& in) {
    const int n = detail::parse_csv_header(in);
    Matrix m(n, n);
    std::string line;
    for (int x = 0; x < n; ++x) {
        if (!std::getline(in, line)) {
            throw invariant_error("csv: expected " + std::to_string(n) + " matrix rows, got " +
                                  std::to_string(x));
        }
        const auto row = detail::parse_csv_row(line, n);
        for (int y = 0; y < n; ++y) m(x, y) = row[y];
    }
    return m;
}

inline Matrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw invariant_error("cannot open " + path.string());
    return read_matrix_csv(in);
}

inline void write_distribution_csv(std::ostream& out, const Vector& v) {
    out << "# n=" << v.size() << "\n" << std::setprecision(17);
    for (Eigen::Index x = 0; x < v.size(); ++x) {
        if (x > 0) out << ",";
        out << v[x];
    }
    out << "\n";
}

inline void write_distribution_csv(const std::filesystem::path& path, const Vector& v) {
    auto out = detail::open_output(path);
    write_distribution_csv(out, v);
}

inline Vector read_distribution_csv(std::istream& in) {
    const int n = detail::parse_csv_header(in);
    std::string line;
    if (!std::getline(in, line)) throw invariant_error("csv: missing distribution row");
    const auto row = detail::parse_csv_row(line, n);
    Vector v(n);
    for (int x = 0; x < n; ++x) v[x] = row[x];
    return v;
}

inline Vector read_distribution_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw invariant_error("cannot open " + path.string());
    return read_distribution_csv(in);
}

/// Partition file: the same "# n=<n>" header, then one line of n
/// comma-separated 0-based block indices.
inline void write_partition_csv(std::ostream& out, const Partition& part) {
    out << "# n=" << part.n() << "\n";
    for (int x = 0; x < part.n(); ++x) {
        if (x > 0) out << ",";
        out << part.block_of(x);
    }
    out << "\n";
}

inline Partition read_partition_csv(std::istream& in) {
    const int n = detail::parse_csv_header(in);
    std::string line;
    if (!std::getline(in, line)) throw invariant_error("csv: missing partition row");
    const auto row = detail::parse_csv_row(line, n);
    std::vector<int> block_of(n);
    int k = 0;
    for (int x = 0; x < n; ++x) {
        block_of[x] = static_cast<int>(row[x]);
        k = std::max(k, block_of[x] + 1);
    }
    return Partition(std::move(block_of), k);
}

inline Partition read_partition_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw invariant_error("cannot open " + path.string());
    return read_partition_csv(in);
}

}  // namespace addmix
