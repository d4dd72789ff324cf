#pragma once

#include "mbsed/shift.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbsed {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Plain comma-separated table with a header row; no quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int find_column(const std::string& name) const; // -1 if absent
    int column(const std::string& name) const;      // throws if absent
    double number(std::size_t row, int column) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal for a double (%.17g), so rewritten files are
/// byte-identical for identical values.
std::string format_number(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(std::vector<std::string> row);
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// delta_hz, pe_mean, pe_stderr
CsvWriter spectrum_csv(const Spectrum& s);

struct ShiftRowContext {
    int n_atoms = 0;
    double t_z_uk = 0.0;
    double t_r_uk = 0.0;
};

/// protocol, N, T_z_uK, T_r_uK, t1_s (Ramsey) or t_s (Rabi), tau_s, shift_hz,
/// shift_stderr_hz, pe_op, n_samples, converged
CsvWriter shift_csv(const std::vector<ShiftResult>& shifts, const ShiftRowContext& ctx);

} // namespace mbsed
