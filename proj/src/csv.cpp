#include "mbsed/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mbsed {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

int CsvTable::find_column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

int CsvTable::column(const std::string& name) const {
    const int c = find_column(name);
    if (c < 0) throw CsvError("missing CSV column '" + name + "'");
    return c;
}

double CsvTable::number(std::size_t row, int col) const {
    const auto& r = rows.at(row);
    if (col < 0 || static_cast<std::size_t>(col) >= r.size())
        throw CsvError("row " + std::to_string(row + 2) + " is too short");
    const std::string& s = r[static_cast<std::size_t>(col)];
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty())
        throw CsvError("row " + std::to_string(row + 2) + ": '" + s + "' is not a number");
    return v;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
            continue;
        if (!have_header) {
            t.header = split(line);
            have_header = true;
        } else {
            t.rows.push_back(split(line));
        }
    }
    if (!have_header) throw CsvError("empty CSV");
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw CsvError("CSV row width does not match header");
    rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
    std::ostringstream os;
    auto emit = [&os](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return os.str();
}

void CsvWriter::write(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot write " + path.string());
    out << str();
}

CsvWriter spectrum_csv(const Spectrum& s) {
    CsvWriter w({"delta_hz", "pe_mean", "pe_stderr"});
    for (std::size_t i = 0; i < s.detuning_hz.size(); ++i)
        w.add({format_number(s.detuning_hz[i]), format_number(s.pe_mean[i]), format_number(s.pe_stderr[i])});
    return w;
}

CsvWriter shift_csv(const std::vector<ShiftResult>& shifts, const ShiftRowContext& ctx) {
    const bool rabi = !shifts.empty() &&
                      (shifts.front().protocol == Protocol::Rabi || shifts.front().protocol == Protocol::CollectiveRabi);
    CsvWriter w({"protocol", "N", "T_z_uK", "T_r_uK", rabi ? "t_s" : "t1_s", "tau_s", "shift_hz", "shift_stderr_hz",
                 "pe_op", "n_samples", "converged"});
    for (const auto& r : shifts) {
        w.add({to_string(r.protocol), std::to_string(ctx.n_atoms), format_number(ctx.t_z_uk), format_number(ctx.t_r_uk),
               format_number(r.pulse_time_s), format_number(r.tau_s), format_number(r.shift_hz),
               format_number(r.stderr_hz), format_number(r.pe_op), std::to_string(r.n_samples),
               r.converged ? "1" : "0"});
    }
    return w;
}

} // namespace mbsed
