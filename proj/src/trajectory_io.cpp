#include "safepass/trajectory_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace safepass {

namespace {

void append_indexed(std::string& out, const char* prefix, int count) {
    for (int i = 0; i < count; ++i) {
        out += ',';
        out += prefix;
        out += std::to_string(i);
    }
}

void append_real(std::string& out, double x) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    out += ',';
    out.append(buf, static_cast<std::size_t>(len));
}

void append_vector(std::string& out, const Vector& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) append_real(out, x(i));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_real(const std::string& field, std::size_t line_no) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (field.empty() || end != begin + field.size()) {
        throw CsvFormatError("line " + std::to_string(line_no) + ": cannot parse '" + field + "'");
    }
    return x;
}

// Counts consecutive columns prefix0, prefix1, ... starting at pos.
int count_indexed(const std::vector<std::string>& header, std::size_t pos, const std::string& prefix) {
    int count = 0;
    while (pos + static_cast<std::size_t>(count) < header.size() &&
           header[pos + static_cast<std::size_t>(count)] == prefix + std::to_string(count)) {
        ++count;
    }
    return count;
}

}  // namespace

std::string csv_header(int n, int d) {
    std::string h = "t";
    append_indexed(h, "q", n);
    append_indexed(h, "v", n);
    append_indexed(h, "x", d);
    h += ",c,h,phi";
    append_indexed(h, "u", n);
    append_indexed(h, "u_nom", n);
    append_indexed(h, "mu", n);
    h += ",S,hdot,in_C,in_C_eps";
    return h;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
    out << csv_header(traj.dof(), traj.task_dim()) << '\n';
    std::string line;
    for (const auto& r : traj.records) {
        line.clear();
        append_real(line, r.t);
        line.erase(0, 1);
        append_vector(line, r.q);
        append_vector(line, r.v);
        append_vector(line, r.x);
        append_real(line, r.c);
        append_real(line, r.h);
        append_real(line, r.phi);
        append_vector(line, r.u);
        append_vector(line, r.u_nom);
        append_vector(line, r.mu);
        append_real(line, r.storage);
        append_real(line, r.hdot);
        line += r.in_c ? ",1" : ",0";
        line += r.in_c_eps ? ",1" : ",0";
        out << line << '\n';
    }
}

void write_csv_file(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(traj, out);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

Trajectory read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw CsvFormatError("trajectory file is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    if (header.empty() || header[0] != "t") throw CsvFormatError("header must start with 't'");
    const int n = count_indexed(header, 1, "q");
    const int d = count_indexed(header, 1 + 2 * static_cast<std::size_t>(n), "x");
    if (n < 1) throw CsvFormatError("header has no q columns");
    if (line != csv_header(n, d)) {
        throw CsvFormatError("unexpected header; expected '" + csv_header(n, d) + "'");
    }
    const std::size_t width = header.size();

    Trajectory traj;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != width) {
            throw CsvFormatError("line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(width) + " fields, got " + std::to_string(f.size()));
        }
        std::size_t pos = 0;
        auto real = [&] { return parse_real(f[pos++], line_no); };
        auto vec = [&](int count) {
            Vector x(count);
            for (int i = 0; i < count; ++i) x(i) = real();
            return x;
        };
        auto flag = [&] {
            const std::string& s = f[pos++];
            if (s == "1") return true;
            if (s == "0") return false;
            throw CsvFormatError("line " + std::to_string(line_no) + ": flag must be 0 or 1");
        };
        SimRecord r;
        r.t = real();
        r.q = vec(n);
        r.v = vec(n);
        r.x = vec(d);
        r.c = real();
        r.h = real();
        r.phi = real();
        r.u = vec(n);
        r.u_nom = vec(n);
        r.mu = vec(n);
        r.storage = real();
        r.hdot = real();
        r.in_c = flag();
        r.in_c_eps = flag();
        traj.records.push_back(std::move(r));
    }
    if (traj.records.empty()) throw CsvFormatError("trajectory file has no records");
    return traj;
}

Trajectory read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvFormatError("cannot open '" + path + "'");
    return read_csv(in);
}

}  // namespace safepass
