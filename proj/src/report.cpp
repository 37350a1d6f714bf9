#include "fcable/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fcable {

namespace {

constexpr const char* kHeader = "H,h,error_l2,order,cpu_seconds";

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

}  // namespace

std::string emit_csv(std::span<const ConvergenceRow> rows) {
    std::ostringstream out;
    out << kHeader << '\n';
    for (const auto& row : rows) {
        if (row.coarse_h) {
            out << format("%.6g", *row.coarse_h);
        }
        out << ',' << format("%.6g", row.fine_h);
        out << ',' << format("%.5e", row.error_l2);
        out << ',';
        if (row.order) {
            out << format("%.4f", *row.order);
        }
        out << ',' << format("%.6f", row.cpu_seconds) << '\n';
    }
    return out.str();
}

std::vector<ConvergenceRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw std::invalid_argument("CSV is missing the expected header");
    }
    std::vector<ConvergenceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 5) {
            throw std::invalid_argument("CSV row does not have 5 fields: " + line);
        }
        ConvergenceRow row;
        if (!fields[0].empty()) {
            row.coarse_h = std::stod(fields[0]);
        }
        row.fine_h = std::stod(fields[1]);
        row.error_l2 = std::stod(fields[2]);
        if (!fields[3].empty()) {
            row.order = std::stod(fields[3]);
        }
        row.cpu_seconds = std::stod(fields[4]);
        rows.push_back(row);
    }
    return rows;
}

void write_field(std::ostream& out, const Mesh2D& mesh, const std::vector<double>& nodal) {
    if (nodal.size() != mesh.node_count()) {
        throw std::invalid_argument("field values do not match the mesh's node count");
    }
    char buf[96];
    for (std::size_t node = 0; node < mesh.node_count(); ++node) {
        std::snprintf(buf, sizeof(buf), "%.9f %.9f %.9f\n", mesh.node_x(node), mesh.node_y(node),
                      nodal[node]);
        out << buf;
    }
}

void write_field_file(const std::string& path, const Mesh2D& mesh,
                      const std::vector<double>& nodal) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open field file for writing: " + path);
    }
    write_field(out, mesh, nodal);
}

}  // namespace fcable
