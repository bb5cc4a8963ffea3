#pragma once

// File formats shared by the CLI and library consumers.
//
// Time series CSV: header "d0,d1,...,d{k-1}", one state per row in time
// order, decimal floats. Values are written with 17 significant digits,
// which round-trips every finite double. Distance reports serialize as
// JSON with a stable field order.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tscong/errors.hpp"
#include "tscong/rigid_transform.hpp"
#include "tscong/time_series.hpp"

namespace tscong {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline TimeSeries read_series_csv(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(name + ": empty file", 1);

    const auto header = detail::split_csv_line(line);
    if (header.empty()) throw ParseError(name + ": empty header", 1);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (detail::trim(header[i]) != "d" + std::to_string(i))
            throw ParseError(name + ": header must read d0,d1,...,d" +
                                 std::to_string(header.size() - 1),
                             1);
    }
    const std::size_t dim = header.size();

    std::vector<Eigen::VectorXd> states;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != dim)
            throw ParseError(name + ": expected " + std::to_string(dim) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        Eigen::VectorXd state(static_cast<Eigen::Index>(dim));
        for (std::size_t d = 0; d < dim; ++d) {
            const std::string cell = detail::trim(fields[d]);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size())
                throw ParseError(name + ": cell '" + fields[d] + "' is not a number", line_no);
            state(static_cast<Eigen::Index>(d)) = v;
        }
        states.push_back(std::move(state));
    }
    if (states.empty()) throw ParseError(name + ": no data rows", line_no);
    return TimeSeries::from_states(states);
}

inline TimeSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return read_series_csv(in, path.string());
}

inline void write_series_csv(const TimeSeries& series, std::ostream& out) {
    for (Eigen::Index d = 0; d < series.dim(); ++d) {
        if (d) out << ',';
        out << 'd' << d;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < series.size(); ++i) {
        for (Eigen::Index d = 0; d < series.dim(); ++d) {
            if (d) out << ',';
            out << detail::format_double(series.states()(i, d));
        }
        out << '\n';
    }
}

inline void write_series_csv(const TimeSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    write_series_csv(series, out);
    if (!out) throw InputError("write failed for " + path.string());
}

enum class Measure {
    Series,
    Delta,
    ReducedDelta,
    CongruenceUpper,
    CongruenceBoolean,
    CongruenceGrid2,
    CongruenceSignedPerm,
};

inline const char* measure_name(Measure m) {
    switch (m) {
        case Measure::Series: return "series";
        case Measure::Delta: return "delta";
        case Measure::ReducedDelta: return "reduced-delta";
        case Measure::CongruenceUpper: return "congruence-upper";
        case Measure::CongruenceBoolean: return "congruence-boolean";
        case Measure::CongruenceGrid2: return "congruence-grid2";
        case Measure::CongruenceSignedPerm: return "congruence-signed-perm";
    }
    return "unknown";
}

inline bool is_congruence_measure(Measure m) {
    return m == Measure::CongruenceUpper || m == Measure::CongruenceBoolean ||
           m == Measure::CongruenceGrid2 || m == Measure::CongruenceSignedPerm;
}

struct DistanceReport {
    Measure measure = Measure::Series;
    double value = 0.0;
    std::optional<Eigen::Index> offset;        // present iff windowing occurred
    std::optional<RigidTransform> witness;     // present iff congruence measure
    bool certified = false;
    nlohmann::ordered_json params;             // echo of the configuration
};

inline nlohmann::ordered_json transform_to_json(const RigidTransform& tr) {
    nlohmann::ordered_json j;
    std::vector<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < tr.matrix.rows(); ++r) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < tr.matrix.cols(); ++c) row.push_back(tr.matrix(r, c));
        rows.push_back(std::move(row));
    }
    j["matrix"] = rows;
    j["translation"] = std::vector<double>(tr.translation.data(),
                                           tr.translation.data() + tr.translation.size());
    return j;
}

inline nlohmann::ordered_json report_to_json(const DistanceReport& report) {
    if (report.witness.has_value() != is_congruence_measure(report.measure))
        throw InputError("report witness must be present exactly for congruence measures");
    if (report.offset.has_value() == is_congruence_measure(report.measure))
        throw InputError("report offset must be present exactly for windowed measures");

    nlohmann::ordered_json j;
    j["measure"] = measure_name(report.measure);
    j["value"] = report.value;
    if (report.offset) j["offset"] = *report.offset;
    if (report.witness) j["witness"] = transform_to_json(*report.witness);
    j["certified"] = report.certified;
    j["params"] = report.params.is_null() ? nlohmann::ordered_json::object() : report.params;
    return j;
}

inline void write_report_json(const DistanceReport& report, std::ostream& out) {
    out << report_to_json(report).dump(2) << '\n';
}

}  // namespace tscong
