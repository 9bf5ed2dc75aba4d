#include "relsmooth/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "relsmooth/errors.hpp"

namespace relsmooth {

using nlohmann::json;

namespace {

constexpr const char* kProblemFormat = "relsmooth-problem";

json vector_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

Vector vector_from(const json& a, const char* what) {
    if (!a.is_array()) {
        throw DataError(std::string(what) + ": expected an array of numbers");
    }
    Vector v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) {
            throw DataError(std::string(what) + ": non-numeric entry");
        }
        v[static_cast<Index>(i)] = a[i].get<double>();
    }
    return v;
}

json matrix_json(const Matrix& m) {
    json data = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            data.push_back(m(i, j));
        }
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from(const json& j) {
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const Vector flat = vector_from(j.at("data"), "matrix.data");
    if (rows < 0 || cols < 0 || flat.size() != rows * cols) {
        throw DataError("matrix: data length does not match rows * cols");
    }
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index k = 0; k < cols; ++k) {
            m(i, k) = flat[i * cols + k];
        }
    }
    return m;
}

// nlohmann stores non-finite doubles as null; keep them explicit instead.
json number_json(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

double number_from(const json& j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    const std::string s = j.get<std::string>();
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Unlike std::stod, accepts subnormal values (strtod flags them with ERANGE).
double parse_double(const std::string& cell) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (cell.empty() || end != begin + cell.size() || std::isspace(static_cast<unsigned char>(cell[0]))) {
        throw std::invalid_argument("not a number: " + cell);
    }
    return v;
}

std::optional<double> parse_optional(const std::string& cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    return parse_double(cell);
}

}  // namespace

std::string library_version() {
    return RELSMOOTH_VERSION;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- problems --------------------------------------------------------------------

std::string problem_to_json(const ProblemFile& file) {
    const ProblemData& d = file.data;
    json j;
    j["format"] = kProblemFormat;
    j["version"] = 1;
    j["builder"] = d.builder;
    if (d.matrix.size() > 0) {
        j["matrix"] = matrix_json(d.matrix);
    }
    if (d.vector.size() > 0) {
        j["vector"] = vector_json(d.vector);
    }
    j["scalars"] = json::object();
    for (const auto& [k, v] : d.scalars) {
        j["scalars"][k] = v;
    }
    json c = json::object();
    const CertificateOverrides& o = file.overrides;
    if (o.L) c["L"] = *o.L;
    if (o.mu) c["mu"] = *o.mu;
    if (o.w) c["w"] = vector_json(*o.w);
    if (o.sigma2) c["sigma2"] = *o.sigma2;
    if (o.f_star) c["f_star"] = *o.f_star;
    if (o.x_star) c["x_star"] = vector_json(*o.x_star);
    if (o.eso_v) c["eso_v"] = vector_json(*o.eso_v);
    if (!c.empty()) {
        j["certificates"] = c;
    }
    return j.dump(2);
}

ProblemFile problem_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("problem file: ") + e.what());
    }
    if (j.value("format", std::string()) != kProblemFormat) {
        throw DataError("problem file: missing or wrong \"format\" field");
    }
    static const std::vector<std::string> known = {"format", "version", "builder", "matrix",
                                                   "vector", "scalars", "certificates"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw DataError("problem file: unknown field \"" + key + "\"");
        }
    }
    ProblemFile f;
    try {
        f.data.builder = j.at("builder").get<std::string>();
        if (j.contains("matrix")) {
            f.data.matrix = matrix_from(j.at("matrix"));
        }
        if (j.contains("vector")) {
            f.data.vector = vector_from(j.at("vector"), "vector");
        }
        if (j.contains("scalars")) {
            for (const auto& [k, v] : j.at("scalars").items()) {
                f.data.scalars[k] = v.get<double>();
            }
        }
        if (j.contains("certificates")) {
            static const std::vector<std::string> cert_keys = {"L", "mu", "w", "sigma2",
                                                               "f_star", "x_star", "eso_v"};
            const json& c = j.at("certificates");
            for (const auto& [key, _] : c.items()) {
                if (std::find(cert_keys.begin(), cert_keys.end(), key) == cert_keys.end()) {
                    throw DataError("problem file: unknown certificate \"" + key + "\"");
                }
            }
            CertificateOverrides& o = f.overrides;
            if (c.contains("L")) o.L = c["L"].get<double>();
            if (c.contains("mu")) o.mu = c["mu"].get<double>();
            if (c.contains("w")) o.w = vector_from(c["w"], "certificates.w");
            if (c.contains("sigma2")) o.sigma2 = c["sigma2"].get<double>();
            if (c.contains("f_star")) o.f_star = c["f_star"].get<double>();
            if (c.contains("x_star")) o.x_star = vector_from(c["x_star"], "certificates.x_star");
            if (c.contains("eso_v")) o.eso_v = vector_from(c["eso_v"], "certificates.eso_v");
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("problem file: ") + e.what());
    }
    return f;
}

void apply_overrides(Problem& p, const CertificateOverrides& o) {
    const Index n = p.dimension();
    auto check_dim = [n](const Vector& v, const char* what) {
        if (v.size() != n) {
            throw DimensionMismatch(std::string(what) + " has the wrong dimension");
        }
    };
    if (o.L) p.cert.L = *o.L;
    if (o.mu) p.cert.mu = *o.mu;
    if (o.w) {
        check_dim(*o.w, "certificates.w");
        p.cert.w = *o.w;
    }
    if (o.sigma2) p.cert.sigma2 = *o.sigma2;
    if (o.f_star) p.cert.f_star = *o.f_star;
    if (o.x_star) {
        check_dim(*o.x_star, "certificates.x_star");
        p.cert.x_star = *o.x_star;
    }
    if (o.eso_v) {
        check_dim(*o.eso_v, "certificates.eso_v");
        EsoRule base = p.eso_rule;
        Vector v = *o.eso_v;
        p.eso_rule = [base, v](const Sampling& s) -> std::optional<Vector> {
            if (s.tau() == 1) {
                return v;
            }
            return base ? base(s) : std::nullopt;
        };
    }
}

Problem load_problem(const ProblemFile& file) {
    Problem p = build_problem(file.data);
    apply_overrides(p, file.overrides);
    return p;
}

// --- traces ----------------------------------------------------------------------

void write_trace_csv(std::ostream& out, const RunTrace& trace, const std::optional<double>& f_star) {
    const std::optional<double> fs = f_star ? f_star : trace.f_star;
    out << kTraceHeader << '\n';
    for (const TraceRecord& r : trace.records) {
        out << r.t << ',' << format_double(r.epoch) << ',' << format_double(r.f) << ',';
        if (fs) {
            out << format_double(r.f - *fs);
        }
        out << ',' << format_double(r.stepsize) << ',';
        if (r.breg_to_opt) {
            out << format_double(*r.breg_to_opt);
        }
        out << ',' << trace.seed << '\n';
    }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) {
        throw DataError("trace file: unexpected header");
    }
    std::vector<TraceRow> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        if (cells.size() != 7) {
            throw DataError("trace file: line " + std::to_string(lineno) + " has " +
                            std::to_string(cells.size()) + " fields, expected 7");
        }
        try {
            TraceRow r;
            r.iter = std::stol(cells[0]);
            r.epoch = parse_double(cells[1]);
            r.f = parse_double(cells[2]);
            r.gap = parse_optional(cells[3]);
            r.stepsize = parse_double(cells[4]);
            r.breg_to_opt = parse_optional(cells[5]);
            r.seed = std::stoull(cells[6]);
            rows.push_back(r);
        } catch (const std::logic_error&) {
            throw DataError("trace file: malformed number on line " + std::to_string(lineno));
        }
    }
    return rows;
}

// --- reports ---------------------------------------------------------------------

void write_bound_csv(std::ostream& out, const BoundTable& table) {
    out << "iter";
    for (const std::string& c : table.columns) {
        if (c.empty() || c.find_first_of(",\n") != std::string::npos) {
            throw InvalidParams("bound table: bad column name '" + c + "'");
        }
        out << ',' << c;
    }
    out << '\n';
    if (table.rows.size() != table.iter.size()) {
        throw DimensionMismatch("bound table: iter and rows differ in length");
    }
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.columns.size()) {
            throw DimensionMismatch("bound table: row width differs from the header");
        }
        out << table.iter[r];
        for (double v : table.rows[r]) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

BoundTable read_bound_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("bound file: empty");
    }
    std::vector<std::string> head = split(line);
    if (head.size() < 2 || head[0] != "iter") {
        throw DataError("bound file: header must start with iter and name at least one bound");
    }
    BoundTable t;
    t.columns.assign(head.begin() + 1, head.end());
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> cells = split(line);
        if (cells.size() != head.size()) {
            throw DataError("bound file: line " + std::to_string(lineno) + " has " +
                            std::to_string(cells.size()) + " fields, expected " +
                            std::to_string(head.size()));
        }
        try {
            t.iter.push_back(std::stol(cells[0]));
            std::vector<double> row;
            for (std::size_t i = 1; i < cells.size(); ++i) {
                row.push_back(parse_double(cells[i]));
            }
            t.rows.push_back(std::move(row));
        } catch (const std::logic_error&) {
            throw DataError("bound file: malformed number on line " + std::to_string(lineno));
        }
    }
    return t;
}

std::string bound_report_to_json(const BoundReport& r) {
    json j;
    j["value"] = number_json(r.value);
    j["quantity"] = to_string(r.quantity);
    j["inputs"] = json::object();
    for (const auto& [k, v] : r.inputs) {
        j["inputs"][k] = number_json(v);
    }
    j["extras"] = json::object();
    for (const auto& [k, v] : r.extras) {
        j["extras"][k] = number_json(v);
    }
    if (r.weights) {
        j["weights"] = {{"first_index", r.weights->first_index},
                        {"log_sum", number_json(r.weights->log_sum)},
                        {"normalized", vector_json(r.weights->normalized)}};
    }
    j["hypotheses_hold"] = r.hypotheses_hold;
    if (!r.note.empty()) {
        j["note"] = r.note;
    }
    return j.dump(2);
}

std::string check_report_to_json(const CheckReport& r) {
    json j;
    j["name"] = r.name;
    j["samples"] = r.samples;
    j["worst_slack"] = number_json(r.worst_slack);
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["detail"] = r.detail;
    json w = json::object();
    for (const auto& [k, v] : r.witness) {
        w[k] = vector_json(v);
    }
    j["witness"] = w;
    return j.dump(2);
}

CheckReport check_report_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        CheckReport r;
        r.name = j.at("name").get<std::string>();
        r.samples = j.at("samples").get<long>();
        r.worst_slack = number_from(j.at("worst_slack"));
        r.tolerance = j.at("tolerance").get<double>();
        r.pass = j.at("pass").get<bool>();
        r.detail = j.value("detail", std::string());
        for (const auto& [k, v] : j.at("witness").items()) {
            r.witness.emplace_back(k, vector_from(v, "witness"));
        }
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("check report: ") + e.what());
    }
}

}  // namespace relsmooth
