#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relsmooth/algorithms.hpp"
#include "relsmooth/problems.hpp"
#include "relsmooth/theory.hpp"
#include "relsmooth/verify.hpp"

namespace relsmooth {

/// Certificate values stored alongside an instance; each present field
/// replaces the builder's value.
struct CertificateOverrides {
    std::optional<double> L;
    std::optional<double> mu;
    std::optional<Vector> w;
    std::optional<double> sigma2;
    std::optional<double> f_star;
    std::optional<Vector> x_star;
    /// ESO vector for single-coordinate sampling.
    std::optional<Vector> eso_v;
};

struct ProblemFile {
    ProblemData data;
    CertificateOverrides overrides;
};

std::string problem_to_json(const ProblemFile& file);
ProblemFile problem_from_json(const std::string& text);

/// Builds the problem and applies the overrides.
Problem load_problem(const ProblemFile& file);
void apply_overrides(Problem& p, const CertificateOverrides& o);

/// One row of a trace file. Optional columns are empty in the file when unknown.
struct TraceRow {
    long iter = 0;
    double epoch = 0.0;
    double f = 0.0;
    std::optional<double> gap;
    double stepsize = 0.0;
    std::optional<double> breg_to_opt;
    std::uint64_t seed = 0;
};

inline constexpr const char* kTraceHeader = "iter,epoch,f,gap,stepsize,breg_to_opt,seed";

/// Writes the trace; `f_star` (or the trace's own) fills the gap column.
void write_trace_csv(std::ostream& out, const RunTrace& trace,
                     const std::optional<double>& f_star = std::nullopt);
std::vector<TraceRow> read_trace_csv(std::istream& in);

/// Version of the library, e.g. "0.3.0".
std::string library_version();

/// %.17g formatting, round-trips every finite double.
std::string format_double(double v);

/// Bound values tabulated on a trace's iteration grid. `columns` excludes the
/// leading iter column; every row has one value per column.
struct BoundTable {
    std::vector<std::string> columns;
    std::vector<long> iter;
    std::vector<std::vector<double>> rows;
};

void write_bound_csv(std::ostream& out, const BoundTable& table);
BoundTable read_bound_csv(std::istream& in);

std::string bound_report_to_json(const BoundReport& r);
std::string check_report_to_json(const CheckReport& r);
CheckReport check_report_from_json(const std::string& text);

}  // namespace relsmooth
