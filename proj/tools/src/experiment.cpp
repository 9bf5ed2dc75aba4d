#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "harness.hpp"
#include "relsmooth/algorithms.hpp"
#include "relsmooth/bregman.hpp"
#include "relsmooth/serialization.hpp"
#include "relsmooth/theory.hpp"
#include "relsmooth/verify.hpp"

namespace relsmooth::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

Matrix normal_matrix(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> nd;
    Matrix A(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            A(i, j) = nd(rng);
        }
    }
    return A;
}

Problem build_configured_problem(const ExperimentConfig& cfg, std::uint64_t rseed) {
    const ProblemSpec& s = cfg.problem;
    const std::uint64_t seed = s.seed.resolve(rseed);
    if (s.builder == "file") {
        fs::path path(s.file);
        if (path.is_relative() && fs::is_regular_file(cfg.origin)) {
            path = fs::path(cfg.origin).parent_path() / path;
        }
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw ConfigError("cannot read problem file " + path.string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return load_problem(problem_from_json(ss.str()));
    }
    if (s.builder == "quad_quartic") {
        return build_problem(quad_quartic_instance(s.n, seed, s.a, s.reference_quartic));
    }
    if (s.builder == "poisson_kl") {
        return build_problem(poisson_instance(s.m, s.n, seed));
    }
    if (s.builder == "regularized_poisson") {
        return build_problem(poisson_instance(s.m, s.n, seed, s.mu_reg));
    }
    if (s.builder == "d_optimal_design") {
        Rng rng = make_stream(seed, 0xD0E);
        return build_problem(ProblemData{"d_optimal_design", normal_matrix(s.m, s.n, rng), {}, {}});
    }
    if (s.builder == "noisy_quadratic") {
        Rng rng = make_stream(seed, 0x9A);
        const Matrix A = normal_matrix(s.n, s.n, rng);
        const Matrix M = A.transpose() * A / static_cast<double>(s.n) +
                         0.1 * Matrix::Identity(s.n, s.n);
        return noisy_quadratic(M, normal_start(s.n, 1.0, seed), s.noise_std);
    }
    throw ConfigError("unknown problem builder '" + s.builder + "'");
}

double resolve_L(const AlgorithmSpec& a, const Problem& p, const Vector& x0) {
    double L = p.cert.L;
    if (a.L_source == LSource::Sublevel) {
        L = quad_quartic_sublevel_smoothness(p, x0);
    } else if (a.L_source == LSource::Value) {
        L = a.L_value;
    }
    return L * a.L_scale;
}

const Vector& optimum_point(const Problem& p, const std::string& label) {
    if (!p.cert.x_star) {
        throw MissingCertificate(label + ": no optimum certificate, so D_h(x*, x0) is unknown");
    }
    return *p.cert.x_star;
}

double initial_distance(const Problem& p, const Vector& x0, const std::string& label) {
    return bregman(p.h, optimum_point(p, label), x0);
}

double initial_gap(const Problem& p, const Vector& x0, const std::string& label) {
    if (!p.cert.f_star) {
        throw MissingCertificate(label + ": no optimal value certificate");
    }
    return p.value(x0) - *p.cert.f_star;
}

double require_sigma2(const Problem& p, const std::string& label) {
    if (!p.cert.sigma2) {
        throw MissingCertificate(label + ": no gradient noise certificate");
    }
    return *p.cert.sigma2;
}

StepsizeSchedule make_schedule(const AlgorithmSpec& a, const Problem& p, const Vector& x0, long k) {
    const double base = resolve_L(a, p, x0) * a.schedule_scale;
    if (a.schedule == "constant") {
        return StepsizeSchedule::constant(base);
    }
    if (a.schedule == "linear") {
        return StepsizeSchedule::linear(base, a.alpha);
    }
    if (a.schedule == "sqrt_growth") {
        return StepsizeSchedule::sqrt_growth(base);
    }
    const double sigma2 = require_sigma2(p, a.label) / static_cast<double>(a.tau);
    return StepsizeSchedule::fixed_horizon_optimal(sigma2, base, initial_distance(p, x0, a.label),
                                                   static_cast<int>(k));
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json number_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(count, static_cast<std::size_t>(workers)));
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < w; ++t) {
        pool.emplace_back(loop);
    }
    loop();
    for (auto& th : pool) {
        th.join();
    }
}

struct OptimumInfo {
    double value = 0.0;
    std::string source;
    long reference_iterations = 0;
    std::string error;
};

OptimumInfo optimum_for(const ExperimentConfig& cfg, std::uint64_t rseed) {
    OptimumInfo info;
    try {
        const Instance inst = make_instance(cfg, rseed);
        const Problem& p = inst.problem;
        if (p.cert.f_star) {
            info.value = *p.cert.f_star;
            info.source = "certificate";
            return info;
        }
        double epochs = 1.0;
        for (const AlgorithmSpec& a : cfg.algorithms) {
            epochs = std::max(epochs, static_cast<double>(iteration_budget(a, p)) /
                                          static_cast<double>(iterations_per_epoch(a, p)));
        }
        const long k = static_cast<long>(std::ceil(cfg.reference_factor * epochs));
        RunOptions o;
        o.stride = static_cast<int>(std::min<long>(k, std::numeric_limits<int>::max()));
        const RunTrace t = relgd(p, inst.x0, p.cert.L, k, o);
        double best = std::numeric_limits<double>::infinity();
        for (const TraceRecord& r : t.records) {
            best = std::min(best, r.f);
        }
        info.value = best;
        info.source = "reference, not exact";
        info.reference_iterations = k;
    } catch (const std::exception& e) {
        info.error = e.what();
    }
    return info;
}

struct RunResult {
    json entry;
    bool failed = false;
};

RunResult run_one(const ExperimentConfig& cfg, const AlgorithmSpec& a, const Instance& inst,
                  std::size_t replicate, std::uint64_t rseed, const OptimumInfo& opt,
                  const fs::path& out) {
    RunResult res;
    json& e = res.entry;
    e["algorithm"] = a.label;
    e["method"] = to_string(a.method);
    e["replicate"] = replicate;
    e["seed"] = rseed;
    e["rng_stream"] = a.rng_stream;
    const Problem& p = inst.problem;
    try {
        const long k = iteration_budget(a, p);
        e["iterations"] = k;
        RunOptions o;
        o.stride = record_stride(cfg, a, p);
        o.seed = rseed;
        o.max_retries = a.max_retries;
        Rng rng = make_stream(rseed, a.rng_stream);
        RunTrace trace;
        switch (a.method) {
            case Method::GradientDescent: {
                const double L = resolve_L(a, p, inst.x0);
                e["L"] = L;
                trace = gradient_descent(p, inst.x0, L, k, o);
                break;
            }
            case Method::RelGD: {
                const double L = resolve_L(a, p, inst.x0);
                e["L"] = L;
                trace = relgd(p, inst.x0, L, k, o);
                break;
            }
            case Method::RelRCDS: {
                const double L = resolve_L(a, p, inst.x0);
                e["L"] = L;
                e["tau"] = a.tau;
                trace = relrcds(p, inst.x0, L, a.tau, k, rng, o);
                break;
            }
            case Method::RelRCD: {
                const EsoCertificate cert = make_eso(p, Sampling(p.dimension(), a.tau));
                e["tau"] = a.tau;
                e["max_v"] = cert.v.maxCoeff();
                trace = relrcd(p, inst.x0, cert, k, rng, o);
                break;
            }
            case Method::RelSGD: {
                const StepsizeSchedule sch = make_schedule(a, p, inst.x0, k);
                e["tau"] = a.tau;
                e["schedule"] = sch.describe();
                trace = relsgd(p, inst.x0, sch, a.tau, k, rng, o);
                break;
            }
        }
        const std::optional<double> fs_value =
            opt.error.empty() ? std::optional<double>(opt.value) : std::nullopt;
        const fs::path rel = fs::path("traces") / (a.label + "_seed" + std::to_string(rseed) + ".csv");
        {
            std::ofstream f(out / rel, std::ios::binary);
            if (!f) {
                throw DataError("cannot write " + (out / rel).string());
            }
            write_trace_csv(f, trace, fs_value);
        }
        e["status"] = to_string(trace.status);
        e["file"] = rel.generic_string();
        e["records"] = trace.records.size();
        e["retries"] = trace.retries;
        e["final_f"] = number_or_null(trace.records.back().f);
        if (fs_value) {
            e["final_gap"] = number_or_null(trace.records.back().f - *fs_value);
        }
        if (!trace.message.empty()) {
            e["message"] = trace.message;
        }
        e["warnings"] = trace.warnings;
        res.failed = trace.status == RunStatus::Aborted;
    } catch (const std::exception& ex) {
        e["status"] = "failed";
        e["message"] = ex.what();
        res.failed = true;
    }
    return res;
}

std::vector<std::string> bound_columns(const BoundReport& r) {
    std::vector<std::string> cols{to_string(r.quantity)};
    for (const auto& [key, value] : r.extras) {
        cols.push_back(key);
    }
    return cols;
}

/// Tabulates `bound(k)` on the grid; extra columns follow the first report.
template <class Fn>
BoundTable tabulate(const std::vector<long>& grid, Fn&& bound, std::optional<double> plateau_shift) {
    BoundTable t;
    for (long k : grid) {
        const BoundReport r = bound(k);
        if (t.columns.empty()) {
            t.columns = bound_columns(r);
            if (plateau_shift && r.extras.count("plateau")) {
                t.columns.push_back("plateau_f");
            }
            t.columns.push_back("hypotheses_hold");
        }
        std::vector<double> row{r.value};
        for (std::size_t c = 1; c < t.columns.size(); ++c) {
            const std::string& name = t.columns[c];
            if (name == "hypotheses_hold") {
                row.push_back(r.hypotheses_hold ? 1.0 : 0.0);
            } else if (name == "plateau_f") {
                const auto it = r.extras.find("plateau");
                row.push_back(it == r.extras.end() ? std::nan("") : *plateau_shift + it->second);
            } else {
                const auto it = r.extras.find(name);
                row.push_back(it == r.extras.end() ? std::nan("") : it->second);
            }
        }
        t.iter.push_back(k);
        t.rows.push_back(std::move(row));
    }
    return t;
}

BoundTable bound_table(const AlgorithmSpec& a, const Problem& p, const Vector& x0,
                       const std::vector<long>& grid) {
    const double mu = p.cert.mu;
    const auto n = static_cast<long>(p.dimension());
    switch (a.method) {
        case Method::GradientDescent:
            break;
        case Method::RelGD: {
            const double L = resolve_L(a, p, x0);
            const double D0 = initial_distance(p, x0, a.label);
            return tabulate(grid, [&](long k) { return bound_relgd(L, mu, D0, k); }, std::nullopt);
        }
        case Method::RelRCDS: {
            const double L = resolve_L(a, p, x0);
            const double D0 = initial_distance(p, x0, a.label);
            const double gap0 = initial_gap(p, x0, a.label);
            return tabulate(grid, [&](long k) { return bound_relrcds(L, mu, a.tau, n, D0, gap0, k); },
                            std::nullopt);
        }
        case Method::RelRCD: {
            const EsoCertificate cert = make_eso(p, Sampling(p.dimension(), a.tau));
            const double D0v = weighted_bregman(p.h, optimum_point(p, a.label), x0, cert.v);
            const double gap0 = initial_gap(p, x0, a.label);
            const Vector w = p.strong_convexity_vector();
            const double p0 = cert.sampling.marginal();
            return tabulate(grid, [&](long k) { return bound_relrcd_eso(cert.v, w, p0, D0v, gap0, k); },
                            std::nullopt);
        }
        case Method::RelSGD: {
            const double D0 = initial_distance(p, x0, a.label);
            const double sigma2 = require_sigma2(p, a.label);
            const long budget = iteration_budget(a, p);
            const StepsizeSchedule sch = make_schedule(a, p, x0, budget);
            return tabulate(
                grid,
                [&](long k) { return bound_relsgd_minibatch(sch, p.cert.L, mu, sigma2, a.tau, D0, k); },
                p.cert.f_star);
        }
    }
    throw InvalidParams(a.label + ": no bound for " + to_string(a.method));
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw DataError("cannot create output directory " + dir.string());
    }
}

}  // namespace

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t replicate_seed) {
    Problem p = build_configured_problem(cfg, replicate_seed);
    const Index n = p.dimension();
    const StartSpec& s = cfg.start;
    Vector x0;
    if (s.kind == "normal" || s.kind == "abs_normal") {
        x0 = normal_start(n, s.scale, s.seed.resolve(replicate_seed));
        if (s.kind == "abs_normal") {
            x0 = x0.cwiseAbs();
        }
    } else if (s.kind == "ones") {
        x0 = Vector::Ones(n);
    } else if (s.kind == "uniform") {
        x0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
    } else {
        throw ConfigError("unknown start kind '" + s.kind + "'");
    }
    if (!p.feasible(x0)) {
        throw ConfigError("start point of kind '" + s.kind + "' is outside the domain of " + p.name);
    }
    return {std::move(p), std::move(x0)};
}

long iterations_per_epoch(const AlgorithmSpec& a, const Problem& p) {
    switch (a.method) {
        case Method::GradientDescent:
        case Method::RelGD:
            return 1;
        case Method::RelRCDS:
        case Method::RelRCD: {
            const long n = static_cast<long>(p.dimension());
            return std::max<long>(1, (n + a.tau - 1) / a.tau);
        }
        case Method::RelSGD: {
            const long m = std::max<long>(1, static_cast<long>(p.f->num_terms()));
            return std::max<long>(1, (m + a.tau - 1) / a.tau);
        }
    }
    return 1;
}

long iteration_budget(const AlgorithmSpec& a, const Problem& p) {
    return a.iterations ? *a.iterations : *a.epochs * iterations_per_epoch(a, p);
}

int record_stride(const ExperimentConfig& cfg, const AlgorithmSpec& a, const Problem& p) {
    if (a.stride) {
        return *a.stride;
    }
    if (cfg.stride) {
        return *cfg.stride;
    }
    return static_cast<int>(iterations_per_epoch(a, p));
}

std::vector<long> record_grid(long k, int stride) {
    std::vector<long> g;
    for (long t = 0; t <= k; t += stride) {
        g.push_back(t);
    }
    if (g.back() != k) {
        g.push_back(k);
    }
    return g;
}

fs::path resolve_output_dir(const ExperimentConfig& cfg, const std::optional<std::string>& override_dir) {
    if (override_dir) {
        return *override_dir;
    }
    if (cfg.output_dir) {
        return *cfg.output_dir;
    }
    if (const char* env = std::getenv("RELSMOOTH_OUTPUT_DIR"); env && *env) {
        return fs::path(env) / cfg.name;
    }
    return fs::path("relsmooth_out") / cfg.name;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const fs::path& out, int workers) {
    if (cfg.algorithms.empty()) {
        throw ConfigError(cfg.origin + ": no [algorithm.<label>] sections");
    }
    if (cfg.seeds.empty()) {
        throw ConfigError(cfg.origin + ": empty replicate list");
    }
    // fail loudly on a broken problem or start before any worker starts
    make_instance(cfg, cfg.seeds.front());
    ensure_dir(out / "traces");
    if (workers <= 0) {
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }

    // one reference optimum per distinct instance
    const bool shared = !cfg.problem.seed.per_replicate && !cfg.start.seed.per_replicate;
    const std::vector<std::uint64_t> distinct =
        shared ? std::vector<std::uint64_t>{cfg.seeds.front()} : cfg.seeds;
    std::vector<OptimumInfo> optima(distinct.size());
    parallel_for(distinct.size(), workers, [&](std::size_t i) { optima[i] = optimum_for(cfg, distinct[i]); });
    auto optimum_of = [&](std::size_t replicate) -> const OptimumInfo& {
        return optima[shared ? 0 : replicate];
    };

    const std::size_t n_alg = cfg.algorithms.size();
    std::vector<RunResult> results(cfg.seeds.size() * n_alg);
    parallel_for(cfg.seeds.size(), workers, [&](std::size_t r) {
        const std::uint64_t s = cfg.seeds[r];
        std::optional<Instance> inst;
        std::string build_error;
        try {
            inst = make_instance(cfg, s);
        } catch (const std::exception& e) {
            build_error = e.what();
        }
        for (std::size_t j = 0; j < n_alg; ++j) {
            RunResult& res = results[r * n_alg + j];
            if (inst) {
                res = run_one(cfg, cfg.algorithms[j], *inst, r, s, optimum_of(r), out);
            } else {
                res.failed = true;
                res.entry = {{"algorithm", cfg.algorithms[j].label},
                             {"method", to_string(cfg.algorithms[j].method)},
                             {"replicate", r},
                             {"seed", s},
                             {"status", "failed"},
                             {"message", build_error}};
            }
        }
    });

    BoundsSummary bounds;
    std::string bounds_error;
    try {
        bounds = emit_bounds(cfg, out, false);
    } catch (const std::exception& e) {
        bounds_error = e.what();
    }

    RunSummary summary;
    json m;
    m["format"] = "relsmooth-manifest";
    m["format_version"] = 1;
    m["library_version"] = library_version();
    m["created_utc"] = utc_timestamp();
    m["experiment"] = cfg.name;
    m["config"] = {{"origin", cfg.origin}, {"fnv1a64", hex64(fnv1a64(cfg.text))}, {"bytes", cfg.text.size()}};
    m["seeds"] = cfg.seeds;
    m["workers"] = workers;
    json optimum = json::array();
    for (std::size_t i = 0; i < distinct.size(); ++i) {
        json o;
        o["instance_seed"] = distinct[i];
        if (optima[i].error.empty()) {
            o["value"] = number_or_null(optima[i].value);
            o["source"] = optima[i].source;
            if (optima[i].reference_iterations > 0) {
                o["reference_method"] = "relgd";
                o["reference_iterations"] = optima[i].reference_iterations;
            }
        } else {
            o["value"] = nullptr;
            o["source"] = "unavailable";
            o["message"] = optima[i].error;
        }
        optimum.push_back(o);
    }
    m["f_star"] = optimum;
    json runs = json::array();
    double max_v = -1.0;
    for (const RunResult& r : results) {
        runs.push_back(r.entry);
        ++summary.runs;
        summary.failed += r.failed ? 1 : 0;
        if (r.entry.contains("max_v")) {
            max_v = std::max(max_v, r.entry["max_v"].get<double>());
        }
    }
    m["runs"] = runs;
    if (max_v > 0.0) {
        m["realized_max_v"] = max_v;
    }
    json b;
    std::vector<std::string> files;
    for (const fs::path& f : bounds.written) {
        files.push_back(fs::relative(f, out).generic_string());
    }
    b["files"] = files;
    b["missing_certificates"] = bounds.missing;
    b["not_applicable"] = bounds.not_applicable;
    if (!bounds_error.empty()) {
        b["error"] = bounds_error;
    }
    m["bounds"] = b;

    summary.manifest = out / "manifest.json";
    std::ofstream f(summary.manifest, std::ios::binary);
    if (!f) {
        throw DataError("cannot write " + summary.manifest.string());
    }
    f << m.dump(2) << '\n';
    return summary;
}

BoundsSummary emit_bounds(const ExperimentConfig& cfg, const fs::path& out, bool strict) {
    if (cfg.algorithms.empty()) {
        throw ConfigError(cfg.origin + ": no [algorithm.<label>] sections");
    }
    const Instance inst = make_instance(cfg, cfg.seeds.front());
    ensure_dir(out / "bounds");
    BoundsSummary summary;
    for (const AlgorithmSpec& a : cfg.algorithms) {
        if (a.method == Method::GradientDescent) {
            summary.not_applicable.push_back(a.label);
            continue;
        }
        const long k = iteration_budget(a, inst.problem);
        std::vector<long> grid = record_grid(k, record_stride(cfg, a, inst.problem));
        grid.erase(grid.begin());
        BoundTable table;
        try {
            table = bound_table(a, inst.problem, inst.x0, grid);
        } catch (const MissingCertificate& e) {
            summary.missing.push_back(e.what());
            continue;
        }
        const fs::path path = out / "bounds" / (a.label + ".csv");
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw DataError("cannot write " + path.string());
        }
        write_bound_csv(f, table);
        summary.written.push_back(path);
    }
    if (strict && !summary.missing.empty()) {
        std::string msg;
        for (const std::string& s : summary.missing) {
            msg += (msg.empty() ? "" : "; ") + s;
        }
        throw MissingCertificate(msg);
    }
    return summary;
}

CheckSummary run_checks(const ExperimentConfig& cfg, const fs::path& out) {
    const Instance inst = make_instance(cfg, cfg.seeds.front());
    SuiteOptions o;
    o.seed = cfg.check.seed;
    o.n_pairs = cfg.check.n_pairs;
    o.n_points = cfg.check.n_points;
    if (cfg.check.l_scale != 1.0) {
        o.L_override = inst.problem.cert.L * cfg.check.l_scale;
    }
    const std::vector<CheckReport> reports = run_verify_suite(inst.problem, o);
    ensure_dir(out / "checks");
    CheckSummary summary;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        // "relative_smoothness (L=2.5)" -> "relative_smoothness"
        std::string name = reports[i].name.substr(0, reports[i].name.find_first_of(" ("));
        for (char& ch : name) {
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-') {
                ch = '_';
            }
        }
        char prefix[8];
        std::snprintf(prefix, sizeof prefix, "%02zu_", i);
        const fs::path path = out / "checks" / (prefix + name + ".json");
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw DataError("cannot write " + path.string());
        }
        f << check_report_to_json(reports[i]) << '\n';
        summary.written.push_back(path);
        ++summary.total;
        summary.failed += reports[i].pass ? 0 : 1;
    }
    return summary;
}

}  // namespace relsmooth::harness
