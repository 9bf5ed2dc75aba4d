#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "relsmooth/errors.hpp"
#include "relsmooth/problems.hpp"

namespace relsmooth::harness {

class ConfigError : public Error {
public:
    using Error::Error;
};

class MissingCertificate : public Error {
public:
    using Error::Error;
};

/// Either a fixed seed or the replicate's own seed.
struct SeedSpec {
    bool per_replicate = false;
    std::uint64_t value = 0;

    std::uint64_t resolve(std::uint64_t replicate_seed) const {
        return per_replicate ? replicate_seed : value;
    }
};

struct ProblemSpec {
    /// quad_quartic, poisson_kl, regularized_poisson, d_optimal_design,
    /// noisy_quadratic, or file.
    std::string builder;
    std::string file;
    Index n = 0;
    Index m = 0;
    SeedSpec seed;
    double a = 0.1;
    double reference_quartic = 1.0;
    double mu_reg = 0.0;
    double noise_std = 0.0;
};

struct StartSpec {
    /// normal, abs_normal, ones, or uniform (the simplex barycenter).
    std::string kind;
    double scale = 1.0;
    SeedSpec seed;
};

enum class Method { GradientDescent, RelGD, RelRCDS, RelRCD, RelSGD };

std::string to_string(Method m);

enum class LSource { Certificate, Sublevel, Value };

struct AlgorithmSpec {
    std::string label;
    Method method = Method::RelGD;
    LSource L_source = LSource::Certificate;
    double L_value = 0.0;
    double L_scale = 1.0;
    long tau = 1;
    /// constant, linear, sqrt_growth or optimal (relsgd only).
    std::string schedule = "constant";
    double schedule_scale = 1.0;
    double alpha = 0.0;
    std::optional<long> epochs;
    std::optional<long> iterations;
    /// Record stride; nullopt means one record per epoch.
    std::optional<int> stride;
    int max_retries = 10;
    std::uint64_t rng_stream = 1;
};

struct CheckSpec {
    int n_pairs = 1000;
    int n_points = 5;
    std::uint64_t seed = 2024;
    double l_scale = 1.0;
};

struct ExperimentConfig {
    std::string name;
    std::vector<std::uint64_t> seeds;
    std::optional<int> stride;
    int workers = 0;
    std::optional<std::string> output_dir;
    double reference_factor = 10.0;
    ProblemSpec problem;
    StartSpec start;
    std::vector<AlgorithmSpec> algorithms;
    CheckSpec check;
    /// Raw text the config was parsed from; hashed into the manifest.
    std::string text;
    std::string origin;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
std::string preset_text(const std::string& name);

std::uint64_t fnv1a64(const std::string& bytes);

struct Instance {
    Problem problem;
    Vector x0;
};

Instance make_instance(const ExperimentConfig& cfg, std::uint64_t replicate_seed);

/// Iterations one epoch of this algorithm takes on p.
long iterations_per_epoch(const AlgorithmSpec& a, const Problem& p);
long iteration_budget(const AlgorithmSpec& a, const Problem& p);
int record_stride(const ExperimentConfig& cfg, const AlgorithmSpec& a, const Problem& p);
/// The iterations a trace records: 0, s, 2s, ... plus the last one.
std::vector<long> record_grid(long k, int stride);

/// Precedence: explicit override, config output_dir, then
/// $RELSMOOTH_OUTPUT_DIR/<name>, then relsmooth_out/<name>.
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const std::optional<std::string>& override_dir);

struct RunSummary {
    int runs = 0;
    int failed = 0;
    std::filesystem::path manifest;
};

/// Runs every (algorithm, replicate) pair, writes traces, overlays and the
/// manifest. Failed runs are recorded in the manifest.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out,
                          int workers);

struct BoundsSummary {
    std::vector<std::filesystem::path> written;
    /// label: reason, for algorithms whose bound needs a missing certificate.
    std::vector<std::string> missing;
    /// Algorithms without a certificate-based bound at all.
    std::vector<std::string> not_applicable;
};

/// Overlay files for the first replicate's instance. With `strict`, throws
/// MissingCertificate after writing whatever was possible.
BoundsSummary emit_bounds(const ExperimentConfig& cfg, const std::filesystem::path& out,
                          bool strict);

struct CheckSummary {
    int total = 0;
    int failed = 0;
    std::vector<std::filesystem::path> written;
};

CheckSummary run_checks(const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace relsmooth::harness
