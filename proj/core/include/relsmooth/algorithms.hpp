#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relsmooth/problems.hpp"
#include "relsmooth/schedule.hpp"
#include "relsmooth/types.hpp"

namespace relsmooth {

struct TraceRecord {
    long t = 0;
    /// Coordinate updates / n for coordinate methods, oracle rows / m for the
    /// stochastic method, t for full-gradient methods.
    double epoch = 0.0;
    double f = 0.0;
    /// Stepsize parameter used to produce x_{t+1} from x_t (L, L_t, or max v).
    double stepsize = 0.0;
    std::optional<double> breg_to_opt;     // D_h(x*, x_t)
    std::optional<double> breg_full_step;  // D_h(x_t, x_(t+1,*)), v-weighted for relrcd
    double wall_seconds = 0.0;
    std::optional<Vector> x;
};

enum class RunStatus { Completed, EarlyStopped, Aborted };

std::string to_string(RunStatus s);

struct RunTrace {
    std::string algorithm;
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::Completed;
    std::string message;
    /// Stochastic steps that left the domain and were redrawn.
    int retries = 0;
    std::optional<double> f_star;
    std::vector<TraceRecord> records;
    Vector final_x;
    std::vector<std::string> warnings;
};

struct RunOptions {
    /// Keep x_t every `thin` iterations (0 keeps none). The last iterate is
    /// always available as RunTrace::final_x.
    int thin = 0;
    /// Record every `stride`-th iteration plus the last one. Weighted outputs
    /// need stride 1.
    int stride = 1;
    /// Record D_h(x_t, x_(t+1,*)) each iteration (one extra full gradient).
    bool track_full_step = false;
    /// Stop once D_h(x_t, x_(t+1,*)) falls below this value.
    std::optional<double> early_stop_tol;
    /// Seed recorded in the trace for provenance.
    std::uint64_t seed = 0;
    /// Redraws allowed per stochastic step before the run aborts.
    int max_retries = 10;
};

/// x_{t+1} = argmin <grad f(x_t), x> + L D_h(x, x_t) over Q.
RunTrace relgd(const Problem& p, const Vector& x0, double L, long k, const RunOptions& opts = {});

/// Each step draws a tau-nice subset and moves only those coordinates with
/// stepsize parameter L.
RunTrace relrcds(const Problem& p, const Vector& x0, double L, long tau, long k, Rng& rng,
                 const RunOptions& opts = {});

/// Coordinate method with per-coordinate stepsizes v from an ESO certificate.
RunTrace relrcd(const Problem& p, const Vector& x0, const EsoCertificate& cert, long k, Rng& rng,
                const RunOptions& opts = {});

/// x_{t+1} = mirror step with the mean of tau oracle draws and parameter L_t.
RunTrace relsgd(const Problem& p, const Vector& x0, const StepsizeSchedule& schedule, long tau,
                long k, Rng& rng, const RunOptions& opts = {});

/// Classical x - grad f(x) / L in Euclidean geometry, ignoring h.
RunTrace gradient_descent(const Problem& p, const Vector& x0, double L, long k,
                          const RunOptions& opts = {});

/// sum_t c_t (f(x_t) - f*). Weights of length records.size() align with
/// t = 0..k; length records.size() - 1 aligns with t = 1..k.
double weighted_output(const RunTrace& trace, const Vector& weights);
double weighted_output(const RunTrace& trace, const Vector& weights, double f_star);

}  // namespace relsmooth
