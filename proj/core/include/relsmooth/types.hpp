#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace relsmooth {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Deterministic generator used everywhere randomness is consumed.
/// Streams are never shared between runs; see make_stream().
using Rng = std::mt19937_64;

/// Independent stream `stream` derived from a base seed. Two different
/// (seed, stream) pairs give unrelated sequences.
Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0);

/// Coordinate indices into a vector of dimension n, 0-based.
using CoordinateSet = std::vector<Index>;

}  // namespace relsmooth
