#pragma once

// Exact partition functions on small graphs. Two independent algorithms:
// full enumeration of [k]^n and the Fortuin–Kasteleyn random-cluster
// expansion over edge subsets.

#include <cstdint>
#include <string>
#include <vector>

#include "potts/model.hpp"

namespace potts {

enum class PartitionMethod { Enumeration, FkExpansion };

const char* to_string(PartitionMethod m);

struct PartitionValue {
    double log_z;
    PartitionMethod method;
};

inline constexpr double kEnumerationGuard = 1e8;
inline constexpr double kGibbsGuard = 1e6;
inline constexpr int kFkEdgeGuard = 26;

/// counts[h] = number of assignments with exactly h monochromatic edges.
/// With balanced_only, only balanced assignments are counted.
std::vector<std::uint64_t> energy_histogram(const SimpleGraph& g, int k, bool balanced_only = false,
                                            int threads = 1);

/// ln sum_h counts[h] exp(-beta h), compensated.
double log_partition_from_histogram(const std::vector<std::uint64_t>& counts, double beta);

/// <H> under the Gibbs measure from an energy histogram.
double mean_energy_from_histogram(const std::vector<std::uint64_t>& counts, double beta);

/// Requires k^n <= 1e8.
PartitionValue z_enumerate(const SimpleGraph& g, int k, double beta, int threads = 1);

/// Z = sum_{A ⊆ E} (e^-beta - 1)^|A| k^{c(A)}. Requires |E| <= 26.
PartitionValue z_fk(const SimpleGraph& g, int k, double beta);

/// Z restricted to balanced assignments. Requires k^n <= 1e8.
PartitionValue z_balanced(const SimpleGraph& g, int k, double beta, int threads = 1);

/// Assignment index: vertex v carries digit v in base k (vertex 0 least significant).
std::int64_t assignment_index(const ColorAssignment& sigma);
ColorAssignment assignment_from_index(std::int64_t index, int n, int k);

/// Gibbs probabilities of all k^n assignments, indexed by assignment_index.
/// Requires k^n <= 1e6.
std::vector<double> gibbs_exact(const SimpleGraph& g, int k, double beta);

/// Exact <H> at inverse temperature beta (enumeration).
double exact_mean_energy(const SimpleGraph& g, int k, double beta, int threads = 1);

}  // namespace potts
