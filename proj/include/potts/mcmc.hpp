#pragma once

// Single-site dynamics for the Gibbs measure exp(-beta H)/Z, mean-energy
// estimation and thermodynamic integration of ln Z.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "potts/model.hpp"
#include "potts/rng.hpp"

namespace potts {

enum class Kernel { Glauber, Metropolis };

const char* to_string(Kernel k);
Kernel parse_kernel(const std::string& s);

/// A coloring together with its incrementally maintained energy.
class ChainState {
public:
    ChainState(const SimpleGraph& g, const ColorAssignment& start);

    int n() const { return static_cast<int>(colors_.size()); }
    int k() const { return k_; }
    int color(int v) const { return colors_[v]; }
    const std::vector<int>& colors() const { return colors_; }
    std::int64_t mono_edges() const { return mono_edges_; }
    std::int64_t step_count() const { return step_count_; }
    ColorAssignment assignment() const { return ColorAssignment(k_, colors_); }

    /// Sets the color of v and updates the energy.
    void recolor(const SimpleGraph& g, int v, int c);
    void count_step() { ++step_count_; }

    /// Recomputes H from scratch; throws ContractViolation on a mismatch.
    void audit(const SimpleGraph& g) const;

private:
    int k_;
    std::vector<int> colors_;
    std::int64_t mono_edges_;
    std::int64_t step_count_ = 0;
};

/// Heat-bath conditional of vertex v's color given the rest (beta may be +inf).
std::vector<double> conditional_distribution(const ChainState& s, const SimpleGraph& g, int v, double beta);

/// Uniform vertex, new color drawn from its conditional.
void glauber_step(ChainState& s, const SimpleGraph& g, double beta, SeededStream& rng);
/// Uniform vertex, uniform proposed color, accepted with min(1, exp(-beta dH)).
void metropolis_step(ChainState& s, const SimpleGraph& g, double beta, SeededStream& rng);
void chain_step(Kernel kernel, ChainState& s, const SimpleGraph& g, double beta, SeededStream& rng);

inline constexpr double kTransitionGuard = 4096;

/// Dense one-step transition matrix over all k^n states (index order as
/// assignment_index), row-major. Requires k^n <= 4096.
std::vector<double> transition_matrix(const SimpleGraph& g, int k, double beta, Kernel kernel);

struct EnergyBudget {
    std::int64_t burn_in_sweeps;
    std::int64_t measure_sweeps;
    int batches = 20;
};

/// Burn-in of 100 n sweeps, as used when no budget is given.
EnergyBudget default_energy_budget(int n, std::int64_t measure_sweeps);

struct MeanEstimate {
    double mean;
    double std_error;  ///< batch means
    std::int64_t samples;
};

/// Time average of H after burn-in, recorded after every step. The chain
/// starts from `start`, which is advanced in place.
MeanEstimate estimate_mean_energy(ChainState& start, const SimpleGraph& g, double beta, const EnergyBudget& budget,
                                  SeededStream& rng, Kernel kernel = Kernel::Glauber);
/// Same, from a uniformly random start.
MeanEstimate estimate_mean_energy(const SimpleGraph& g, int k, double beta, const EnergyBudget& budget,
                                  SeededStream& rng, Kernel kernel = Kernel::Glauber);

class TISchedule {
public:
    /// Throws ParameterError unless the grid starts at 0 and strictly increases.
    TISchedule(std::vector<double> beta_grid, std::int64_t sweeps_per_point, std::int64_t burn_in);

    /// `points` equally spaced values on [0, beta]; a single point when beta = 0.
    static TISchedule uniform(double beta, int points, std::int64_t sweeps_per_point, std::int64_t burn_in);

    const std::vector<double>& beta_grid() const { return grid_; }
    double target() const { return grid_.back(); }
    std::int64_t sweeps_per_point() const { return sweeps_; }
    std::int64_t burn_in() const { return burn_in_; }

private:
    std::vector<double> grid_;
    std::int64_t sweeps_;
    std::int64_t burn_in_;
};

inline constexpr int kDefaultGridPoints = 33;

/// Quadrature weights of composite Simpson on an arbitrary increasing grid.
/// Panels [x_{2i}, x_{2i+2}] integrate the quadratic interpolant exactly; an
/// odd trailing interval uses the quadratic through the last three points.
std::vector<double> simpson_weights(const std::vector<double>& grid);

struct TIResult {
    double log_z;
    double statistical_error;
    double quadrature_error;
    double total_error() const { return statistical_error + quadrature_error; }
    std::vector<double> beta_grid;
    std::vector<double> mean_energy;
    std::vector<double> energy_error;
};

/// ln Z = n ln k - integral_0^beta <H>_gamma d gamma with <H> estimated by
/// one chain annealed along the grid.
TIResult thermo_integrate_lnZ(const SimpleGraph& g, int k, const TISchedule& schedule, SeededStream& rng,
                              Kernel kernel = Kernel::Glauber);
/// Deterministic variant with exact <H> on the grid; only quadrature error.
TIResult thermo_integrate_exact(const SimpleGraph& g, int k, const TISchedule& schedule);

enum class FreeEnergyMethod { Exact, ThermoIntegration };

struct FreeEnergyOptions {
    FreeEnergyMethod method = FreeEnergyMethod::Exact;
    std::int64_t sweeps_per_point = 2000;  ///< TI only
    int grid_points = kDefaultGridPoints;  ///< TI only
    int threads = 1;
};

struct FreeEnergyRow {
    int n;
    double mean;     ///< mean of (1/n) ln Z over replicas
    double std;      ///< empirical std of (1/n) ln Z
    double formula;  ///< annealed free energy
    double gap() const { return std::abs(mean - formula); }
    int replicas;
};

/// (1/n) ln Z over `replicas` graphs from G(n, m) for each n. Replica r of
/// size n uses stream (seed, n).child(r).
std::vector<FreeEnergyRow> free_energy_experiment(int k, double d, double beta, const std::vector<int>& n_grid,
                                                  int replicas, std::uint64_t seed, const FreeEnergyOptions& opt = {});

}  // namespace potts
