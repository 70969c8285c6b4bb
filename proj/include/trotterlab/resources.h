#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trotterlab/freefermion.h"
#include "trotterlab/pauli.h"

namespace trotterlab {

enum class CostMode { fixed_error, fixed_timestep };
std::string cost_mode_name(CostMode m);

struct CostParams {
    double epsilon = 0.04354;  // eV
    double x = 0.02;           // fraction of the budget for rotation synthesis
    CostMode mode = CostMode::fixed_timestep;
    double g = 0;    // error constant, eV^3 (fixed_error)
    double t = 0.1;  // eV^-1 (fixed_timestep)
    int64_t n_rotations = 0;  // per step
    int64_t n_t = 0;          // extra T gates per step
    int n_sites = 0;
    bool gap = false;  // two independent QPE runs

    void validate() const;
};

struct CostReport {
    CostParams inputs;
    int64_t n_steps = 0;
    double t_implied = 0;  // eV^-1
    double t_per_step = 0;  // T gates, unrounded
    double total_t = 0;     // includes the gap doubling
    double total_toffoli = 0;
    int64_t logical_qubits = 0;
    // HWP extras (zero otherwise)
    bool hwp = false;
    int64_t hwp_rotations = 0;  // per step after merging
    int64_t hwp_toffoli_per_step = 0;
    int64_t hwp_ancillas = 0;
};

int64_t steps_fixed_error(double g, double epsilon, double x);
int64_t steps_fixed_timestep(double t, double epsilon, double x);
// sqrt law time step that the fixed-error formula implies
double implied_timestep(double g, double epsilon, double x);
double t_gates_per_step(const CostParams &p);
CostReport total_cost(const CostParams &p);

struct HwpGroup {
    double angle;  // term coefficient
    int64_t size;
    int64_t max_occurrence;  // per qubit
    double width;            // size / max_occurrence, capped at N
    int64_t batches;
    int64_t rotations;  // after merging
    int64_t toffoli;
};

struct HwpBreakdown {
    std::vector<HwpGroup> potential;
    int64_t kinetic_rotations_before = 0;
    int64_t kinetic_rotations = 0;
    int64_t kinetic_toffoli = 0;
    int64_t rotations_before = 0;
    int64_t rotations = 0;
    int64_t toffoli = 0;
};

// How a batch of k parallel equal-angle rotations is charged. Both pay
// k - popcount(k) Toffolis to compute the Hamming weight.
//   single:      one rotation per batch (the coarse estimator)
//   weight_bits: one rotation per weight bit, floor(log2 k) + 1
enum class HwpModel { single, weight_bits };

int64_t hwp_rotations(int64_t k, HwpModel model = HwpModel::single);
int64_t hwp_toffoli(int64_t k);

HwpBreakdown hwp_breakdown(const PauliSum &shifted_potential, const TilingSpec &tiling, int n_sites,
                           HwpModel model = HwpModel::single, double rel_tol = 1e-9);
// base report with the HWP-merged rotation count, added Toffolis and N-1 ancillas.
CostReport hwp_estimate(const PauliSum &shifted_potential, const TilingSpec &tiling, const CostParams &base,
                        HwpModel model = HwpModel::single);

struct WrappingDiagnosis {
    bool strict = false;  // (E_max - E_min) t <= 2 pi
    double range_lo = 0, range_hi = 0;  // E_c -/+ pi/t
    std::optional<double> target_weight;
    std::optional<double> out_of_range_weight;
    bool weight_condition = true;  // target weight dominates the out-of-range weight
};

WrappingDiagnosis wrapping_check(double e_min, double e_max, double t, double e_c);
// With a state: weights |c_j|^2 on eigenvalues E_j, target index m.
WrappingDiagnosis wrapping_check(double e_min, double e_max, double t, double e_c, const std::vector<double> &energies,
                                 const std::vector<double> &weights, int target, double dominance = 10.0);

}  // namespace trotterlab
