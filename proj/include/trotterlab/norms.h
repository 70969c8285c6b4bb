#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trotterlab/pauli.h"
#include "trotterlab/sector.h"

namespace trotterlab {

enum class NormKind { spectral_bound, frobenius_sampled, frobenius_exact, dense_exact };
std::string norm_kind_name(NormKind k);

struct NormEstimate {
    double value = 0;           // eV^3
    double standard_error = 0;  // eV^3, 0 for deterministic kinds
    NormKind kind = NormKind::dense_exact;
    int64_t sample_count = 0;
    uint64_t seed = 0;
    bool converged = true;
};

struct NestedCommutators {
    PauliSum vtv;  // [[V,T],V]
    PauliSum vtt;  // [[V,T],T]
};

NestedCommutators nested_commutators(const PauliSum &t_op, const PauliSum &v_op);

// Largest eigenvalue of abs(O) on the sector, matrix-free.
NormEstimate spectral_norm_bound(const PauliSum &op, const SectorBasis &basis, double rel_tol = 1e-6,
                                 int max_iter = 2000);
// Exact ||O|| via dense diagonalization (small sectors only).
NormEstimate dense_spectral_norm(const PauliSum &op, const SectorBasis &basis);

// sqrt(E_i ||O|i>||^2) over uniform basis states i of the sector. Sample k
// draws from its own stream seeded by (seed, k), so results do not depend on
// the worker count.
NormEstimate frobenius_sampled(const PauliSum &op, const SectorSpec &sector, int64_t samples, uint64_t seed,
                               int jobs = 1);
// Same quantity by enumerating every basis state.
NormEstimate frobenius_exact(const PauliSum &op, const SectorBasis &basis);

enum class ConstantKind { worst, average };
enum class Scheme { so, tile };
std::string constant_kind_name(ConstantKind k);
std::string scheme_name(Scheme s);

struct ErrorConstant {
    ConstantKind kind = ConstantKind::worst;
    Scheme scheme = Scheme::so;
    double value = 0;  // eV^3
    double standard_error = 0;
    bool upper_bound = false;
    std::vector<std::pair<std::string, double>> components;
};

ErrorConstant worst_case_constant(const NormEstimate &vtv, const NormEstimate &vtt);
ErrorConstant average_case_constant(const NormEstimate &vtv, const NormEstimate &vtt);
ErrorConstant tile_constant(const ErrorConstant &so, const ErrorConstant &kinetic);

// Per-sample stream derived from (seed, index).
uint64_t stream_seed(uint64_t seed, uint64_t index);

}  // namespace trotterlab
