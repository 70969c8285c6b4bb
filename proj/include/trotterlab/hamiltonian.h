#pragma once

#include <Eigen/Dense>
#include <vector>

#include "trotterlab/lattice.h"
#include "trotterlab/pauli.h"

namespace trotterlab {

struct PppParams {
    double tau = 2.4;      // eV
    double u = 11.13;      // eV
    double alpha = 0.6117; // 1/Angstrom^2
    double bond_length = 1.4;

    void validate() const;
};

enum class Spin { up = 0, down = 1 };

// coeff * (a+_{i,s} a_{j,s} + h.c.)
struct Hopping {
    int i, j;
    Spin spin;
    double coeff;
};

struct FermionHamiltonian {
    int site_count = 0;
    std::vector<Hopping> kinetic;
    Eigen::VectorXd onsite;  // u per site, multiplies n_up n_down
    Eigen::MatrixXd pair;    // v_ij, zero diagonal, multiplies (n_i - 1)(n_j - 1)

    // Single-particle hopping matrix (same for both spins).
    Eigen::MatrixXd hopping_matrix() const;
    // Diagonal energy of an occupation pattern (bit i of up/down = site i).
    double potential_energy(uint64_t up, uint64_t down) const;
};

FermionHamiltonian build_ppp(const Lattice &lat, const PppParams &params = {});

// Spin-orbital to qubit map. interleaved: 2i (up), 2i+1 (down);
// blocked: i (up), N+i (down).
enum class SpinLayout { interleaved, blocked };

inline int qubit_index(int site, Spin s, int n_sites, SpinLayout layout) {
    if (layout == SpinLayout::interleaved) return 2 * site + static_cast<int>(s);
    return site + (s == Spin::down ? n_sites : 0);
}

struct JwImage {
    PauliSum kinetic;
    PauliSum potential;  // Z-type only, identity included
};

JwImage jordan_wigner(const FermionHamiltonian &h, SpinLayout layout = SpinLayout::interleaved);

// JW strings for number operators.
PauliSum number_operator(int n_qubits);          // N
PauliSum number_operator_squared(int n_qubits);  // N^2

struct ShiftParams {
    double c1 = 0;
    double c2 = 0;
};

// Modal coefficient of a set of values, binned at rel_tol; ties go to the
// larger magnitude. Returns {value, count}.
std::pair<double, int> coefficient_mode(const std::vector<double> &values, double rel_tol = 1e-9);

ShiftParams choose_shift(const PauliSum &jw_potential);
PauliSum apply_shift(const PauliSum &jw_potential, const ShiftParams &shift);

// Everything derived from one molecule and parameter set.
struct MolecularSystem {
    Lattice lattice;
    PppParams params;
    SpinLayout layout = SpinLayout::interleaved;
    FermionHamiltonian fermion;
    JwImage jw;
    ShiftParams shift;
    PauliSum shifted_potential;

    int n_sites() const { return lattice.site_count(); }
    PauliSum hamiltonian() const { return jw.kinetic + jw.potential; }
};

MolecularSystem build_system(Family family, int n, const PppParams &params = {},
                             SpinLayout layout = SpinLayout::interleaved);
// Drops the symmetry shift (shifted_potential becomes the plain potential).
void disable_shift(MolecularSystem &sys);

}  // namespace trotterlab
