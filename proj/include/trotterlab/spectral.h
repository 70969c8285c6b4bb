#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "trotterlab/freefermion.h"
#include "trotterlab/hamiltonian.h"
#include "trotterlab/norms.h"
#include "trotterlab/sector.h"

namespace trotterlab {

// Second-order product formula. ops[0] is V, the rest are T (SO) or the
// kinetic sections T_1..T_S (tile).
struct TrotterScheme {
    Scheme kind = Scheme::so;
    double t = 0;
    std::vector<PauliSum> ops;
    std::vector<std::string> names;
    std::vector<Factor> chain;

    std::vector<double> durations_per_op() const;
    bool palindromic() const;
    std::string describe() const;
};

TrotterScheme so_scheme(const PauliSum &kinetic, const PauliSum &potential, double t);
TrotterScheme tile_scheme(const std::vector<PauliSum> &sections, const PauliSum &potential, double t);

// JW image of the hopping terms in each section.
std::vector<PauliSum> kinetic_section_operators(const FermionHamiltonian &h, const KineticSections &ks,
                                                SpinLayout layout = SpinLayout::interleaved);

Propagator make_propagator(const TrotterScheme &scheme, const SectorBasis &basis, double krylov_tol = 1e-12);

// ---- dense route --------------------------------------------------------

Eigen::MatrixXcd dense_unitary(const TrotterScheme &scheme, const SectorBasis &basis);

struct EffectiveSpectrum {
    RealVector energies;      // ascending
    Eigen::MatrixXcd vectors; // columns
    double t = 0;
    double shift = 0;  // constant added to H before the log, removed after
};

// H~ = (i/t) log U on the sector. The spectrum of H is centered first
// (shift = -(E_max+E_min)/2) so the principal branch covers it; throws
// std::domain_error if an eigenphase still reaches the cut.
EffectiveSpectrum effective_hamiltonian_dense(const TrotterScheme &scheme, const SectorBasis &basis);

struct Match {
    int exact;
    int effective;
    double overlap2;
    bool flagged;  // overlap2 < 0.9
};

// Greedy matching by |<h_i|h~_j>|^2, summed over degenerate blocks of H.
std::vector<Match> pair_eigenstates(const RealVector &h_values, const Eigen::MatrixXcd &h_vectors,
                                    const Eigen::MatrixXcd &tilde_vectors, double degeneracy_tol = 1e-8);

// ---- time series --------------------------------------------------------

struct TimeSeries {
    std::vector<cplx> g;
    double t = 0;
    std::string state;
    std::string scheme;

    int steps() const { return static_cast<int>(g.size()) - 1; }
    void write_csv(const std::string &path) const;
    static TimeSeries read_csv(const std::string &path);
};

// g_k = <psi|U^k|psi>, k = 0..n_steps. With a checkpoint stem the running
// state and series are saved every `every` steps and resumed if present.
TimeSeries compute_time_series(const Propagator &u, const SectorBasis &basis, const ComplexVector &psi, int n_steps,
                               double t, const std::string &checkpoint_stem = "", int every = 100);

struct FilterSpec {
    double a = 0.05;  // radians
    int order = 0;
    std::vector<double> coeffs;  // F_0..F_order

    static FilterSpec gaussian(double a, int order = 0);  // order 0 -> ceil(6/a)
};

struct Extraction {
    double energy = 0;  // eV, branch chosen nearest the prior
    double phase = 0;   // argmax of C(x) in (-pi, pi]
    double peak = 0;
    double contrast = 0;  // (max - min) / max of C on the grid
    bool flat = false;
};

Extraction extract_energy(const TimeSeries &series, const FilterSpec &filter, double prior_energy,
                          int grid_points = 8192);

// Energy -phase/t shifted by a multiple of 2 pi/t to lie nearest the prior.
double unwrap_energy(double phase, double t, double prior);

// ---- iterative oracle -----------------------------------------------------

struct UnitaryEigenpair {
    cplx mu;
    double energy = 0;
    double residual = 0;  // ||U x - mu x||
    double overlap2 = 0;  // with the start vector
    int restarts = 0;
    bool converged = false;
    ComplexVector vector;
};

using UnitaryApply = std::function<void(ComplexVector &)>;

// Restarted Arnoldi on U, following the Ritz vector with the largest overlap
// with the start vector.
UnitaryEigenpair unitary_eigenpair(const UnitaryApply &u, const ComplexVector &start, double t, double prior_energy,
                                   int krylov_dim = 40, double tol = 1e-10, int max_restarts = 30);

// ---- low-lying states and reports ---------------------------------------

struct LabeledState {
    std::string label;  // S0, S1, T1, D0, Q1, ...
    double energy = 0;
    double spin = 0;  // S from <S^2>
    RealVector vector;
};

// k lowest states of H in the sector, labeled by multiplicity. Indices count
// up within each multiplicity; the ground multiplicity starts at 0, the rest at 1.
std::vector<LabeledState> low_lying_states(const PauliSum &h, const SectorBasis &basis, int k,
                                           const LanczosOptions &opt = {});
std::string multiplicity_letter(double spin);

struct StateRecord {
    std::string label;
    double exact = 0;
    double effective = 0;
    double signed_error = 0;     // E~ - E
    double constant = 0;         // |E - E~| / t^2
    double signed_constant = 0;  // (E~ - E) / t^2
};

struct PairRecord {
    std::string a, b;
    double exact_gap = 0;  // E_b - E_a
    double effective_gap = 0;
    double constant = 0;
};

struct SpectrumReport {
    double t = 0;
    std::vector<StateRecord> states;
    std::vector<PairRecord> pairs;
};

SpectrumReport error_constants(const std::vector<std::string> &labels, const std::vector<double> &exact,
                               const std::vector<double> &effective, double t,
                               const std::vector<std::pair<int, int>> &pairs);

double pearson(const std::vector<double> &x, const std::vector<double> &y);

enum class EffectiveMethod { dense, arnoldi, series };

struct SweepCell {
    double t = 0;
    std::vector<double> effective;
    SpectrumReport report;
    std::vector<bool> within_budget;  // per pair, |delta - delta~| <= epsilon/3
    std::string error;                // set when the cell failed
};

struct SweepState {
    std::string label;
    double energy;
    ComplexVector vector;
    const SectorBasis *basis;  // states may live in different sectors
};

// Runs every t, recording failures per cell instead of aborting.
std::vector<SweepCell> gap_sweep(const std::function<TrotterScheme(double)> &scheme_at,
                                 const std::vector<SweepState> &states, const std::vector<std::pair<int, int>> &pairs,
                                 const std::vector<double> &t_list, double epsilon = 0.04354,
                                 EffectiveMethod method = EffectiveMethod::arnoldi, double filter_a = 0.01);

// Effective energy of one state under U, by the chosen method.
double effective_energy(const TrotterScheme &scheme, const SectorBasis &basis, const ComplexVector &psi,
                        double prior, EffectiveMethod method, double filter_a = 0.01);

}  // namespace trotterlab
