#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "trotterlab/hamiltonian.h"
#include "trotterlab/pauli.h"

namespace trotterlab {

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int64_t>;

// Particle-number and S_z sector. Usable for sampling at any size; explicit
// enumeration needs 2N <= 64 qubits.
struct SectorSpec {
    int n_sites = 0;
    int n_up = 0;
    int n_down = 0;
    SpinLayout layout = SpinLayout::interleaved;

    int electrons() const { return n_up + n_down; }
    int sz_twice() const { return n_up - n_down; }
    int qubit_count() const { return 2 * n_sites; }
    double dimension() const;  // as double, may be huge
    std::string describe() const;

    static SectorSpec from_electrons(int n_sites, int electrons, int sz_twice,
                                     SpinLayout layout = SpinLayout::interleaved);
    // Half filling with the lowest |S_z| (0 for even N, 1/2 for odd N).
    static SectorSpec half_filling(int n_sites, SpinLayout layout = SpinLayout::interleaved);

    // Qubit bitstring of a (site-indexed) occupation pattern.
    BitMask to_bitstring(const std::vector<int> &up_sites, const std::vector<int> &down_sites) const;
    // Uniformly random basis state.
    BitMask random_bitstring(std::mt19937_64 &rng) const;
};

// Enumerated basis, ordered by (up pattern, down pattern), each pattern in
// increasing numeric order of its site bitmask.
class SectorBasis {
   public:
    explicit SectorBasis(const SectorSpec &spec);

    const SectorSpec &spec() const { return spec_; }
    int64_t dimension() const { return dim_; }
    int qubit_count() const { return spec_.qubit_count(); }

    uint64_t up(int64_t k) const { return ups_[k / dim_down()]; }
    uint64_t down(int64_t k) const { return downs_[k % dim_down()]; }
    uint64_t bits(int64_t k) const { return join(up(k), down(k)); }
    int64_t dim_down() const { return static_cast<int64_t>(downs_.size()); }

    // Qubit mask <-> site masks.
    uint64_t join(uint64_t up, uint64_t down) const;
    void split(uint64_t bits, uint64_t &up, uint64_t &down) const;

    // -1 if the bitstring is outside the sector.
    int64_t index_of(uint64_t bits) const;
    int64_t index_of(uint64_t up, uint64_t down) const;

   private:
    int64_t rank(uint64_t mask, int n_set, const std::vector<int32_t> &table) const;

    SectorSpec spec_;
    int64_t dim_ = 0;
    std::vector<uint64_t> ups_, downs_;
    std::vector<int32_t> up_rank_, down_rank_;  // direct tables for small N
    std::vector<std::vector<int64_t>> binom_;
};

// Number-conserving operator restricted to a sector, applied matrix-free.
// Matrix elements must be real (true for every Hermitian operator built
// from real hopping and density terms).
class SectorOperator {
   public:
    SectorOperator(const PauliSum &op, const SectorBasis &basis);

    const SectorBasis &basis() const { return *basis_; }
    int64_t dimension() const { return basis_->dimension(); }
    bool is_diagonal() const { return offdiag_.empty(); }
    const RealVector &diagonal() const { return diag_; }

    void apply(const double *x, double *y) const;
    void apply(const cplx *x, cplx *y) const;
    // abs(O) x with element-wise absolute values.
    void apply_abs(const double *x, double *y) const;
    double row_norm_sq(int64_t k) const;

    Eigen::MatrixXd dense() const;
    SparseRowMatrix sparse() const;

   private:
    struct Group {
        uint64_t x;
        std::vector<uint64_t> z;
        std::vector<double> coeff;
    };
    template <class F>
    void for_each_offdiag(int64_t row, F &&f) const;

    const SectorBasis *basis_;
    RealVector diag_;
    std::vector<Group> offdiag_;
};

struct EigenPair {
    double value;
    RealVector vector;
    double residual;
};

struct LanczosOptions {
    int krylov_dim = 120;
    int max_restarts = 60;
    double tol = 1e-9;  // residual relative to the spectral scale
    uint64_t seed = 7;
};

using RealMatvec = std::function<void(const double *, double *)>;

// k lowest eigenpairs with locking, so degenerate copies are found.
// Throws std::runtime_error with the achieved residual on non-convergence.
std::vector<EigenPair> lowest_eigenpairs(const RealMatvec &op, int64_t dim, int k, const LanczosOptions &opt = {});
std::vector<EigenPair> lowest_eigenpairs(const SparseRowMatrix &h, int k, const LanczosOptions &opt = {});
// Largest eigenvalue of a symmetric operator (Lanczos, no locking).
double largest_eigenvalue(const RealMatvec &op, int64_t dim, double rel_tol, int max_iter, bool *converged,
                          uint64_t seed = 11);

// One exponential factor e^{-i G duration} of a product formula.
struct Factor {
    int op;  // index into the operator list
    double duration;
};

// Applies a fixed factor chain repeatedly. Diagonal operators are applied as
// exact phases; the rest by Lanczos-Krylov exponentials.
class Propagator {
   public:
    Propagator(std::vector<SparseRowMatrix> ops, std::vector<bool> diagonal, std::vector<Factor> chain,
               double krylov_tol = 1e-12);

    void apply(ComplexVector &psi) const;
    static void expm_krylov(const SparseRowMatrix &h, double duration, ComplexVector &psi, double tol);

   private:
    std::vector<SparseRowMatrix> ops_;
    std::vector<bool> diagonal_;
    std::vector<Factor> chain_;
    std::vector<ComplexVector> phases_;  // per factor, for diagonal ops
    double tol_;
};

// e^{-i G_1 d_1} ... e^{-i G_m d_m} |psi>, factors applied right to left as
// written (the last factor acts first).
ComplexVector propagate(const std::vector<std::pair<PauliSum, double>> &factors, const SectorBasis &basis,
                        const ComplexVector &psi);

// <S^2> of a sector state (site-occupation basis, any layout).
double total_spin_expectation(const SectorBasis &basis, const ComplexVector &psi);
double total_spin_expectation(const SectorBasis &basis, const RealVector &psi);

// Binary snapshot: magic, endianness tag, dimension, sector descriptor, then
// contiguous complex doubles.
void write_snapshot(const std::string &path, const SectorSpec &spec, const ComplexVector &psi);
ComplexVector read_snapshot(const std::string &path, SectorSpec *spec = nullptr);

}  // namespace trotterlab
