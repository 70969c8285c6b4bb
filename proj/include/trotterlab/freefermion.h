#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trotterlab/lattice.h"
#include "trotterlab/norms.h"

namespace trotterlab {

// Gate costs are per tile and per spin species.
struct Tile {
    std::string shape;
    std::vector<int> sites;
    std::vector<std::pair<int, int>> bonds;
    int rotations = 0;
    int t_gates = 0;
};

struct TilingSection {
    std::string name;
    std::vector<Tile> tiles;
};

struct TilingSpec {
    Family family = Family::acene;
    int size = 0;
    std::vector<TilingSection> sections;

    static TilingSpec parse(const std::string &json_text);
    static TilingSpec load(const std::string &path);
    std::string to_json() const;
    // Single section holding every bond (no gate costs).
    static TilingSpec single_section(const Lattice &lat);
};

// data/tilings/<family><n>.json, honouring TROTTERLAB_DATA when set.
std::string data_dir();
std::string default_tiling_path(Family f, int n);

struct KineticGateCount {
    int64_t rotations = 0;
    int64_t t_gates = 0;
};

// Per Trotter step, both spins. Every section but the last appears twice
// per step; the middle pair merges into one.
KineticGateCount kinetic_gate_count(const TilingSpec &spec);

struct KineticSections {
    int n_modes = 0;
    std::vector<std::string> names;
    std::vector<Eigen::MatrixXd> sections;  // A_s, zero diagonal, symmetric
    std::vector<std::vector<std::pair<int, int>>> bonds;
    Eigen::MatrixXd full;

    int count() const { return static_cast<int>(sections.size()); }
};

// Validates the bond partition; throws on missing, foreign or repeated bonds.
KineticSections tile_sections(const Lattice &lat, const TilingSpec &spec, double tau = 2.4);

// Single-particle U_T = prod_s e^{-i A_s t/2} prod_{s reversed} e^{-i A_s t/2}.
Eigen::MatrixXcd section_product(const KineticSections &ks, double t);

struct EffectiveKinetic {
    Eigen::MatrixXcd matrix;  // A~_Delta
    double t = 0;
    Eigen::VectorXd modes;  // descending
    double hermiticity_error = 0;  // max off-diagonal Schur entry
};

// A~_Delta = (i/t) log(e^{iAt} U_T). Throws std::domain_error when a phase
// reaches the principal-log branch cut.
EffectiveKinetic effective_kinetic(const KineticSections &ks, double t);

// (smallest, largest) sum of n modes.
std::pair<double, double> filled_mode_range(const Eigen::VectorXd &modes, int n);
// max |sum of n modes|, the Fock norm of the quadratic operator at filling n.
double filled_mode_norm(const Eigen::VectorXd &modes, int n);

struct KineticFitPoint {
    double t;
    double value;
    double standard_error = 0;
};

struct KineticConstant {
    ErrorConstant constant;
    std::vector<KineticFitPoint> points;
    double fit_r2 = 1;
};

std::vector<double> default_t_grid();

KineticConstant worst_case_kinetic(const KineticSections &ks, const std::vector<double> &t_grid, int n_up, int n_down);
KineticConstant average_case_kinetic(const KineticSections &ks, const std::vector<double> &t_grid, int n_up,
                                     int n_down, int64_t samples, uint64_t seed);
// Exact normalized trace via elementary symmetric polynomials.
KineticConstant average_case_kinetic_exact(const KineticSections &ks, const std::vector<double> &t_grid, int n_up,
                                           int n_down);

}  // namespace trotterlab
