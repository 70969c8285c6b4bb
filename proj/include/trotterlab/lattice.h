#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace trotterlab {

enum class Family { acene, rhombene, triangulene };

std::string family_name(Family f);
Family parse_family(const std::string &name);

struct Lattice {
    Family family = Family::acene;
    int size_n = 0;
    double bond_length = 1.4;
    std::vector<Eigen::Vector2d> sites;  // Angstrom
    std::vector<std::pair<int, int>> bonds;  // i < j, sorted
    Eigen::MatrixXd distances;
    std::vector<std::vector<int>> hexagons;  // site indices of each ring

    int site_count() const { return static_cast<int>(sites.size()); }
    std::string name() const;  // e.g. "acene3"
};

// Closed-form carbon counts.
int expected_site_count(Family f, int n);

Lattice build_lattice(Family family, int size_n, double bond_length = 1.4);
Eigen::MatrixXd distance_matrix(const std::vector<Eigen::Vector2d> &sites);

// Site permutation under a reflection of the molecule onto itself, or empty
// if none of the tried mirror axes maps the site set to itself.
std::vector<int> mirror_permutation(const Lattice &lat);

}  // namespace trotterlab
