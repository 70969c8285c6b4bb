#include "trotterlab/lattice.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace trotterlab {

std::string family_name(Family f) {
    switch (f) {
        case Family::acene: return "acene";
        case Family::rhombene: return "rhombene";
        case Family::triangulene: return "triangulene";
    }
    return "?";
}

Family parse_family(const std::string &name) {
    if (name == "acene") return Family::acene;
    if (name == "rhombene") return Family::rhombene;
    if (name == "triangulene") return Family::triangulene;
    throw std::invalid_argument("unknown family '" + name + "'");
}

std::string Lattice::name() const { return family_name(family) + std::to_string(size_n); }

int expected_site_count(Family f, int n) {
    switch (f) {
        case Family::acene: return 6 + 4 * (n - 1);
        case Family::rhombene: return 2 * (n + 1) * (n + 1) - 2;
        case Family::triangulene: return n * n + 4 * n + 1;
    }
    return 0;
}

namespace {

std::vector<Eigen::Vector2d> hexagon_centers(Family f, int n, double b) {
    // Pointy-top rings on a triangular lattice of centers.
    const Eigen::Vector2d a1(std::sqrt(3.0) * b, 0.0);
    const Eigen::Vector2d a2(std::sqrt(3.0) * b / 2, 1.5 * b);
    std::vector<Eigen::Vector2d> c;
    for (int i = 0; i < n; i++) {
        if (f == Family::acene) {
            c.push_back(i * a1);
            continue;
        }
        for (int j = 0; j < n; j++) {
            if (f == Family::triangulene && i + j >= n) continue;
            c.push_back(i * a1 + j * a2);
        }
    }
    return c;
}

using Key = std::pair<long long, long long>;

Key round_key(const Eigen::Vector2d &p) { return {std::llround(p.x() * 1e6), std::llround(p.y() * 1e6)}; }

}  // namespace

Eigen::MatrixXd distance_matrix(const std::vector<Eigen::Vector2d> &sites) {
    const int n = static_cast<int>(sites.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) d(i, j) = d(j, i) = (sites[i] - sites[j]).norm();
    }
    return d;
}

Lattice build_lattice(Family family, int size_n, double bond_length) {
    if (size_n < 1) throw std::invalid_argument("size_n must be >= 1");
    if (!(bond_length > 0)) throw std::invalid_argument("bond_length must be positive");
    const double b = bond_length;
    auto centers = hexagon_centers(family, size_n, b);

    std::map<Key, Eigen::Vector2d> unique;
    for (auto &c : centers) {
        for (int k = 0; k < 6; k++) {
            double ang = std::numbers::pi / 2 + k * std::numbers::pi / 3;
            Eigen::Vector2d p = c + b * Eigen::Vector2d(std::cos(ang), std::sin(ang));
            unique.emplace(round_key(p), p);
        }
    }

    Lattice lat;
    lat.family = family;
    lat.size_n = size_n;
    lat.bond_length = b;
    for (auto &[k, p] : unique) lat.sites.push_back(p);  // map order = sorted (x, y)
    lat.distances = distance_matrix(lat.sites);

    const int n = lat.site_count();
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            if (std::abs(lat.distances(i, j) - b) < 1e-6) lat.bonds.emplace_back(i, j);
        }
    }
    for (auto &c : centers) {
        std::vector<int> ring;
        for (int i = 0; i < n; i++) {
            if (std::abs((lat.sites[i] - c).norm() - b) < 1e-6) ring.push_back(i);
        }
        lat.hexagons.push_back(ring);
    }
    return lat;
}

std::vector<int> mirror_permutation(const Lattice &lat) {
    const int n = lat.site_count();
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (auto &p : lat.sites) centroid += p;
    centroid /= n;

    std::map<Key, int> where;
    for (int i = 0; i < n; i++) where[round_key(lat.sites[i] - centroid)] = i;

    for (int k = 0; k < 6; k++) {
        double th = k * std::numbers::pi / 6;
        Eigen::Vector2d u(std::cos(th), std::sin(th));
        std::vector<int> perm(n, -1);
        bool ok = true, trivial = true;
        for (int i = 0; i < n && ok; i++) {
            Eigen::Vector2d r = lat.sites[i] - centroid;
            Eigen::Vector2d m = 2 * r.dot(u) * u - r;
            auto it = where.find(round_key(m));
            if (it == where.end()) {
                ok = false;
                break;
            }
            perm[i] = it->second;
            if (perm[i] != i) trivial = false;
        }
        if (ok && !trivial) return perm;
    }
    return {};
}

}  // namespace trotterlab
