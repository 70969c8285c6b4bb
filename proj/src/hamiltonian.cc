#include "trotterlab/hamiltonian.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace trotterlab {

void PppParams::validate() const {
    if (!(tau > 0) || !(u > 0) || !(alpha > 0) || !(bond_length > 0)) {
        throw std::invalid_argument("PPP parameters must be strictly positive");
    }
}

Eigen::MatrixXd FermionHamiltonian::hopping_matrix() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(site_count, site_count);
    for (auto &h : kinetic) {
        if (h.spin != Spin::up) continue;
        a(h.i, h.j) += h.coeff;
        a(h.j, h.i) += h.coeff;
    }
    return a;
}

double FermionHamiltonian::potential_energy(uint64_t up, uint64_t down) const {
    double e = 0;
    for (int i = 0; i < site_count; i++) {
        int ni = static_cast<int>((up >> i) & 1) + static_cast<int>((down >> i) & 1);
        if (ni == 2) e += onsite(i);
        int mi = ni - 1;
        if (mi == 0) continue;
        for (int j = i + 1; j < site_count; j++) {
            int mj = static_cast<int>((up >> j) & 1) + static_cast<int>((down >> j) & 1) - 1;
            e += pair(i, j) * mi * mj;
        }
    }
    return e;
}

FermionHamiltonian build_ppp(const Lattice &lat, const PppParams &p) {
    p.validate();
    FermionHamiltonian h;
    const int n = lat.site_count();
    h.site_count = n;
    for (auto [i, j] : lat.bonds) {
        h.kinetic.push_back({i, j, Spin::up, -p.tau});
        h.kinetic.push_back({i, j, Spin::down, -p.tau});
    }
    h.onsite = Eigen::VectorXd::Constant(n, p.u);
    h.pair = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            double r = lat.distances(i, j);
            h.pair(i, j) = h.pair(j, i) = p.u / std::sqrt(1.0 + p.alpha * r * r);
        }
    }
    return h;
}

JwImage jordan_wigner(const FermionHamiltonian &h, SpinLayout layout) {
    const int n = h.site_count;
    const int nq = 2 * n;
    JwImage out{PauliSum(nq), PauliSum(nq)};

    // a+_p a_q + h.c. = (X_p Z..Z X_q + Y_p Z..Z Y_q) / 2 for p < q
    for (auto &t : h.kinetic) {
        int p = qubit_index(t.i, t.spin, n, layout);
        int q = qubit_index(t.j, t.spin, n, layout);
        if (p > q) std::swap(p, q);
        PauliString xx, yy;
        xx.x.set(p);
        xx.x.set(q);
        yy = xx;
        yy.z.set(p);
        yy.z.set(q);
        for (int k = p + 1; k < q; k++) {
            xx.z.set(k);
            yy.z.set(k);
        }
        out.kinetic.add(xx, 0.5 * t.coeff);
        out.kinetic.add(yy, 0.5 * t.coeff);
    }

    auto z = [](int q) { return PauliString::single(q, 'Z'); };
    auto zz = [](int a, int b) {
        PauliString s;
        s.z.set(a);
        s.z.set(b);
        return s;
    };
    // u n_up n_down = u/4 (1 - Z_up - Z_dn + Z_up Z_dn)
    for (int i = 0; i < n; i++) {
        int a = qubit_index(i, Spin::up, n, layout), b = qubit_index(i, Spin::down, n, layout);
        double c = 0.25 * h.onsite(i);
        out.potential.add(PauliString{}, c);
        out.potential.add(z(a), -c);
        out.potential.add(z(b), -c);
        out.potential.add(zz(a, b), c);
    }
    // v (n_i - 1)(n_j - 1) = v/4 (Z_iu + Z_id)(Z_ju + Z_jd)
    for (int i = 0; i < n; i++) {
        for (int j = i + 1; j < n; j++) {
            double c = 0.25 * h.pair(i, j);
            for (Spin si : {Spin::up, Spin::down}) {
                for (Spin sj : {Spin::up, Spin::down}) {
                    out.potential.add(zz(qubit_index(i, si, n, layout), qubit_index(j, sj, n, layout)), c);
                }
            }
        }
    }
    return out;
}

PauliSum number_operator(int n_qubits) {
    PauliSum nop(n_qubits);
    nop.add(PauliString{}, 0.5 * n_qubits);
    for (int q = 0; q < n_qubits; q++) nop.add(PauliString::single(q, 'Z'), -0.5);
    return nop;
}

PauliSum number_operator_squared(int n_qubits) {
    auto nop = number_operator(n_qubits);
    return multiply(nop, nop);
}

std::pair<double, int> coefficient_mode(const std::vector<double> &values, double rel_tol) {
    if (values.empty()) return {0.0, 0};
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    double best = 0;
    int best_count = 0;
    size_t i = 0;
    while (i < v.size()) {
        size_t j = i + 1;
        while (j < v.size() && std::abs(v[j] - v[i]) <= rel_tol * std::max(std::abs(v[i]), std::abs(v[j]))) j++;
        int count = static_cast<int>(j - i);
        double rep = v[i];
        if (count > best_count || (count == best_count && std::abs(rep) > std::abs(best))) {
            best = rep;
            best_count = count;
        }
        i = j;
    }
    return {best, best_count};
}

ShiftParams choose_shift(const PauliSum &jw_potential) {
    if (!jw_potential.is_diagonal()) throw std::invalid_argument("choose_shift expects a Z-type potential");
    const int nq = jw_potential.qubit_count();
    std::vector<double> zz;
    for (auto &[p, c] : jw_potential.terms()) {
        if (p.weight() == 2) zz.push_back(c);
    }
    ShiftParams s;
    // c2 N^2 puts c2/2 on every Z_p Z_q
    s.c2 = -2.0 * coefficient_mode(zz).first;

    auto partial = jw_potential + s.c2 * number_operator_squared(nq);
    std::vector<double> singles;
    for (auto &[p, c] : partial.terms()) {
        if (p.weight() == 1) singles.push_back(c);
    }
    // c1 N puts -c1/2 on every Z_p
    s.c1 = 2.0 * coefficient_mode(singles).first;
    return s;
}

PauliSum apply_shift(const PauliSum &jw_potential, const ShiftParams &shift) {
    const int nq = jw_potential.qubit_count();
    PauliSum out = jw_potential;
    if (shift.c1 != 0.0) out += shift.c1 * number_operator(nq);
    if (shift.c2 != 0.0) out += shift.c2 * number_operator_squared(nq);
    out.prune_absolute(1e-12);
    return out;
}

MolecularSystem build_system(Family family, int n, const PppParams &params, SpinLayout layout) {
    params.validate();
    MolecularSystem s;
    s.lattice = build_lattice(family, n, params.bond_length);
    s.params = params;
    s.layout = layout;
    s.fermion = build_ppp(s.lattice, params);
    s.jw = jordan_wigner(s.fermion, layout);
    s.shift = choose_shift(s.jw.potential);
    s.shifted_potential = apply_shift(s.jw.potential, s.shift);
    return s;
}

void disable_shift(MolecularSystem &sys) {
    sys.shift = {};
    sys.shifted_potential = sys.jw.potential;
}

}  // namespace trotterlab
