#include <doctest.h>

#include <random>

#include "oracles.h"
#include "trotterlab/hamiltonian.h"

using namespace trotterlab;

namespace {

FermionHamiltonian toy(int n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.5, 3);
    FermionHamiltonian h;
    h.site_count = n;
    h.onsite = Eigen::VectorXd::Zero(n);
    h.pair = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; i++) {
        h.onsite[i] = u(rng);
        for (int j = i + 1; j < n; j++) {
            h.pair(i, j) = h.pair(j, i) = u(rng);
            for (Spin s : {Spin::up, Spin::down}) h.kinetic.push_back({i, j, s, -u(rng)});
        }
    }
    return h;
}

oracle::Mat fock_matrix(const FermionHamiltonian &h, SpinLayout layout) {
    const int n = h.site_count, nq = 2 * n;
    const int64_t d = int64_t(1) << nq;
    std::vector<Eigen::MatrixXd> a;
    for (int q = 0; q < nq; q++) a.push_back(oracle::annihilation(nq, q));
    auto num = [&](int i, Spin s) {
        int q = qubit_index(i, s, n, layout);
        return Eigen::MatrixXd(a[q].transpose() * a[q]);
    };
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (const auto &hop : h.kinetic) {
        int qi = qubit_index(hop.i, hop.spin, n, layout), qj = qubit_index(hop.j, hop.spin, n, layout);
        Eigen::MatrixXd t = a[qi].transpose() * a[qj];
        m += hop.coeff * (t + t.transpose());
    }
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < n; i++) {
        m += h.onsite[i] * num(i, Spin::up) * num(i, Spin::down);
        for (int j = i + 1; j < n; j++)
            m += h.pair(i, j) * (num(i, Spin::up) + num(i, Spin::down) - id) * (num(j, Spin::up) + num(j, Spin::down) - id);
    }
    return m.cast<oracle::cplx>();
}

}  // namespace

TEST_CASE("Jordan-Wigner image matches the Fock-space Hamiltonian") {
    std::mt19937_64 rng(21);
    for (auto layout : {SpinLayout::interleaved, SpinLayout::blocked}) {
        auto h = toy(3, rng);
        auto jw = jordan_wigner(h, layout);
        CHECK(jw.potential.is_diagonal());
        oracle::Mat got = oracle::pauli_sum_matrix(jw.kinetic + jw.potential, 6);
        CHECK((got - fock_matrix(h, layout)).norm() < 1e-10);
    }
}

TEST_CASE("PPP parameters and matrix elements") {
    auto lat = build_lattice(Family::acene, 1);
    auto h = build_ppp(lat);
    CHECK(h.kinetic.size() == 12u);  // 6 bonds x 2 spins
    for (const auto &hop : h.kinetic) CHECK(hop.coeff == doctest::Approx(-2.4));
    CHECK(h.onsite[0] == doctest::Approx(11.13));
    // Ohno potential at the bond length
    CHECK(h.pair(lat.bonds[0].first, lat.bonds[0].second) == doctest::Approx(11.13 / std::sqrt(1 + 0.6117 * 1.96)));
    Eigen::MatrixXd a = h.hopping_matrix();
    CHECK((a - a.transpose()).norm() == 0);
    CHECK(a.diagonal().norm() == 0);
    PppParams bad;
    bad.u = -1;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("diagonal energy agrees with the Pauli potential") {
    auto sys = build_system(Family::acene, 1);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 50; k++) {
        uint64_t up = rng() & 63, down = rng() & 63;
        uint64_t bits = 0;
        for (int i = 0; i < 6; i++) {
            if ((up >> i) & 1) bits |= uint64_t(1) << qubit_index(i, Spin::up, 6, SpinLayout::interleaved);
            if ((down >> i) & 1) bits |= uint64_t(1) << qubit_index(i, Spin::down, 6, SpinLayout::interleaved);
        }
        auto out = apply_to_basis_state(sys.jw.potential, mask_from_u64(bits));
        REQUIRE(out.size() == 1u);
        CHECK(out[0].second.real() == doctest::Approx(sys.fermion.potential_energy(up, down)));
    }
}

TEST_CASE("term counts before and after the symmetry shift") {
    struct Row {
        Family f;
        int n, v, vs;
    };
    for (auto r : {Row{Family::acene, 3, 406, 290}, Row{Family::acene, 7, 1830, 1554}, Row{Family::rhombene, 3, 1830, 1522},
                   Row{Family::triangulene, 3, 990, 778}}) {
        auto sys = build_system(r.f, r.n);
        CHECK(sys.jw.potential.term_count() == static_cast<size_t>(r.v));
        CHECK(sys.shifted_potential.term_count() == static_cast<size_t>(r.vs));
    }
}

TEST_CASE("shift is a constant on every fixed-N sector") {
    auto sys = build_system(Family::acene, 2);
    const int nq = 20;
    std::mt19937_64 rng(4);
    for (int ne : {8, 10, 13}) {
        double first = 0;
        for (int k = 0; k < 30; k++) {
            std::vector<int> q(nq);
            for (int i = 0; i < nq; i++) q[i] = i;
            std::shuffle(q.begin(), q.end(), rng);
            uint64_t bits = 0;
            for (int i = 0; i < ne; i++) bits |= uint64_t(1) << q[i];
            double v = apply_to_basis_state(sys.jw.potential, mask_from_u64(bits))[0].second.real();
            double vs = apply_to_basis_state(sys.shifted_potential, mask_from_u64(bits))[0].second.real();
            if (k == 0) first = v - vs;
            CHECK(v - vs == doctest::Approx(first).epsilon(1e-10));
        }
    }
}

TEST_CASE("number operators") {
    const int nq = 4;
    auto n = number_operator(nq), n2 = number_operator_squared(nq);
    oracle::Mat mn = oracle::pauli_sum_matrix(n, nq), mn2 = oracle::pauli_sum_matrix(n2, nq);
    for (int b = 0; b < 16; b++) {
        CHECK(mn(b, b).real() == doctest::Approx(std::popcount(unsigned(b))));
        CHECK(mn2(b, b).real() == doctest::Approx(std::popcount(unsigned(b)) * std::popcount(unsigned(b))));
    }
}

TEST_CASE("coefficient mode bins and breaks ties by magnitude") {
    auto [v, c] = coefficient_mode({1.0, 1.0 + 1e-12, 2.0, -3.0, -3.0});
    CHECK(c == 2);
    CHECK(v == doctest::Approx(-3.0));
}
