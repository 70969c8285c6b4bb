#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.h"
#include "trotterlab/sector.h"

using namespace trotterlab;

namespace {

// Rows/cols of the full 2^nq matrix that belong to the sector, in basis order.
oracle::Mat restrict_to(const oracle::Mat &m, const SectorBasis &b) {
    const int64_t d = b.dimension();
    oracle::Mat out(d, d);
    for (int64_t i = 0; i < d; i++)
        for (int64_t j = 0; j < d; j++) out(i, j) = m(b.bits(i), b.bits(j));
    return out;
}

}  // namespace

TEST_CASE("sector dimensions and ranking") {
    for (auto layout : {SpinLayout::interleaved, SpinLayout::blocked}) {
        SectorSpec spec{6, 3, 2, layout};
        SectorBasis b(spec);
        CHECK(b.dimension() == 20 * 15);
        CHECK(spec.dimension() == doctest::Approx(300));
        for (int64_t k = 0; k < b.dimension(); k++) {
            CHECK(b.index_of(b.bits(k)) == k);
            CHECK(std::popcount(b.up(k)) == 3);
            CHECK(std::popcount(b.down(k)) == 2);
            if (k > 0) CHECK(std::pair(b.up(k - 1), b.down(k - 1)) < std::pair(b.up(k), b.down(k)));
        }
        CHECK(b.index_of(b.join(0b111000, 0b1)) == -1);
    }
    auto hf = SectorSpec::half_filling(7);
    CHECK(hf.n_up == 4);
    CHECK(hf.n_down == 3);
    CHECK(SectorSpec::half_filling(10).sz_twice() == 0);
}

TEST_CASE("random bitstrings stay in the sector and cover it") {
    SectorSpec spec{4, 2, 2, SpinLayout::interleaved};
    SectorBasis b(spec);
    std::mt19937_64 rng(1);
    std::vector<int> hits(b.dimension(), 0);
    for (int k = 0; k < 20000; k++) {
        auto m = spec.random_bitstring(rng);
        int64_t idx = b.index_of(m.w[0]);
        REQUIRE(idx >= 0);
        hits[idx]++;
    }
    for (int h : hits) CHECK(h > 20000 / 36 / 2);
}

TEST_CASE("sector operator equals the restricted dense operator") {
    auto sys = build_system(Family::acene, 1);
    // 12 qubits is too large for a full dense oracle; use a 4-site chain
    FermionHamiltonian h;
    h.site_count = 4;
    h.onsite = Eigen::VectorXd::Constant(4, 3.0);
    h.pair = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 3; i++) {
        h.pair(i, i + 1) = h.pair(i + 1, i) = 1.1;
        for (Spin s : {Spin::up, Spin::down}) h.kinetic.push_back({i, i + 1, s, -1.0});
    }
    h.kinetic.push_back({0, 3, Spin::up, -0.7});
    h.kinetic.push_back({0, 3, Spin::down, -0.7});
    for (auto layout : {SpinLayout::interleaved, SpinLayout::blocked}) {
        auto jw = jordan_wigner(h, layout);
        auto op = jw.kinetic + jw.potential;
        oracle::Mat full = oracle::pauli_sum_matrix(op, 8);
        SectorBasis b({4, 2, 2, layout});
        SectorOperator so(op, b);
        oracle::Mat want = restrict_to(full, b);
        CHECK((so.dense().cast<oracle::cplx>() - want).norm() < 1e-10);
        CHECK((Eigen::MatrixXd(so.sparse()) - so.dense()).norm() < 1e-12);
        // abs matvec and row norms
        Eigen::MatrixXd ad = so.dense().cwiseAbs();
        RealVector x = RealVector::Random(b.dimension()), y(b.dimension());
        so.apply_abs(x.data(), y.data());
        CHECK((y - ad * x).norm() < 1e-10);
        for (int64_t k = 0; k < b.dimension(); k++) CHECK(so.row_norm_sq(k) == doctest::Approx(want.col(k).squaredNorm()));
    }
    (void)sys;
}

TEST_CASE("Lanczos finds the lowest eigenpairs including degeneracies") {
    auto sys = build_system(Family::acene, 1);
    SectorBasis b(SectorSpec::half_filling(6));
    SectorOperator so(sys.hamiltonian(), b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(so.dense());
    auto pairs = lowest_eigenpairs(so.sparse(), 6);
    REQUIRE(pairs.size() == 6u);
    for (int k = 0; k < 6; k++) {
        CHECK(pairs[k].value == doctest::Approx(es.eigenvalues()[k]).epsilon(1e-10));
        CHECK(pairs[k].residual < 1e-6);
    }
    bool conv = false;
    RealMatvec mv = [&](const double *x, double *y) { so.apply(x, y); };
    double top = largest_eigenvalue(mv, b.dimension(), 1e-10, 3000, &conv);
    CHECK(conv);
    CHECK(top == doctest::Approx(es.eigenvalues()[b.dimension() - 1]).epsilon(1e-8));
}

TEST_CASE("propagation matches dense exponentials") {
    auto sys = build_system(Family::acene, 1);
    SectorBasis b(SectorSpec::half_filling(6));
    Eigen::MatrixXd t = SectorOperator(sys.jw.kinetic, b).dense();
    Eigen::MatrixXd v = SectorOperator(sys.jw.potential, b).dense();
    ComplexVector psi = ComplexVector::Random(b.dimension()).normalized();
    const double dt = 0.07;
    ComplexVector got = propagate({{sys.jw.potential, dt / 2}, {sys.jw.kinetic, dt}, {sys.jw.potential, dt / 2}}, b, psi);
    oracle::Mat uv = oracle::expmi(v.cast<oracle::cplx>(), dt / 2), ut = oracle::expmi(t.cast<oracle::cplx>(), dt);
    ComplexVector want = uv * (ut * (uv * psi));
    CHECK((got - want).norm() < 1e-10);
    // long step exercises step halving
    ComplexVector g2 = propagate({{sys.jw.kinetic, 3.0}}, b, psi);
    CHECK((g2 - oracle::expmi(t.cast<oracle::cplx>(), 3.0) * psi).norm() < 1e-9);
}

TEST_CASE("total spin labels singlets and triplets") {
    auto sys = build_system(Family::acene, 1);
    SectorBasis b(SectorSpec::half_filling(6));
    SectorOperator so(sys.hamiltonian(), b);
    auto pairs = lowest_eigenpairs(so.sparse(), 4);
    double s2_ground = total_spin_expectation(b, pairs[0].vector);
    CHECK(s2_ground == doctest::Approx(0).epsilon(1e-8));
    bool found_triplet = false;
    for (auto &p : pairs) {
        double s2 = total_spin_expectation(b, p.vector);
        CHECK((std::abs(s2) < 1e-6 || std::abs(s2 - 2) < 1e-6 || std::abs(s2 - 6) < 1e-6));
        if (std::abs(s2 - 2) < 1e-6) found_triplet = true;
    }
    CHECK(found_triplet);
    // T1 from S_z = 1 equals the lowest triplet seen in S_z = 0
    SectorBasis b1({6, 4, 2, SpinLayout::interleaved});
    auto t1 = lowest_eigenpairs(SectorOperator(sys.hamiltonian(), b1).sparse(), 1);
    double lowest_triplet = 0;
    for (auto &p : pairs)
        if (std::abs(total_spin_expectation(b, p.vector) - 2) < 1e-6) {
            lowest_triplet = p.value;
            break;
        }
    CHECK(t1[0].value == doctest::Approx(lowest_triplet).epsilon(1e-9));
}

TEST_CASE("snapshot round trip") {
    SectorSpec spec{6, 3, 3, SpinLayout::blocked};
    ComplexVector psi = ComplexVector::Random(400);
    auto path = (std::filesystem::temp_directory_path() / "trotterlab_snap_test.bin").string();
    write_snapshot(path, spec, psi);
    SectorSpec back;
    ComplexVector got = read_snapshot(path, &back);
    CHECK(got == psi);
    CHECK(back.n_up == 3);
    CHECK(back.layout == SpinLayout::blocked);
    std::filesystem::remove(path);
    CHECK_THROWS(read_snapshot(path));
}
