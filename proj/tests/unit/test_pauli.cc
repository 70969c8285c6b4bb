#include <doctest.h>

#include <random>

#include "oracles.h"
#include "trotterlab/pauli.h"

using namespace trotterlab;

namespace {

PauliString random_string(int nq, std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> d(0, 3);
    PauliString p;
    for (int q = 0; q < nq; q++) {
        int k = d(rng);
        if (k == 1 || k == 2) p.x.set(q);
        if (k == 2 || k == 3) p.z.set(q);
    }
    return p;
}

PauliSum random_hermitian(int nq, int terms, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    PauliSum s(nq);
    for (int k = 0; k < terms; k++) s.add(random_string(nq, rng), u(rng));
    return s;
}

}  // namespace

TEST_CASE("parse and print round trip") {
    auto p = PauliString::parse("X0 Z3 Y7");
    CHECK(p.letter(0) == 'X');
    CHECK(p.letter(3) == 'Z');
    CHECK(p.letter(7) == 'Y');
    CHECK(p.letter(1) == 'I');
    CHECK(p.to_string() == "X0 Z3 Y7");
    CHECK(PauliString::parse("I").is_identity());
    CHECK(p.weight() == 3);
    CHECK(p.y_count() == 1);
    CHECK(p.support_end() == 7);
    CHECK_THROWS(PauliString::parse("Q1"));
}

TEST_CASE("single-qubit products follow the Pauli table") {
    auto x = PauliString::single(0, 'X'), y = PauliString::single(0, 'Y'), z = PauliString::single(0, 'Z');
    // XY = iZ, YZ = iX, ZX = iY
    CHECK(product_phase(x, y) == 1);
    CHECK(product_string(x, y) == z);
    CHECK(product_phase(y, z) == 1);
    CHECK(product_phase(z, x) == 1);
    CHECK(product_phase(y, x) == 3);
    CHECK(product_phase(x, x) == 0);
}

TEST_CASE("products agree with dense matrices") {
    std::mt19937_64 rng(3);
    const int nq = 4;
    for (int trial = 0; trial < 200; trial++) {
        auto a = random_string(nq, rng), b = random_string(nq, rng);
        int k = product_phase(a, b);
        oracle::cplx ph[] = {1.0, {0, 1}, -1.0, {0, -1}};
        oracle::Mat lhs = oracle::pauli_matrix(a, nq) * oracle::pauli_matrix(b, nq);
        oracle::Mat rhs = ph[k] * oracle::pauli_matrix(product_string(a, b), nq);
        REQUIRE((lhs - rhs).norm() < 1e-12);
        CHECK(commutes(a, b) == ((lhs - (oracle::pauli_matrix(b, nq) * oracle::pauli_matrix(a, nq))).norm() < 1e-12));
    }
}

TEST_CASE("commutator convention [a,b] = iC") {
    PauliSum z(1), x(1);
    z.add(PauliString::single(0, 'Z'), 1);
    x.add(PauliString::single(0, 'X'), 1);
    auto c = commutator(z, x);
    CHECK(c.term_count() == 1);
    CHECK(c.coefficient(PauliString::single(0, 'Y')) == doctest::Approx(2.0));
}

TEST_CASE("multiply and commutator match dense algebra") {
    std::mt19937_64 rng(11);
    const int nq = 5;
    for (int trial = 0; trial < 20; trial++) {
        auto a = random_hermitian(nq, 8, rng), b = random_hermitian(nq, 8, rng);
        oracle::Mat ma = oracle::pauli_sum_matrix(a, nq), mb = oracle::pauli_sum_matrix(b, nq);
        auto c = commutator(a, b);
        oracle::Mat expect = (ma * mb - mb * ma) / oracle::cplx(0, 1);
        CHECK((oracle::pauli_sum_matrix(c, nq) - expect).norm() < 1e-10);
        // a*a is Hermitian
        auto sq = multiply(a, a);
        CHECK((oracle::pauli_sum_matrix(sq, nq) - ma * ma).norm() < 1e-10);
    }
}

TEST_CASE("non-Hermitian product is rejected") {
    PauliSum x(1), z(1);
    x.add(PauliString::single(0, 'X'), 1);
    z.add(PauliString::single(0, 'Z'), 1);
    CHECK_THROWS_AS(multiply(x, z), std::domain_error);
}

TEST_CASE("identity is kept but not counted") {
    PauliSum s(3);
    s.add(PauliString::parse("I"), 2.0);
    s.add(PauliString::parse("Z1"), 1.0);
    CHECK(s.term_count() == 1);
    CHECK(s.identity_coefficient() == 2.0);
    CHECK(s.without_identity().size() == 1);
    s.add(PauliString::parse("Z1"), -1.0);
    s.prune_absolute(1e-12);
    CHECK(s.term_count() == 0);
}

TEST_CASE("canonical order and text round trip") {
    std::mt19937_64 rng(5);
    auto s = random_hermitian(6, 30, rng);
    auto sorted = s.sorted_terms();
    for (size_t i = 1; i < sorted.size(); i++) CHECK(canonical_less(sorted[i - 1].first, sorted[i].first));
    auto back = PauliSum::from_text(s.to_text(), 6);
    CHECK(back.size() == s.size());
    for (const auto &[p, c] : s.terms()) CHECK(back.coefficient(p) == doctest::Approx(c).epsilon(1e-7));
}

TEST_CASE("compiled row norms and basis-state action") {
    std::mt19937_64 rng(9);
    const int nq = 5;
    auto s = random_hermitian(nq, 12, rng);
    CompiledPauliSum comp(s);
    oracle::Mat m = oracle::pauli_sum_matrix(s, nq);
    for (uint64_t b = 0; b < (1u << nq); b++) {
        CHECK(comp.row_norm_sq(mask_from_u64(b)) == doctest::Approx(m.col(b).squaredNorm()));
        for (auto &[out, amp] : apply_to_basis_state(s, mask_from_u64(b))) {
            CHECK(std::abs(amp - m(out.w[0], b)) < 1e-12);
        }
    }
}
