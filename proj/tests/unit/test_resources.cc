#include <doctest.h>

#include "trotterlab/hamiltonian.h"
#include "trotterlab/resources.h"

using namespace trotterlab;

TEST_CASE("step counts") {
    CHECK(steps_fixed_timestep(0.1, 0.04354, 0.02) == 840);
    int64_t n = steps_fixed_error(334.71, 0.04354, 0.02);
    CHECK(n == static_cast<int64_t>(std::ceil(6.203 * std::sqrt(334.71) / (std::pow(0.98, 1.5) * std::pow(0.04354, 1.5)))));
    // the implied time step reproduces the same count
    double t = implied_timestep(334.71, 0.04354, 0.02);
    CHECK(std::abs(steps_fixed_timestep(t, 0.04354, 0.02) - n) <= 1);
    CHECK_THROWS(steps_fixed_timestep(0, 0.04354, 0.02));
}

TEST_CASE("monotonicity") {
    CHECK(steps_fixed_error(400, 0.04, 0.02) > steps_fixed_error(300, 0.04, 0.02));
    CHECK(steps_fixed_error(300, 0.02, 0.02) > steps_fixed_error(300, 0.04, 0.02));
    CHECK(steps_fixed_timestep(0.05, 0.04, 0.02) > steps_fixed_timestep(0.1, 0.04, 0.02));
    CostParams a;
    a.n_rotations = 100;
    CostParams b = a;
    b.n_rotations = 200;
    CHECK(t_gates_per_step(b) > t_gates_per_step(a));
}

TEST_CASE("per-step T gates and totals") {
    CostParams p;
    p.n_rotations = 342;
    p.n_t = 104;
    p.n_sites = 14;
    p.gap = true;
    double arg = 342 / (0.02 * 0.04354 * 0.1);
    CHECK(t_gates_per_step(p) == doctest::Approx(342 * (1.15 * std::log2(arg) + 9.2) + 104));
    auto r = total_cost(p);
    CHECK(r.n_steps == 840);
    CHECK(r.total_t == std::ceil(2 * 840 * r.t_per_step));
    CHECK(r.total_toffoli == std::ceil(r.total_t / 2));
    CHECK(r.logical_qubits == 30);
    p.gap = false;
    CHECK(total_cost(p).total_t == std::ceil(840 * r.t_per_step));
}

TEST_CASE("parameter validation") {
    CostParams p;
    p.x = 1.2;
    CHECK_THROWS(total_cost(p));
    p = {};
    p.mode = CostMode::fixed_error;
    CHECK_THROWS(total_cost(p));
    p.g = 100;
    CHECK_NOTHROW(total_cost(p));
}

TEST_CASE("Hamming-weight phasing costs") {
    CHECK(hwp_toffoli(1) == 0);
    CHECK(hwp_toffoli(7) == 4);
    CHECK(hwp_toffoli(8) == 7);
    CHECK(hwp_rotations(8) == 1);
    CHECK(hwp_rotations(8, HwpModel::weight_bits) == 4);
    CHECK(hwp_rotations(0) == 0);
}

TEST_CASE("HWP merging reduces rotations and adds ancillas") {
    auto sys = build_system(Family::acene, 3);
    auto tiling = TilingSpec::load(default_tiling_path(Family::acene, 3));
    auto hb = hwp_breakdown(sys.shifted_potential, tiling, sys.n_sites());
    CHECK(hb.rotations < hb.rotations_before);
    CHECK(hb.rotations_before == static_cast<int64_t>(sys.shifted_potential.term_count()) + hb.kinetic_rotations_before);
    CHECK(hb.kinetic_rotations_before == kinetic_gate_count(tiling).rotations);
    CostParams base;
    base.n_rotations = hb.rotations_before;
    base.n_sites = sys.n_sites();
    auto plain = total_cost(base);
    auto merged = hwp_estimate(sys.shifted_potential, tiling, base);
    CHECK(merged.hwp);
    CHECK(merged.hwp_ancillas == sys.n_sites() - 1);
    CHECK(merged.logical_qubits == plain.logical_qubits + sys.n_sites() - 1);
    CHECK(merged.t_per_step < plain.t_per_step);
}

TEST_CASE("phase wrapping diagnosis") {
    auto w = wrapping_check(-10, 10, 0.1, 0);
    CHECK(w.strict);
    CHECK(w.range_hi == doctest::Approx(M_PI / 0.1));
    auto w2 = wrapping_check(-40, 40, 0.1, 0, {-40, 0, 40}, {0.01, 0.98, 0.01}, 1);
    CHECK_FALSE(w2.strict);
    CHECK(*w2.out_of_range_weight == doctest::Approx(0.02));
    CHECK(w2.weight_condition);
    auto w3 = wrapping_check(-40, 40, 0.1, 0, {-40, 0, 40}, {0.3, 0.4, 0.3}, 1);
    CHECK_FALSE(w3.weight_condition);
}
