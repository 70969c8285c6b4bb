#include "trotterlab/resources.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "trotterlab/hamiltonian.h"

namespace trotterlab {

std::string cost_mode_name(CostMode m) { return m == CostMode::fixed_error ? "fixed_error" : "fixed_timestep"; }

void CostParams::validate() const {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    if (!(x > 0 && x < 1)) throw std::invalid_argument("x must lie in (0, 1)");
    if (mode == CostMode::fixed_error && !(g > 0)) throw std::invalid_argument("g must be positive in fixed_error mode");
    if (mode == CostMode::fixed_timestep && !(t > 0)) throw std::invalid_argument("t must be positive in fixed_timestep mode");
    if (n_rotations < 0 || n_t < 0) throw std::invalid_argument("gate counts must be non-negative");
    if (n_sites < 0) throw std::invalid_argument("n_sites must be non-negative");
}

int64_t steps_fixed_error(double g, double epsilon, double x) {
    if (!(g >= 0)) throw std::invalid_argument("g must be non-negative");
    double n = 6.203 * std::sqrt(g) / (std::pow(1 - x, 1.5) * std::pow(epsilon, 1.5));
    return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(n)));
}

int64_t steps_fixed_timestep(double t, double epsilon, double x) {
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    double n = 2.28 * M_PI / (2 * (1 - x) * epsilon * t);
    return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(n)));
}

double implied_timestep(double g, double epsilon, double x) {
    // the t at which the fixed-timestep count equals the fixed-error count
    double n = 6.203 * std::sqrt(g) / (std::pow(1 - x, 1.5) * std::pow(epsilon, 1.5));
    return 2.28 * M_PI / (2 * (1 - x) * epsilon * n);
}

double t_gates_per_step(const CostParams &p) {
    if (p.n_rotations == 0) return static_cast<double>(p.n_t);
    double nr = static_cast<double>(p.n_rotations);
    double arg = p.mode == CostMode::fixed_error
                     ? nr * std::sqrt(p.g) / (p.x * std::sqrt(1 - p.x) * std::pow(p.epsilon, 1.5))
                     : nr / (p.x * p.epsilon * p.t);
    return nr * (1.15 * std::log2(arg) + 9.2) + static_cast<double>(p.n_t);
}

CostReport total_cost(const CostParams &p) {
    p.validate();
    CostReport r;
    r.inputs = p;
    if (p.mode == CostMode::fixed_error) {
        r.n_steps = steps_fixed_error(p.g, p.epsilon, p.x);
        r.t_implied = implied_timestep(p.g, p.epsilon, p.x);
    } else {
        r.n_steps = steps_fixed_timestep(p.t, p.epsilon, p.x);
        r.t_implied = p.t;
    }
    r.t_per_step = t_gates_per_step(p);
    const double runs = p.gap ? 2 : 1;
    r.total_t = std::ceil(runs * r.n_steps * r.t_per_step);
    r.total_toffoli = std::ceil(r.total_t / 2);
    r.logical_qubits = 2 * int64_t(p.n_sites) + 2;
    return r;
}

int64_t hwp_rotations(int64_t k, HwpModel model) {
    if (k <= 0) return 0;
    return model == HwpModel::single ? 1 : std::bit_width(static_cast<uint64_t>(k));
}
int64_t hwp_toffoli(int64_t k) { return k <= 0 ? 0 : k - std::popcount(static_cast<uint64_t>(k)); }

namespace {

// Split `size` rotations into `batches` near-equal parallel batches.
void merge_batches(int64_t size, int64_t batches, HwpModel model, int64_t &rot, int64_t &tof) {
    rot = tof = 0;
    if (size == 0) return;
    batches = std::clamp<int64_t>(batches, 1, size);
    int64_t base = size / batches, extra = size % batches;
    for (int64_t b = 0; b < batches; b++) {
        int64_t k = base + (b < extra ? 1 : 0);
        rot += hwp_rotations(k, model);
        tof += hwp_toffoli(k);
    }
}

}  // namespace

HwpBreakdown hwp_breakdown(const PauliSum &shifted_potential, const TilingSpec &tiling, int n_sites, HwpModel model,
                           double rel_tol) {
    HwpBreakdown out;
    const int64_t cap = std::max(1, n_sites);  // N parallel rotations with N - 1 ancillas
    // group non-identity terms by coefficient (binned at rel_tol)
    std::vector<std::pair<double, PauliString>> terms;
    for (const auto &[p, c] : shifted_potential.terms())
        if (!p.is_identity()) terms.emplace_back(c, p);
    std::sort(terms.begin(), terms.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    size_t i = 0;
    while (i < terms.size()) {
        size_t j = i + 1;
        while (j < terms.size() &&
               std::abs(terms[j].first - terms[i].first) <= rel_tol * std::max(std::abs(terms[i].first), 1e-300))
            j++;
        std::map<int, int64_t> occ;
        for (size_t k = i; k < j; k++) {
            const auto &z = terms[k].second.z;
            for (int q = 0; q < shifted_potential.qubit_count(); q++)
                if (z.get(q)) occ[q]++;
        }
        HwpGroup g;
        g.angle = terms[i].first;
        g.size = static_cast<int64_t>(j - i);
        g.max_occurrence = 1;
        for (auto &[q, n] : occ) g.max_occurrence = std::max(g.max_occurrence, n);
        g.width = std::min<double>(double(g.size) / double(g.max_occurrence), double(cap));
        g.batches = std::max<int64_t>(g.max_occurrence, (g.size + cap - 1) / cap);
        merge_batches(g.size, g.batches, model, g.rotations, g.toffoli);
        out.rotations_before += g.size;
        out.rotations += g.rotations;
        out.toffoli += g.toffoli;
        out.potential.push_back(g);
        i = j;
    }
    // kinetic: within a section, the r-th rotation of every tile of one shape
    // shares its angle across tiles and both spins
    const int s_count = static_cast<int>(tiling.sections.size());
    for (int s = 0; s < s_count; s++) {
        const int64_t mult = s + 1 < s_count ? 2 : 1;
        std::map<std::pair<std::string, int>, int64_t> count;
        for (const auto &t : tiling.sections[s].tiles) count[{t.shape, t.rotations}] += 1;
        for (const auto &[key, n] : count) {
            int64_t k = 2 * n;  // spins
            int64_t rot, tof;
            merge_batches(k, (k + cap - 1) / cap, model, rot, tof);
            out.kinetic_rotations_before += mult * key.second * k;
            out.kinetic_rotations += mult * key.second * rot;
            out.kinetic_toffoli += mult * key.second * tof;
        }
    }
    out.rotations_before += out.kinetic_rotations_before;
    out.rotations += out.kinetic_rotations;
    out.toffoli += out.kinetic_toffoli;
    return out;
}

CostReport hwp_estimate(const PauliSum &shifted_potential, const TilingSpec &tiling, const CostParams &base,
                        HwpModel model) {
    auto hb = hwp_breakdown(shifted_potential, tiling, base.n_sites, model);
    CostParams p = base;
    p.n_rotations = hb.rotations;
    CostReport r = total_cost(p);
    r.inputs = base;
    r.hwp = true;
    r.hwp_rotations = hb.rotations;
    r.hwp_toffoli_per_step = hb.toffoli;
    r.hwp_ancillas = std::max(0, base.n_sites - 1);
    const double runs = base.gap ? 2 : 1;
    r.total_toffoli += runs * double(r.n_steps) * double(hb.toffoli);
    r.logical_qubits += r.hwp_ancillas;
    return r;
}

WrappingDiagnosis wrapping_check(double e_min, double e_max, double t, double e_c) {
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    WrappingDiagnosis w;
    w.strict = (e_max - e_min) * t <= 2 * M_PI;
    w.range_lo = e_c - M_PI / t;
    w.range_hi = e_c + M_PI / t;
    return w;
}

WrappingDiagnosis wrapping_check(double e_min, double e_max, double t, double e_c, const std::vector<double> &energies,
                                 const std::vector<double> &weights, int target, double dominance) {
    if (energies.size() != weights.size()) throw std::invalid_argument("energies/weights length mismatch");
    if (target < 0 || target >= static_cast<int>(energies.size())) throw std::invalid_argument("target out of range");
    WrappingDiagnosis w = wrapping_check(e_min, e_max, t, e_c);
    double out = 0;
    for (size_t j = 0; j < energies.size(); j++)
        if (t * std::abs(energies[j] - e_c) >= M_PI) out += weights[j];
    w.target_weight = weights[target];
    w.out_of_range_weight = out;
    w.weight_condition = weights[target] >= dominance * out;
    return w;
}

}  // namespace trotterlab
