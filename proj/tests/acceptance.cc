// Acceptance run: one line per criterion. Slow checks need --slow.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.h"
#include "trotterlab/io.h"

using namespace trotterlab;

namespace {

struct Outcome {
    enum Status { pass, fail, skipped } status = pass;
    std::string detail;
    bool documented = false;  // failure listed under "deviations" in the reference file
};

struct Ctx {
    bool slow = false;
    int jobs = 1;
    Json ref;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::pair<Family, int> split_molecule(const std::string &m) {
    size_t cut = m.find_first_of("0123456789");
    return {parse_family(m.substr(0, cut)), std::stoi(m.substr(cut))};
}

int find_label(const std::vector<LabeledState> &st, const std::string &label) {
    for (size_t i = 0; i < st.size(); i++)
        if (st[i].label == label) return static_cast<int>(i);
    throw std::runtime_error("state " + label + " not among the computed low-lying states");
}

Outcome c1_term_counts(Ctx &c) {
    Outcome o;
    int ok = 0, total = 0;
    std::ostringstream bad;
    for (const auto &row : c.ref["table1"]["rows"]) {
        auto [f, n] = split_molecule(row["molecule"]);
        auto sys = build_system(f, n);
        int64_t v = sys.jw.potential.term_count(), vs = sys.shifted_potential.term_count();
        total += 2;
        ok += (v == row["V"].get<int64_t>()) + (vs == row["V_shifted"].get<int64_t>());
        if (v != row["V"] || vs != row["V_shifted"]) bad << " " << row["molecule"].get<std::string>() << "=" << v << "/" << vs;
    }
    o.status = ok == total ? Outcome::pass : Outcome::fail;
    o.detail = fmt("%d/%d term counts exact", ok, total) + bad.str();
    return o;
}

Outcome gaps_for(const Json &row, double tol) {
    auto [f, n] = split_molecule(row["molecule"]);
    auto sys = build_system(f, n);
    SectorBasis basis(SectorSpec::half_filling(sys.n_sites()));
    auto st = low_lying_states(sys.hamiltonian(), basis, 4);
    double t1 = st[find_label(st, "T1")].energy - st[0].energy;
    double s1 = st[find_label(st, "S1")].energy - st[0].energy;
    double rt = row["S0_T1"], rs = row["S0_S1"];
    Outcome o;
    o.status = std::abs(t1 - rt) <= tol && std::abs(s1 - rs) <= tol ? Outcome::pass : Outcome::fail;
    o.detail = fmt("%s S0-T1 %.4f (ref %.3f), S0-S1 %.4f (ref %.3f)", row["molecule"].get<std::string>().c_str(), t1,
                   rt, s1, rs);
    return o;
}

Outcome c2_gaps(Ctx &c) {
    const double tol = c.ref["table4"]["tolerance"];
    Outcome o;
    std::string detail;
    for (const auto &row : c.ref["table4"]["rows"]) {
        if (row["slow"].get<bool>() && !c.slow) {
            detail += "; " + row["molecule"].get<std::string>() + " skipped (--slow)";
            continue;
        }
        auto r = gaps_for(row, tol);
        if (r.status == Outcome::fail) o.status = Outcome::fail;
        detail += (detail.empty() ? "" : "; ") + r.detail;
    }
    o.detail = detail;
    return o;
}

Outcome c3_frobenius(Ctx &c) {
    const auto &row = c.ref["table2"]["rows"][0];
    auto sys = build_system(Family::acene, 3);
    auto nc = nested_commutators(sys.jw.kinetic, sys.jw.potential);
    auto spec = SectorSpec::half_filling(sys.n_sites());
    auto vtv = frobenius_sampled(nc.vtv, spec, 10000, 1, c.jobs);
    auto vtt = frobenius_sampled(nc.vtt, spec, 10000, 2, c.jobs);
    auto within = [](const NormEstimate &e, double ref, double se) {
        return std::abs(e.value - ref) <= 3 * (se + e.standard_error);
    };
    bool a = within(vtv, row["frob_vtv"], row["frob_vtv_se"]);
    bool b = within(vtt, row["frob_vtt"], row["frob_vtt_se"]);
    Outcome o;
    o.status = a && b ? Outcome::pass : Outcome::fail;
    o.detail = fmt("VTV %.1f +- %.2f (ref %.1f) %s, VTT %.1f +- %.2f (ref %.1f) %s, K=10000", vtv.value,
                   vtv.standard_error, row["frob_vtv"].get<double>(), a ? "ok" : "out", vtt.value, vtt.standard_error,
                   row["frob_vtt"].get<double>(), b ? "ok" : "out");
    const auto &dev = c.ref["table2"]["deviations"];
    o.documented = !a && b && dev.contains("frob_vtv");
    return o;
}

Outcome c4_spectral(Ctx &c) {
    auto sys = build_system(Family::acene, 1);
    SectorBasis basis(SectorSpec::half_filling(6));
    auto nc = nested_commutators(sys.jw.kinetic, sys.jw.potential);
    auto bv = spectral_norm_bound(nc.vtv, basis, 1e-10), bt = spectral_norm_bound(nc.vtt, basis, 1e-10);
    auto ev = dense_spectral_norm(nc.vtv, basis), et = dense_spectral_norm(nc.vtt, basis);
    const double slack = 1e-9;
    bool dominate = bv.value >= ev.value * (1 - slack) && bt.value >= et.value * (1 - slack);
    double rel = (bv.value - ev.value) / ev.value;
    Outcome o;
    o.status = dominate && rel <= 0.005 ? Outcome::pass : Outcome::fail;
    o.detail = fmt("benzene VTV bound %.3f vs exact %.3f (+%.3f%%), VTT bound %.3f vs exact %.3f", bv.value, ev.value,
                   100 * rel, bt.value, et.value);
    if (c.slow) {
        const auto &row = c.ref["table2"]["rows"][0];
        auto s3 = build_system(Family::acene, 3);
        SectorBasis b3(SectorSpec::half_filling(14));
        auto n3 = nested_commutators(s3.jw.kinetic, s3.jw.potential);
        auto v3 = spectral_norm_bound(n3.vtv, b3, 1e-8);
        double r3 = std::abs(v3.value - row["spectral_vtv"].get<double>()) / row["spectral_vtv"].get<double>();
        if (r3 > 0.01) o.status = Outcome::fail;
        o.detail += fmt("; 3-acene VTV bound %.1f (ref %.1f)", v3.value, row["spectral_vtv"].get<double>());
    } else {
        o.detail += "; 3-acene value skipped (--slow)";
    }
    return o;
}

Outcome c5_fig5(Ctx &c) {
    const auto &ref = c.ref["fig5"];
    const double t = ref["t"];
    auto sys = build_system(Family::acene, 1);
    SectorBasis basis(SectorSpec::half_filling(6));
    auto eff = effective_hamiltonian_dense(so_scheme(sys.jw.kinetic, sys.jw.potential, t), basis);
    Eigen::MatrixXd h = SectorOperator(sys.hamiltonian(), basis).dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    auto m = pair_eigenstates(es.eigenvalues(), es.eigenvectors().cast<cplx>(), eff.vectors);
    std::vector<double> e, k;
    int flagged = 0;
    for (auto &x : m) {
        e.push_back(es.eigenvalues()[x.exact]);
        k.push_back((eff.energies[x.effective] - es.eigenvalues()[x.exact]) / (t * t));
        flagged += x.flagged;
    }
    double r = pearson(e, k);
    double trace = eff.energies.sum() - h.trace();
    double hnorm = es.eigenvalues().cwiseAbs().maxCoeff();
    Outcome o;
    o.status = std::abs(r - ref["pearson"].get<double>()) <= ref["tolerance"].get<double>() &&
                       std::abs(trace) <= 1e-8 * hnorm
                   ? Outcome::pass
                   : Outcome::fail;
    o.detail = fmt("Pearson r %.4f (ref %.3f), Tr(H~-H) %.2e, %d states, %d flagged", r, ref["pearson"].get<double>(),
                   trace, int(m.size()), flagged);
    return o;
}

Outcome c6_series(Ctx &) {
    Outcome o;
    double worst = 0;
    std::string detail;
    const double a = 0.01;
    for (int n : {1, 2}) {
        auto sys = build_system(Family::acene, n);
        SectorBasis basis(SectorSpec::half_filling(sys.n_sites()));
        auto st = low_lying_states(sys.hamiltonian(), basis, 1);
        ComplexVector psi = st[0].vector.cast<cplx>();
        for (double t : {0.01, 0.05}) {
            auto sch = so_scheme(sys.jw.kinetic, sys.jw.potential, t);
            // benzene: dense log U; 2-acene: Arnoldi on U
            auto method = n == 1 ? EffectiveMethod::dense : EffectiveMethod::arnoldi;
            double ref = effective_energy(sch, basis, psi, st[0].energy, method);
            double ser = effective_energy(sch, basis, psi, st[0].energy, EffectiveMethod::series, a);
            worst = std::max(worst, std::abs(ser - ref));
            detail += fmt("%s%s t=%.2f |dE|=%.1e", detail.empty() ? "" : ", ", n == 1 ? "benzene" : "2-acene", t,
                          std::abs(ser - ref));
        }
    }
    o.status = worst <= 1e-6 ? Outcome::pass : Outcome::fail;
    o.detail = detail + fmt(" (filter a=%.2f)", a);
    return o;
}

// Filtered series (a = 0.05) is enough here: the margins are ~1e-2 eV while
// the filter bias is far below 1e-4 eV. Arnoldi struggles at t = 0.1 because
// the phases of U span the whole circle.
Outcome c7_cancellation(Ctx &c) {
    const auto &g = c.ref["gap_cancellation"];
    const double t = g["t"], budget = g["epsilon"].get<double>() / 3;
    auto sys = build_system(Family::acene, 2);
    SectorBasis basis(SectorSpec::half_filling(sys.n_sites()));
    auto st = low_lying_states(sys.hamiltonian(), basis, 4);
    int s0 = 0, t1 = find_label(st, "T1");
    auto errors = [&](const TrotterScheme &sch) {
        double e0 = effective_energy(sch, basis, st[s0].vector.cast<cplx>(), st[s0].energy, EffectiveMethod::series, 0.05);
        double e1 = effective_energy(sch, basis, st[t1].vector.cast<cplx>(), st[t1].energy, EffectiveMethod::series, 0.05);
        return std::pair{std::abs(e0 - st[s0].energy), std::abs((e1 - e0) - (st[t1].energy - st[s0].energy))};
    };
    auto ks = tile_sections(sys.lattice, TilingSpec::load(default_tiling_path(Family::acene, 2)));
    auto [tile_s0, tile_gap] = errors(tile_scheme(kinetic_section_operators(sys.fermion, ks, sys.layout), sys.jw.potential, t));
    auto [so_s0, so_gap] = errors(so_scheme(sys.jw.kinetic, sys.jw.potential, t));
    Outcome o;
    bool tile_ok = tile_gap < budget && tile_s0 > budget;
    o.status = tile_ok ? Outcome::pass : Outcome::fail;
    o.documented = !tile_ok && so_gap < budget && so_s0 > budget && g["deviations"].contains("tile_gap");
    o.detail = fmt("2-acene t=%.2f S0-T1, budget %.5f: tile |dE_S0| = %.4f, |d - d~| = %.5f; SO |dE_S0| = %.4f, |d - d~| = %.5f",
                   t, budget, tile_s0, tile_gap, so_s0, so_gap);
    return o;
}

Outcome c8_free_fermion(Ctx &c) {
    std::mt19937_64 rng(2024);
    double worst_norm = 0, worst_prod = 0;
    for (int trial = 0; trial < 6; trial++) {
        const int n = 4 + trial % 5;  // 4..8 modes
        const int s = 2 + trial % 3;
        Eigen::MatrixXd a = oracle::random_symmetric_zero_diag(n, rng, 0.7);
        KineticSections ks;
        ks.n_modes = n;
        ks.full = a;
        ks.sections.assign(s, Eigen::MatrixXd::Zero(n, n));
        ks.bonds.resize(s);
        int next = 0;
        for (int i = 0; i < n; i++)
            for (int j = i + 1; j < n; j++)
                if (a(i, j) != 0) {
                    int k = next++ % s;
                    ks.sections[k](i, j) = ks.sections[k](j, i) = a(i, j);
                }
        const double t = 0.05 + 0.05 * trial;
        auto eff = effective_kinetic(ks, t);
        // Fock-space product formula
        const int64_t d = int64_t(1) << n;
        oracle::Mat u = oracle::expmi(oracle::quadratic(a.cast<cplx>()), -t);
        for (int k = 0; k < s; k++) u = u * oracle::expmi(oracle::quadratic(ks.sections[k].cast<cplx>()), k + 1 == s ? t : t / 2);
        for (int k = s - 2; k >= 0; k--) u = u * oracle::expmi(oracle::quadratic(ks.sections[k].cast<cplx>()), t / 2);
        oracle::Mat q = oracle::quadratic(eff.matrix);
        worst_prod = std::max(worst_prod, (u - oracle::expmi(q, t)).norm() / std::sqrt(double(d)));
        // spectral norm over the whole Fock space = half the trace norm
        Eigen::SelfAdjointEigenSolver<oracle::Mat> es(q);
        double fock = es.eigenvalues().cwiseAbs().maxCoeff();
        worst_norm = std::max(worst_norm, std::abs(fock - 0.5 * eff.modes.cwiseAbs().sum()));
    }
    // one section: no kinetic error
    auto bz = build_system(Family::acene, 1);
    auto ks1 = tile_sections(bz.lattice, TilingSpec::load(default_tiling_path(Family::acene, 1)));
    double w1 = worst_case_kinetic(ks1, default_t_grid(), 3, 3).constant.value;
    double a1 = average_case_kinetic(ks1, default_t_grid(), 3, 3, 2000, 1).constant.value;
    // tile/SO ratio for 3-acene
    auto s3 = build_system(Family::acene, 3);
    auto ks3 = tile_sections(s3.lattice, TilingSpec::load(default_tiling_path(Family::acene, 3)));
    double wt = worst_case_kinetic(ks3, default_t_grid(), 7, 7).constant.value;
    double wso = c.ref["costs"]["W_SO_acene3"];
    std::string wso_src = "reference";
    if (c.slow) {
        SectorBasis b3(SectorSpec::half_filling(14));
        auto n3 = nested_commutators(s3.jw.kinetic, s3.jw.potential);
        NormEstimate v = spectral_norm_bound(n3.vtv, b3, 1e-8), tt = spectral_norm_bound(n3.vtt, b3, 1e-8);
        wso = worst_case_constant(v, tt).value;
        wso_src = "computed";
    }
    double ratio = (wso + wt) / wso;
    Outcome o;
    o.status = worst_norm < 1e-10 && worst_prod < 1e-10 && w1 < 1e-9 && a1 < 1e-9 && ratio >= 1.0 && ratio <= 1.3
                   ? Outcome::pass
                   : Outcome::fail;
    o.detail = fmt("norm dev %.1e, product dev %.1e, S=1 W_T=%.1e A_T=%.1e, 3-acene W_T=%.2f ratio %.3f (W_SO %s)",
                   worst_norm, worst_prod, w1, a1, wt, ratio, wso_src.c_str());
    return o;
}

Outcome c9_table3(Ctx &c) {
    int ok = 0, total = 0;
    std::string bad;
    for (const auto &row : c.ref["table3"]["rows"]) {
        std::string mol = row["molecule"];
        auto [f, n] = split_molecule(mol);
        auto sys = build_system(f, n);
        auto spec = TilingSpec::load(default_tiling_path(f, n));
        tile_sections(sys.lattice, spec);  // throws on a bad partition
        auto g = kinetic_gate_count(spec);
        bool good = int64_t(sys.shifted_potential.term_count()) == row["NR_V"].get<int64_t>() &&
                    g.rotations == row["NR_T"].get<int64_t>() && g.t_gates == row["NT_T"].get<int64_t>();
        ok += good;
        total++;
        if (!good) bad += " " + mol;
    }
    Outcome o;
    o.status = ok == total ? Outcome::pass : Outcome::fail;
    o.detail = fmt("%d/%d molecules match N_R(V), N_R(T), N_T(T)", ok, total) + bad;
    return o;
}

Outcome c10_costs(Ctx &c) {
    const auto &cr = c.ref["costs"];
    auto sys = build_system(Family::acene, 3);
    auto tiling = TilingSpec::load(default_tiling_path(Family::acene, 3));
    auto g = kinetic_gate_count(tiling);
    CostParams p;
    p.epsilon = cr["epsilon"];
    p.x = cr["x"];
    p.t = cr["gap_t"];
    p.mode = CostMode::fixed_timestep;
    p.n_rotations = int64_t(sys.shifted_potential.term_count()) + g.rotations;
    p.n_t = g.t_gates;
    p.n_sites = sys.n_sites();
    auto single = total_cost(p);
    // worst-case mode with the tile constant W_SO + W_T
    auto ks = tile_sections(sys.lattice, tiling);
    double w = cr["W_SO_acene3"].get<double>() + worst_case_kinetic(ks, default_t_grid(), 7, 7).constant.value;
    CostParams pw = p;
    pw.mode = CostMode::fixed_error;
    pw.g = w;
    auto worst = total_cost(pw);
    bool steps_ok = single.n_steps == cr["acene3_gap_steps"].get<int64_t>();
    double ref_t = cr["acene3_gap_single_run_T"];
    bool t_ok = std::abs(single.total_t - ref_t) <= 0.01 * ref_t;
    bool ratio_ok = worst.total_t >= 5 * single.total_t;
    double bound = cr["hwp_gap_toffoli_bound"];
    std::string hwp;
    bool hwp_ok = true;
    for (auto [f, n] : {std::pair{Family::rhombene, 5}, std::pair{Family::triangulene, 5}}) {
        auto s = build_system(f, n);
        auto tl = TilingSpec::load(default_tiling_path(f, n));
        auto gc = kinetic_gate_count(tl);
        CostParams q = p;
        q.gap = true;
        q.n_sites = s.n_sites();
        q.n_rotations = int64_t(s.shifted_potential.term_count()) + gc.rotations;
        q.n_t = gc.t_gates;
        auto r = hwp_estimate(s.shifted_potential, tl, q);
        hwp_ok = hwp_ok && r.total_toffoli < bound;
        hwp += fmt(", %s HWP gap %.2e Toffoli", s.lattice.name().c_str(), r.total_toffoli);
    }
    Outcome o;
    o.status = steps_ok && t_ok && ratio_ok && hwp_ok ? Outcome::pass : Outcome::fail;
    o.detail = fmt("3-acene steps %lld, single-run T %.3e, worst-case mode T %.2e (x%.1f)", (long long)single.n_steps,
                   single.total_t, worst.total_t, worst.total_t / single.total_t) +
               hwp;
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    Ctx c;
    std::vector<int> only;
    for (int i = 1; i < argc; i++) {
        if (!std::strcmp(argv[i], "--slow"))
            c.slow = true;
        else if (!std::strcmp(argv[i], "--jobs") && i + 1 < argc)
            c.jobs = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--only") && i + 1 < argc)
            only.push_back(std::atoi(argv[++i]));
        else {
            std::cerr << "usage: acceptance [--slow] [--jobs N] [--only K]...\n";
            return 2;
        }
    }
    c.ref = load_reference();
    const std::vector<std::pair<int, std::function<Outcome(Ctx &)>>> criteria = {
        {1, c1_term_counts}, {2, c2_gaps},          {3, c3_frobenius},   {4, c4_spectral},    {5, c5_fig5},
        {6, c6_series},      {7, c7_cancellation}, {8, c8_free_fermion}, {9, c9_table3},     {10, c10_costs},
    };
    int failures = 0;
    for (const auto &[id, fn] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn(c);
        } catch (const std::exception &e) {
            o.status = Outcome::fail;
            o.detail = std::string("error: ") + e.what();
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char *s = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "skipped";
        std::cout << "criterion " << id << ": " << s << " - " << o.detail << fmt(" [%.1fs]", sec);
        if (o.status == Outcome::fail && o.documented) std::cout << " [documented deviation, see README]";
        std::cout << std::endl;
        if (o.status == Outcome::fail && !o.documented) failures++;
    }
    return failures == 0 ? 0 : 1;
}
