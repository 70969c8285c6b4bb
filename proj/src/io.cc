#include "trotterlab/io.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trotterlab {

std::string version() { return TROTTERLAB_VERSION; }

std::string read_text(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string layout_name(SpinLayout l) { return l == SpinLayout::interleaved ? "interleaved" : "blocked"; }

SpinLayout parse_layout(const std::string &name) {
    if (name == "interleaved") return SpinLayout::interleaved;
    if (name == "blocked") return SpinLayout::blocked;
    throw std::invalid_argument("unknown spin layout '" + name + "'");
}

Json lattice_json(const Lattice &lat) {
    Json sites = Json::array(), bonds = Json::array(), hex = Json::array();
    for (const auto &s : lat.sites) sites.push_back({s.x(), s.y()});
    for (auto [i, j] : lat.bonds) bonds.push_back({i, j});
    for (const auto &h : lat.hexagons) hex.push_back(h);
    return {{"family", family_name(lat.family)},
            {"n", lat.size_n},
            {"name", lat.name()},
            {"bond_length", lat.bond_length},
            {"site_count", lat.site_count()},
            {"bond_count", lat.bonds.size()},
            {"sites", sites},
            {"bonds", bonds},
            {"hexagons", hex}};
}

Json params_json(const PppParams &p) {
    return {{"tau", p.tau}, {"u", p.u}, {"alpha", p.alpha}, {"bond_length", p.bond_length}};
}

PppParams params_from_json(const Json &j) {
    PppParams p;
    if (!j.is_object()) throw std::invalid_argument("params: expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto &k = it.key();
        if (!it->is_number()) throw std::invalid_argument("params." + k + ": expected a number");
        double v = it->get<double>();
        if (k == "tau") p.tau = v;
        else if (k == "u") p.u = v;
        else if (k == "alpha") p.alpha = v;
        else if (k == "bond_length") p.bond_length = v;
        else throw std::invalid_argument("params." + k + ": unknown field");
    }
    p.validate();
    return p;
}

Json pauli_sum_json(const PauliSum &op) {
    Json terms = Json::array();
    for (const auto &[p, c] : op.sorted_terms()) terms.push_back({p.to_string(), c});
    return {{"qubits", op.qubit_count()}, {"terms", terms}};
}

PauliSum pauli_sum_from_json(const Json &j) {
    PauliSum op(j.at("qubits").get<int>());
    for (const auto &t : j.at("terms")) op.add(PauliString::parse(t.at(0).get<std::string>()), t.at(1).get<double>());
    return op;
}

Json hamiltonian_json(const MolecularSystem &sys, bool include_terms) {
    Json j;
    j["molecule"] = {{"family", family_name(sys.lattice.family)}, {"n", sys.lattice.size_n}};
    j["params"] = params_json(sys.params);
    j["layout"] = layout_name(sys.layout);
    j["site_count"] = sys.n_sites();
    j["qubits"] = 2 * sys.n_sites();
    const bool off = sys.shift.c1 == 0 && sys.shift.c2 == 0;
    j["shift"] = {{"mode", off ? "none" : "auto"}, {"c1", sys.shift.c1}, {"c2", sys.shift.c2}};
    j["term_counts"] = {{"kinetic", sys.jw.kinetic.term_count()},
                        {"potential", sys.jw.potential.term_count()},
                        {"shifted_potential", sys.shifted_potential.term_count()}};
    j["offset"] = {{"potential", sys.jw.potential.identity_coefficient()},
                   {"shifted_potential", sys.shifted_potential.identity_coefficient()}};
    if (include_terms) {
        Json hops = Json::array(), pair = Json::array();
        for (const auto &h : sys.fermion.kinetic)
            if (h.spin == Spin::up) hops.push_back({h.i, h.j, h.coeff});
        for (int i = 0; i < sys.n_sites(); i++)
            for (int k = i + 1; k < sys.n_sites(); k++) pair.push_back({i, k, sys.fermion.pair(i, k)});
        j["hoppings"] = hops;  // per spin species
        j["onsite"] = std::vector<double>(sys.fermion.onsite.data(), sys.fermion.onsite.data() + sys.fermion.onsite.size());
        j["pair"] = pair;
        j["kinetic"] = pauli_sum_json(sys.jw.kinetic);
        j["potential"] = pauli_sum_json(sys.jw.potential);
        j["shifted_potential"] = pauli_sum_json(sys.shifted_potential);
    }
    return j;
}

MolecularSystem system_from_json(const Json &j) {
    if (!j.contains("molecule")) throw std::invalid_argument("molecule: missing");
    const auto &m = j.at("molecule");
    if (!m.contains("family") || !m["family"].is_string()) throw std::invalid_argument("molecule.family: missing or not a string");
    if (!m.contains("n") || !m["n"].is_number_integer()) throw std::invalid_argument("molecule.n: missing or not an integer");
    Family f = parse_family(m["family"].get<std::string>());
    PppParams p = j.contains("params") ? params_from_json(j["params"]) : PppParams{};
    SpinLayout l = j.contains("layout") ? parse_layout(j["layout"].get<std::string>()) : SpinLayout::interleaved;
    auto sys = build_system(f, m["n"].get<int>(), p, l);
    if (j.contains("shift") && j["shift"].is_object() && j["shift"].value("mode", "auto") == "none") disable_shift(sys);
    return sys;
}

Json norm_json(const NormEstimate &e) {
    Json j{{"value", e.value}, {"kind", norm_kind_name(e.kind)}, {"converged", e.converged}};
    if (e.kind == NormKind::frobenius_sampled) {
        j["standard_error"] = e.standard_error;
        j["samples"] = e.sample_count;
        j["seed"] = e.seed;
    }
    return j;
}

Json constant_json(const ErrorConstant &c) {
    Json comp = Json::object();
    for (const auto &[k, v] : c.components) comp[k] = v;
    return {{"kind", constant_kind_name(c.kind)},
            {"scheme", scheme_name(c.scheme)},
            {"value", c.value},
            {"standard_error", c.standard_error},
            {"upper_bound", c.upper_bound},
            {"components", comp}};
}

Json kinetic_json(const KineticConstant &k) {
    Json pts = Json::array();
    for (const auto &p : k.points) pts.push_back({{"t", p.t}, {"value", p.value}, {"standard_error", p.standard_error}});
    Json j = constant_json(k.constant);
    j["points"] = pts;
    j["fit_r2"] = k.fit_r2;
    return j;
}

Json cost_json(const CostReport &r) {
    const auto &p = r.inputs;
    Json in{{"epsilon", p.epsilon}, {"x", p.x},        {"mode", cost_mode_name(p.mode)},
            {"n_rotations", p.n_rotations}, {"n_t", p.n_t}, {"n_sites", p.n_sites},
            {"gap", p.gap}};
    if (p.mode == CostMode::fixed_error) in["g"] = p.g;
    else in["t"] = p.t;
    Json j{{"inputs", in},
           {"mode", cost_mode_name(p.mode)},
           {"n_steps", r.n_steps},
           {"t_implied", r.t_implied},
           {"t_per_step_gates", r.t_per_step},
           {"total_T", r.total_t},
           {"total_Toffoli", r.total_toffoli},
           {"logical_qubits", r.logical_qubits}};
    if (r.hwp)
        j["hwp"] = {{"rotations_per_step", r.hwp_rotations},
                    {"toffoli_per_step", r.hwp_toffoli_per_step},
                    {"ancillas", r.hwp_ancillas}};
    return j;
}

Json spectrum_json(const SpectrumReport &r) {
    Json st = Json::array(), pr = Json::array();
    for (const auto &s : r.states)
        st.push_back({{"label", s.label},
                      {"exact", s.exact},
                      {"effective", s.effective},
                      {"signed_error", s.signed_error},
                      {"constant", s.constant},
                      {"signed_constant", s.signed_constant}});
    for (const auto &p : r.pairs)
        pr.push_back({{"a", p.a},
                      {"b", p.b},
                      {"exact_gap", p.exact_gap},
                      {"effective_gap", p.effective_gap},
                      {"constant", p.constant}});
    return {{"t", r.t}, {"states", st}, {"pairs", pr}};
}

Json wrapping_json(const WrappingDiagnosis &w) {
    Json j{{"strict", w.strict}, {"range", {w.range_lo, w.range_hi}}, {"weight_condition", w.weight_condition}};
    if (w.target_weight) j["target_weight"] = *w.target_weight;
    if (w.out_of_range_weight) j["out_of_range_weight"] = *w.out_of_range_weight;
    return j;
}

Json load_reference() { return Json::parse(read_text(data_dir() + "/reference_values.json")); }

}  // namespace trotterlab
