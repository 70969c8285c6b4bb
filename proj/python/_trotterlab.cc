#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trotterlab/io.h"

namespace py = pybind11;
using namespace trotterlab;

namespace {

// JSON crosses the boundary as text; the Python side parses it.
std::string dumps(const Json &j) { return j.dump(); }

MolecularSystem system_of(const std::string &family, int n, const PppParams &p, const std::string &layout) {
    return build_system(parse_family(family), n, p, parse_layout(layout));
}

}  // namespace

PYBIND11_MODULE(_trotterlab, m) {
    m.doc() = "Trotter error analysis and QPE costing for PPP nanographenes";
    m.attr("__version__") = version();

    py::class_<PppParams>(m, "PppParams")
        .def(py::init<>())
        .def_readwrite("tau", &PppParams::tau)
        .def_readwrite("u", &PppParams::u)
        .def_readwrite("alpha", &PppParams::alpha)
        .def_readwrite("bond_length", &PppParams::bond_length);

    m.def(
        "lattice_json",
        [](const std::string &family, int n, double bond) { return dumps(lattice_json(build_lattice(parse_family(family), n, bond))); },
        py::arg("family"), py::arg("n"), py::arg("bond_length") = 1.4);

    py::class_<PauliSum>(m, "PauliSum")
        .def_property_readonly("qubit_count", &PauliSum::qubit_count)
        .def("term_count", &PauliSum::term_count)
        .def("identity_coefficient", &PauliSum::identity_coefficient)
        .def("coefficient", [](const PauliSum &s, const std::string &p) { return s.coefficient(PauliString::parse(p)); })
        .def("to_text", &PauliSum::to_text)
        .def_static("from_text", [](const std::string &t, int nq) { return PauliSum::from_text(t, nq); })
        .def("__add__", [](const PauliSum &a, const PauliSum &b) { return a + b; })
        .def("__sub__", [](const PauliSum &a, const PauliSum &b) { return a - b; })
        .def("__mul__", [](const PauliSum &a, double s) { return a * s; })
        .def("one_norm", &PauliSum::one_norm, py::arg("include_identity") = false);
    m.def("multiply", &multiply);
    m.def("commutator", &commutator, "C with [a, b] = iC");

    py::class_<MolecularSystem>(m, "MolecularSystem")
        .def_property_readonly("name", [](const MolecularSystem &s) { return s.lattice.name(); })
        .def_property_readonly("n_sites", &MolecularSystem::n_sites)
        .def_property_readonly("kinetic", [](const MolecularSystem &s) { return s.jw.kinetic; })
        .def_property_readonly("potential", [](const MolecularSystem &s) { return s.jw.potential; })
        .def_property_readonly("shifted_potential", [](const MolecularSystem &s) { return s.shifted_potential; })
        .def_property_readonly("shift", [](const MolecularSystem &s) { return std::pair{s.shift.c1, s.shift.c2}; })
        .def_property_readonly("hopping_matrix", [](const MolecularSystem &s) { return s.fermion.hopping_matrix(); })
        .def_property_readonly("pair_matrix", [](const MolecularSystem &s) { return s.fermion.pair; })
        .def("hamiltonian", &MolecularSystem::hamiltonian)
        .def("to_json", [](const MolecularSystem &s, bool terms) { return dumps(hamiltonian_json(s, terms)); },
             py::arg("include_terms") = false);
    m.def("build_system", &system_of, py::arg("family"), py::arg("n"), py::arg("params") = PppParams{},
          py::arg("layout") = "interleaved");

    m.def(
        "nested_commutators",
        [](const MolecularSystem &s) {
            auto nc = nested_commutators(s.jw.kinetic, s.jw.potential);
            return std::pair{nc.vtv, nc.vtt};
        },
        "([[V,T],V], [[V,T],T])");
    m.def(
        "frobenius_sampled",
        [](const PauliSum &op, int n_sites, int n_up, int n_down, int64_t samples, uint64_t seed, int jobs) {
            py::gil_scoped_release release;
            auto e = frobenius_sampled(op, SectorSpec{n_sites, n_up, n_down}, samples, seed, jobs);
            return std::pair{e.value, e.standard_error};
        },
        py::arg("op"), py::arg("n_sites"), py::arg("n_up"), py::arg("n_down"), py::arg("samples"), py::arg("seed"),
        py::arg("jobs") = 1);
    m.def(
        "spectral_norm_bound",
        [](const PauliSum &op, int n_sites, int n_up, int n_down, double tol) {
            py::gil_scoped_release release;
            SectorBasis b(SectorSpec{n_sites, n_up, n_down});
            return spectral_norm_bound(op, b, tol).value;
        },
        py::arg("op"), py::arg("n_sites"), py::arg("n_up"), py::arg("n_down"), py::arg("tol") = 1e-6);

    m.def(
        "kinetic_constants",
        [](const std::string &family, int n, std::vector<double> grid, int64_t samples, uint64_t seed) {
            auto lat = build_lattice(parse_family(family), n);
            auto spec = TilingSpec::load(default_tiling_path(lat.family, n));
            auto ks = tile_sections(lat, spec);
            int nu = (lat.site_count() + 1) / 2, nd = lat.site_count() / 2;
            auto w = worst_case_kinetic(ks, grid, nu, nd);
            auto a = average_case_kinetic(ks, grid, nu, nd, samples, seed);
            auto g = kinetic_gate_count(spec);
            py::dict d;
            d["worst"] = w.constant.value;
            d["average"] = a.constant.value;
            d["average_se"] = a.constant.standard_error;
            d["rotations"] = g.rotations;
            d["t_gates"] = g.t_gates;
            return d;
        },
        py::arg("family"), py::arg("n"), py::arg("t_grid") = default_t_grid(), py::arg("samples") = 10000,
        py::arg("seed") = 42);

    m.def(
        "low_lying",
        [](const MolecularSystem &s, int k) {
            py::gil_scoped_release release;
            SectorBasis b(SectorSpec::half_filling(s.n_sites(), s.layout));
            std::vector<std::pair<std::string, double>> out;
            for (auto &st : low_lying_states(s.hamiltonian(), b, k)) out.push_back({st.label, st.energy});
            return out;
        },
        "Labelled lowest energies at half filling", py::arg("system"), py::arg("k") = 4);

    m.def(
        "effective_spectrum",
        [](const MolecularSystem &s, double t, const std::string &scheme) {
            SectorBasis b(SectorSpec::half_filling(s.n_sites(), s.layout));
            TrotterScheme sch;
            if (scheme == "so") {
                sch = so_scheme(s.jw.kinetic, s.jw.potential, t);
            } else {
                auto ks = tile_sections(s.lattice, TilingSpec::load(default_tiling_path(s.lattice.family, s.lattice.size_n)));
                sch = tile_scheme(kinetic_section_operators(s.fermion, ks, s.layout), s.jw.potential, t);
            }
            auto eff = effective_hamiltonian_dense(sch, b);
            Eigen::MatrixXd h = SectorOperator(s.hamiltonian(), b).dense();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
            auto pairs = pair_eigenstates(es.eigenvalues(), es.eigenvectors().cast<cplx>(), eff.vectors);
            Eigen::VectorXd exact(pairs.size()), effective(pairs.size());
            for (size_t i = 0; i < pairs.size(); i++) {
                exact[i] = es.eigenvalues()[pairs[i].exact];
                effective[i] = eff.energies[pairs[i].effective];
            }
            return std::pair{exact, effective};
        },
        "Matched (E, E~) over the half-filling sector (dense; small molecules only)", py::arg("system"), py::arg("t"),
        py::arg("scheme") = "so");

    m.def(
        "extract_energy",
        [](const std::vector<cplx> &g, double t, double a, double prior) {
            TimeSeries s;
            s.g = g;
            s.t = t;
            return extract_energy(s, FilterSpec::gaussian(a), prior).energy;
        },
        "Energy from g_k = <psi|U^k|psi>", py::arg("g"), py::arg("t"), py::arg("a"), py::arg("prior"));
    m.def("unwrap_energy", &unwrap_energy);
    m.def("pearson", &pearson);

    m.def(
        "cost",
        [](int64_t n_rotations, int64_t n_t, int n_sites, const std::string &mode, double t, double g, double epsilon,
           double x) {
            CostParams p;
            p.n_rotations = n_rotations;
            p.n_t = n_t;
            p.n_sites = n_sites;
            p.epsilon = epsilon;
            p.x = x;
            if (mode == "fixed-error") {
                p.mode = CostMode::fixed_error;
                p.g = g;
            } else {
                p.mode = CostMode::fixed_timestep;
                p.t = t;
                p.gap = mode == "gap";
                if (mode != "gap" && mode != "energy") throw std::invalid_argument("mode: gap | energy | fixed-error");
            }
            return dumps(cost_json(total_cost(p)));
        },
        py::arg("n_rotations"), py::arg("n_t"), py::arg("n_sites"), py::arg("mode") = "gap", py::arg("t") = 0.1,
        py::arg("g") = 0.0, py::arg("epsilon") = 0.04354, py::arg("x") = 0.02);
    m.def("steps_fixed_timestep", &steps_fixed_timestep);
    m.def("steps_fixed_error", &steps_fixed_error);
}
