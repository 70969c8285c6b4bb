#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "cli_common.h"

using namespace trotterlab;

namespace cli {

std::string cache_dir() {
    const char *c = std::getenv("TROTTERLAB_CACHE");
    return c ? std::string(c) : std::string();
}

Json envelope(const std::string &command, const Json &config) {
    std::time_t now = std::time(nullptr);
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return {{"command", command}, {"version", version()}, {"config", config}, {"timestamp", ts}};
}

void emit(const Json &out, const std::string &path) {
    if (path.empty() || path == "-")
        std::cout << out.dump(2) << "\n";
    else
        write_text(path, out.dump(2) + "\n");
}

MolecularSystem resolve_system(const MoleculeArgs &m, const Options &o) {
    MolecularSystem sys;
    auto guard = [](const std::string &field, auto &&fn) {
        try {
            return fn();
        } catch (const ConfigError &) {
            throw;
        } catch (const std::exception &e) {
            throw ConfigError(field, e.what());
        }
    };
    PppParams p;
    p.tau = m.tau;
    p.u = m.u;
    p.alpha = m.alpha;
    guard("params", [&] {
        p.validate();
        return 0;
    });
    SpinLayout layout = guard("layout", [&] { return parse_layout(m.layout); });
    if (!m.ham.empty()) {
        Json j = guard("ham", [&] { return Json::parse(read_text(m.ham)); });
        sys = guard("ham", [&] { return system_from_json(j); });
        // explicit flags override the file
        if (o.given("layout") || o.given("tau") || o.given("u") || o.given("alpha")) {
            PppParams q = sys.params;
            if (o.given("tau")) q.tau = m.tau;
            if (o.given("u")) q.u = m.u;
            if (o.given("alpha")) q.alpha = m.alpha;
            bool off = sys.shift.c1 == 0 && sys.shift.c2 == 0;
            sys = build_system(sys.lattice.family, sys.lattice.size_n, q,
                               o.given("layout") ? layout : sys.layout);
            if (off) disable_shift(sys);
        }
    } else {
        Family f;
        int n = m.n;
        double bond = p.bond_length;
        if (!m.lattice.empty()) {
            Json j = guard("lattice", [&] { return Json::parse(read_text(m.lattice)); });
            if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("lattice.family", "missing");
            if (!j.contains("n") || !j["n"].is_number_integer()) throw ConfigError("lattice.n", "missing");
            f = guard("lattice.family", [&] { return parse_family(j["family"].get<std::string>()); });
            n = j["n"].get<int>();
            if (j.contains("bond_length")) bond = j["bond_length"].get<double>();
        } else {
            if (m.family.empty()) throw ConfigError("family", "missing (or give --lattice / --ham)");
            f = guard("family", [&] { return parse_family(m.family); });
        }
        if (n < 1) throw ConfigError("n", "must be a positive integer");
        p.bond_length = bond;
        sys = guard("n", [&] { return build_system(f, n, p, layout); });
    }
    if (o.given("shift") || m.ham.empty()) {
        if (m.shift == "none")
            disable_shift(sys);
        else if (m.shift != "auto")
            throw ConfigError("shift", "expected auto or none");
        else if (sys.shift.c1 == 0 && sys.shift.c2 == 0) {
            sys.shift = choose_shift(sys.jw.potential);
            sys.shifted_potential = apply_shift(sys.jw.potential, sys.shift);
        }
    }
    return sys;
}

// "half,sz0", "electrons=14,sz=1/2", "nup=7,ndown=6"
SectorSpec parse_sector(const std::string &text, int n_sites, SpinLayout layout) {
    int electrons = -1, sz2 = std::numeric_limits<int>::min(), nup = -1, ndown = -1;
    std::stringstream ss(text);
    std::string tok;
    auto number = [&](const std::string &v) {
        try {
            size_t used = 0;
            int x = std::stoi(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception &) {
            throw ConfigError("sector", "cannot parse '" + v + "'");
        }
    };
    auto half_int = [&](const std::string &v) {  // "1/2" -> 1, "1" -> 2
        auto slash = v.find('/');
        if (slash == std::string::npos) return 2 * number(v);
        if (v.substr(slash + 1) != "2") throw ConfigError("sector", "S_z must be integer or x/2");
        return number(v.substr(0, slash));
    };
    while (std::getline(ss, tok, ',')) {
        auto eq = tok.find('=');
        std::string key = eq == std::string::npos ? tok : tok.substr(0, eq);
        std::string val = eq == std::string::npos ? "" : tok.substr(eq + 1);
        if (key == "half")
            electrons = n_sites;
        else if (key == "electrons" || key == "ne")
            electrons = number(val);
        else if (key == "sz")
            sz2 = half_int(val);
        else if (key.rfind("sz", 0) == 0 && eq == std::string::npos)
            sz2 = half_int(key.substr(2));
        else if (key == "nup")
            nup = number(val);
        else if (key == "ndown")
            ndown = number(val);
        else
            throw ConfigError("sector", "unknown token '" + tok + "'");
    }
    try {
        if (nup >= 0 || ndown >= 0) {
            if (nup < 0 || ndown < 0) throw ConfigError("sector", "give both nup and ndown");
            SectorSpec s{n_sites, nup, ndown, layout};
            if (nup > n_sites || ndown > n_sites) throw ConfigError("sector", "occupation exceeds site count");
            return s;
        }
        if (electrons < 0) electrons = n_sites;
        if (sz2 == std::numeric_limits<int>::min()) sz2 = electrons % 2;
        return SectorSpec::from_electrons(n_sites, electrons, sz2, layout);
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError("sector", e.what());
    }
}

}  // namespace cli

namespace {

using cli::ConfigError;
using cli::Options;

struct Command {
    CLI::App *app;
    std::unique_ptr<Options> opts;
    std::function<Json()> run;  // returns the result fields
    std::string out;
    int jobs = 1;
};

std::vector<std::string> split(const std::string &s) {
    std::vector<std::string> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) v.push_back(tok);
    return v;
}

TilingSpec load_tiling(const std::string &path, const Lattice &lat) {
    std::string p = path.empty() ? default_tiling_path(lat.family, lat.size_n) : path;
    try {
        auto spec = TilingSpec::load(p);
        if (spec.family != lat.family || spec.size != lat.size_n)
            throw std::invalid_argument("tiling is for a different molecule");
        tile_sections(lat, spec);
        return spec;
    } catch (const std::exception &e) {
        throw ConfigError("tiling", p + ": " + e.what());
    }
}

std::string sanitize(std::string s) {
    for (auto &ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
    return s;
}

// Eigenvectors are cached as snapshots under TROTTERLAB_CACHE.
std::vector<LabeledState> cached_states(const MolecularSystem &sys, const SectorBasis &basis, int k) {
    const std::string dir = cli::cache_dir();
    std::string stem;
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        stem = dir + "/" + sanitize(sys.lattice.name() + "_" + basis.spec().describe() + "_" + params_json(sys.params).dump() +
                                    "_k" + std::to_string(k));
        std::ifstream idx(stem + ".json");
        if (idx) {
            Json j = Json::parse(idx);
            std::vector<LabeledState> out;
            for (size_t i = 0; i < j.size(); i++) {
                LabeledState s;
                s.label = j[i]["label"];
                s.energy = j[i]["energy"];
                s.spin = j[i]["spin"];
                s.vector = read_snapshot(stem + "_" + std::to_string(i) + ".state").real();
                out.push_back(std::move(s));
            }
            return out;
        }
    }
    auto st = low_lying_states(sys.hamiltonian(), basis, k);
    if (!stem.empty()) {
        Json j = Json::array();
        for (size_t i = 0; i < st.size(); i++) {
            write_snapshot(stem + "_" + std::to_string(i) + ".state", basis.spec(), st[i].vector.cast<cplx>());
            j.push_back({{"label", st[i].label}, {"energy", st[i].energy}, {"spin", st[i].spin}});
        }
        write_text(stem + ".json", j.dump());
    }
    return st;
}

void add_lattice(CLI::App &root, std::vector<std::unique_ptr<Command>> &cmds) {
    auto c = std::make_unique<Command>();
    c->app = root.add_subcommand("lattice", "Build a nanographene lattice");
    c->opts = std::make_unique<Options>(c->app);
    auto a = std::make_shared<std::tuple<std::string, int, double>>("", 0, 1.4);
    c->opts->add("family", std::get<0>(*a), "acene | rhombene | triangulene");
    c->opts->add("n", std::get<1>(*a), "size");
    c->opts->add("bond-length", std::get<2>(*a), "C-C bond length (Angstrom)");
    c->opts->add("out", c->out, "output path (default stdout)");
    c->run = [a] {
        Family f;
        try {
            f = parse_family(std::get<0>(*a));
        } catch (const std::exception &e) {
            throw ConfigError("family", e.what());
        }
        Lattice lat;
        try {
            lat = build_lattice(f, std::get<1>(*a), std::get<2>(*a));
        } catch (const std::exception &e) {
            throw ConfigError("n", e.what());
        }
        Json j = lattice_json(lat);
        Json d = Json::array();
        for (int i = 0; i < lat.site_count(); i++) {
            std::vector<double> row(lat.distances.row(i).data(), lat.distances.row(i).data() + lat.site_count());
            d.push_back(row);
        }
        j["distances"] = d;
        return j;
    };
    cmds.push_back(std::move(c));
}

void add_hamiltonian(CLI::App &root, std::vector<std::unique_ptr<Command>> &cmds) {
    auto c = std::make_unique<Command>();
    c->app = root.add_subcommand("hamiltonian", "PPP Hamiltonian, Jordan-Wigner image and symmetry shift");
    c->opts = std::make_unique<Options>(c->app);
    auto m = std::make_shared<cli::MoleculeArgs>();
    auto terms = std::make_shared<bool>(true);
    auto text = std::make_shared<std::string>();
    m->add_to(*c->opts);
    c->opts->add("terms", *terms, "include Pauli terms and coefficients (default true)");
    c->opts->add("pauli-text", *text, "also write T + V' in the one-term-per-line text format");
    c->opts->add("out", c->out, "output path (default stdout)");
    Options *o = c->opts.get();
    c->run = [m, terms, text, o] {
        auto sys = cli::resolve_system(*m, *o);
        if (!text->empty()) write_text(*text, (sys.jw.kinetic + sys.shifted_potential).to_text());
        return hamiltonian_json(sys, *terms);
    };
    cmds.push_back(std::move(c));
}

void add_norms(CLI::App &root, std::vector<std::unique_ptr<Command>> &cmds) {
    auto c = std::make_unique<Command>();
    c->app = root.add_subcommand("norms", "Nested-commutator norms and SO error constants");
    c->opts = std::make_unique<Options>(c->app);
    struct A {
        cli::MoleculeArgs m;
        std::string sector = "half";
        std::string kind = "average";
        int64_t samples = 10000;
        uint64_t seed = 42;
        bool exact = false;
        double tol = 1e-6;
        std::string tiling;
        std::vector<double> t_grid = default_t_grid();
    };
    auto a = std::make_shared<A>();
    a->m.add_to(*c->opts);
    c->opts->add("sector", a->sector, "sector: half,sz0 | electrons=K,sz=S | nup=a,ndown=b");
    c->opts->add("kind", a->kind, "worst | average");
    c->opts->add("samples", a->samples, "Frobenius samples (average)");
    c->opts->add("seed", a->seed, "sampling seed (average)");
    c->opts->flag("exact", a->exact, "enumerate the sector instead of sampling (average)");
    c->opts->add("tol", a->tol, "relative tolerance of the abs-matrix bound (worst)");
    c->opts->add("tiling", a->tiling, "also report the tile constant with this tiling (use 'default' for the shipped one)");
    c->opts->add("t-grid", a->t_grid, "time steps for the kinetic fit");
    c->opts->add("jobs", c->jobs, "worker threads");
    c->opts->add("out", c->out, "output path (default stdout)");
    Options *o = c->opts.get();
    Command *cmd = c.get();
    c->run = [a, o, cmd] {
        auto sys = cli::resolve_system(a->m, *o);
        auto spec = cli::parse_sector(a->sector, sys.n_sites(), sys.layout);
        if (a->kind != "worst" && a->kind != "average") throw ConfigError("kind", "expected worst or average");
        if (a->kind == "average" && !a->exact && a->samples < 2) throw ConfigError("samples", "need at least 2");
        auto nc = nested_commutators(sys.jw.kinetic, sys.shifted_potential);
        NormEstimate vtv, vtt;
        if (a->kind == "worst") {
            SectorBasis basis(spec);
            vtv = spectral_norm_bound(nc.vtv, basis, a->tol);
            vtt = spectral_norm_bound(nc.vtt, basis, a->tol);
        } else if (a->exact) {
            SectorBasis basis(spec);
            vtv = frobenius_exact(nc.vtv, basis);
            vtt = frobenius_exact(nc.vtt, basis);
        } else {
            vtv = frobenius_sampled(nc.vtv, spec, a->samples, a->seed, cmd->jobs);
            vtt = frobenius_sampled(nc.vtt, spec, a->samples, stream_seed(a->seed, ~uint64_t{0}), cmd->jobs);
        }
        auto so = a->kind == "worst" ? worst_case_constant(vtv, vtt) : average_case_constant(vtv, vtt);
        Json j{{"molecule", sys.lattice.name()},
               {"sector", spec.describe()},
               {"vtv", norm_json(vtv)},
               {"vtt", norm_json(vtt)},
               {"constant_so", constant_json(so)}};
        if (!a->tiling.empty()) {
            auto tl = load_tiling(a->tiling == "default" ? "" : a->tiling, sys.lattice);
            auto ks = tile_sections(sys.lattice, tl, sys.params.tau);
            auto kin = a->kind == "worst" ? worst_case_kinetic(ks, a->t_grid, spec.n_up, spec.n_down)
                                          : average_case_kinetic(ks, a->t_grid, spec.n_up, spec.n_down,
                                                                 std::max<int64_t>(a->samples, 2), a->seed);
            j["kinetic"] = kinetic_json(kin);
            if (a->kind == "worst") j["constant_tile"] = constant_json(tile_constant(so, kin.constant));
        }
        return j;
    };
    cmds.push_back(std::move(c));
}

void add_freefermion(CLI::App &root, std::vector<std::unique_ptr<Command>> &cmds) {
    auto c = std::make_unique<Command>();
    c->app = root.add_subcommand("freefermion", "Kinetic tile error constants W_T / A_T");
    c->opts = std::make_unique<Options>(c->app);
    struct A {
        cli::MoleculeArgs m;
        std::string tiling;
        std::string sector = "half";
        std::vector<double> t_grid = default_t_grid();
        std::string kind = "both";
        int64_t samples = 10000;
        uint64_t seed = 42;
        bool exact_average = false;
    };
    auto a = std::make_shared<A>();
    a->m.add_to(*c->opts);
    c->opts->add("tiling", a->tiling, "tiling spec JSON (default: shipped file for the molecule)");
    c->opts->add("sector", a->sector, "filling, as for norms");
    c->opts->add("t-grid", a->t_grid, "time steps for the t^3 fit");
    c->opts->add("kind", a->kind, "worst | average | both");
    c->opts->add("samples", a->samples, "samples for the average case");
    c->opts->add("seed", a->seed, "sampling seed");
    c->opts->flag("exact-average", a->exact_average, "exact normalized trace instead of sampling");
    c->opts->add("out", c->out, "output path (default stdout)");
    Options *o = c->opts.get();
    c->run = [a, o] {
        auto sys = cli::resolve_system(a->m, *o);
        auto spec = cli::parse_sector(a->sector, sys.n_sites(), sys.layout);
        auto tl = load_tiling(a->tiling, sys.lattice);
        auto ks = tile_sections(sys.lattice, tl, sys.params.tau);
        if (a->t_grid.size() < 2) throw ConfigError("t-grid", "need at least two time steps");
        for (double t : a->t_grid)
            if (!(t > 0)) throw ConfigError("t-grid", "time steps must be positive");
        if (a->kind != "worst" && a->kind != "average" && a->kind != "both")
            throw ConfigError("kind", "expected worst, average or both");
        auto g = kinetic_gate_count(tl);
        Json j{{"molecule", sys.lattice.name()},
               {"sections", ks.names},
               {"gates_per_step", {{"rotations", g.rotations}, {"t_gates", g.t_gates}}}};
        if (a->kind != "average") j["worst"] = kinetic_json(worst_case_kinetic(ks, a->t_grid, spec.n_up, spec.n_down));
        if (a->kind != "worst") {
            auto k = a->exact_average
                         ? average_case_kinetic_exact(ks, a->t_grid, spec.n_up, spec.n_down)
                         : average_case_kinetic(ks, a->t_grid, spec.n_up, spec.n_down, a->samples, a->seed);
            j["average"] = kinetic_json(k);
            if (!a->exact_average) j["average"]["seed"] = a->seed, j["average"]["samples"] = a->samples;
        }
        return j;
    };
    cmds.push_back(std::move(c));
}

void add_spectral(CLI::App &root, std::vector<std::unique_ptr<Command>> &cmds) {
    auto c = std::make_unique<Command>();
    c->app = root.add_subcommand("spectral", "Effective-Hamiltonian energies and gap errors");
    c->opts = std::make_unique<Options>(c->app);
    struct A {
        cli::MoleculeArgs m;
        std::string sector = "half";
        std::string scheme = "so";
        std::string tiling;
        std::vector<double> t{0.01};
        std::string states = "S0,T1,S1";
        std::string pairs;
        int n_states = 6;
        std::string method = "arnoldi";
        double filter_a = 0.01;
        double epsilon = 0.04354;
        std::string series_dir;
        bool wrapping = false;
    };
    auto a = std::make_shared<A>();
    a->m.add_to(*c->opts);
    c->opts->add("sector", a->sector, "sector, as for norms");
    c->opts->add("scheme", a->scheme, "so | tile");
    c->opts->add("tiling", a->tiling, "tiling spec for the tile scheme (default: shipped file)");
    c->opts->add("t", a->t, "time steps (eV^-1)");
    c->opts->add("states", a->states, "state labels, e.g. S0,S1,T1");
    c->opts->add("pairs", a->pairs, "gaps as A:B,... (default: first state with each other)");
    c->opts->add("n-states", a->n_states, "number of low-lying states to compute and label");
    c->opts->add("method", a->method, "arnoldi | series | dense");
    c->opts->add("filter-a", a->filter_a, "Gaussian filter width (series)");
    c->opts->add("epsilon", a->epsilon, "target accuracy (eV); gaps are checked against epsilon/3");
    c->opts->add("series-dir", a->series_dir, "write g_k as CSV (k, Re, Im) per state and t (series)");
    c->opts->flag("wrapping", a->wrapping, "report the phase-wrapping diagnosis per t");
    c->opts->add("out", c->out, "output path (default stdout)");
    Options *o = c->opts.get();
    c->run = [a, o] {
        auto sys = cli::resolve_system(a->m, *o);
        auto spec = cli::parse_sector(a->sector, sys.n_sites(), sys.layout);
        if (a->t.empty()) throw ConfigError("t", "need at least one time step");
        for (double t : a->t)
            if (!(t > 0)) throw ConfigError("t", "time steps must be positive");
        std::map<std::string, EffectiveMethod> methods{
            {"arnoldi", EffectiveMethod::arnoldi}, {"series", EffectiveMethod::series}, {"dense", EffectiveMethod::dense}};
        if (!methods.count(a->method)) throw ConfigError("method", "expected arnoldi, series or dense");
        if (a->scheme != "so" && a->scheme != "tile") throw ConfigError("scheme", "expected so or tile");
        if (!(a->filter_a > 0)) throw ConfigError("filter-a", "must be positive");
        auto labels = split(a->states);
        if (labels.empty()) throw ConfigError("states", "empty");
        if (a->n_states < 1) throw ConfigError("n-states", "must be positive");
        SectorBasis basis(spec);
        auto st = cached_states(sys, basis, a->n_states);
        std::vector<SweepState> chosen;
        Json states = Json::array();
        for (const auto &l : labels) {
            auto it = std::find_if(st.begin(), st.end(), [&](const LabeledState &s) { return s.label == l; });
            if (it == st.end())
                throw ConfigError("states", "label " + l + " not among the lowest " + std::to_string(a->n_states) +
                                                " states; raise --n-states");
            chosen.push_back({l, it->energy, it->vector.cast<cplx>(), &basis});
            states.push_back({{"label", l}, {"energy", it->energy}, {"spin", it->spin}});
        }
        std::vector<std::pair<int, int>> pairs;
        auto index_of = [&](const std::string &l) {
            for (size_t i = 0; i < labels.size(); i++)
                if (labels[i] == l) return static_cast<int>(i);
            throw ConfigError("pairs", "label " + l + " is not in --states");
        };
        if (a->pairs.empty()) {
            for (size_t i = 1; i < labels.size(); i++) pairs.push_back({0, static_cast<int>(i)});
        } else {
            for (const auto &p : split(a->pairs)) {
                auto colon = p.find(':');
                if (colon == std::string::npos) throw ConfigError("pairs", "expected A:B, got " + p);
                pairs.push_back({index_of(p.substr(0, colon)), index_of(p.substr(colon + 1))});
            }
        }
        std::vector<PauliSum> sections;
        if (a->scheme == "tile") {
            auto tl = load_tiling(a->tiling, sys.lattice);
            sections = kinetic_section_operators(sys.fermion, tile_sections(sys.lattice, tl, sys.params.tau), sys.layout);
        }
        // The shift is a constant on the sector, so it only moves every energy
        // (and the phase of U) by the same amount; use V to keep E comparable.
        auto scheme_at = [&](double t) {
            return a->scheme == "so" ? so_scheme(sys.jw.kinetic, sys.jw.potential, t)
                                     : tile_scheme(sections, sys.jw.potential, t);
        };
        std::vector<double> ts = a->t;
        std::sort(ts.begin(), ts.end());
        std::vector<SweepCell> cells;
        const std::string cache = cli::cache_dir();
        if (a->method == "series" && (!cache.empty() || !a->series_dir.empty())) {
            // series with checkpoints and CSV export, one cell at a time
            for (double t : ts) {
                SweepCell cell;
                cell.t = t;
                try {
                    auto sch = scheme_at(t);
                    auto prop = make_propagator(sch, basis);
                    auto f = FilterSpec::gaussian(a->filter_a);
                    std::vector<double> exact;
                    for (const auto &s : chosen) {
                        std::string tag = sanitize(sys.lattice.name() + "_" + a->scheme + "_" + s.label + "_t" +
                                                   std::to_string(t));
                        std::string stem;
                        if (!cache.empty()) {
                            std::filesystem::create_directories(cache);
                            stem = cache + "/" + tag;
                        }
                        auto ser = compute_time_series(prop, basis, s.vector, f.order, t, stem);
                        ser.state = s.label;
                        ser.scheme = a->scheme;
                        if (!a->series_dir.empty()) {
                            std::filesystem::create_directories(a->series_dir);
                            ser.write_csv(a->series_dir + "/" + tag + ".csv");
                        }
                        auto ex = extract_energy(ser, f, s.energy);
                        if (ex.flat) throw std::runtime_error("flat filter response for " + s.label);
                        cell.effective.push_back(ex.energy);
                        exact.push_back(s.energy);
                    }
                    cell.report = error_constants(labels, exact, cell.effective, t, pairs);
                    for (const auto &p : cell.report.pairs)
                        cell.within_budget.push_back(std::abs(p.exact_gap - p.effective_gap) <= a->epsilon / 3);
                } catch (const std::exception &e) {
                    cell.error = e.what();
                }
                cells.push_back(std::move(cell));
            }
        } else {
            cells = gap_sweep(scheme_at, chosen, pairs, ts, a->epsilon, methods[a->method], a->filter_a);
        }
        double emax = 0;
        if (a->wrapping) {
            SectorOperator h(sys.hamiltonian(), basis);
            bool conv = false;
            emax = largest_eigenvalue([&h](const double *x, double *y) { h.apply(x, y); }, basis.dimension(), 1e-8,
                                      2000, &conv);
        }
        Json sweep = Json::array();
        for (const auto &cell : cells) {
            Json j{{"t", cell.t}};
            if (!cell.error.empty()) {
                j["error"] = cell.error;
            } else {
                j["effective"] = cell.effective;
                j["report"] = spectrum_json(cell.report);
                j["within_budget"] = cell.within_budget;
            }
            if (a->wrapping) j["wrapping"] = wrapping_json(wrapping_check(st[0].energy, emax, cell.t, st[0].energy));
            sweep.push_back(j);
        }
        return Json{{"molecule", sys.lattice.name()},
                    {"sector", spec.describe()},
                    {"scheme", a->scheme},
                    {"method", a->method},
                    {"states", states},
                    {"epsilon", a->epsilon},
                    {"sweep", sweep}};
    };
    cmds.push_back(std::move(c));
}

void add_resources(CLI::App &root, std::vector<std::unique_ptr<Command>> &cmds) {
    auto c = std::make_unique<Command>();
    c->app = root.add_subcommand("resources", "QPE T-gate and Toffoli cost estimates");
    c->opts = std::make_unique<Options>(c->app);
    struct A {
        std::string per_step;
        std::string molecule;
        std::string mode = "gap";
        double t = 0.1;
        double g = 0;
        double epsilon = 0.04354;
        double x = 0.02;
        bool hwp = false;
        std::string hwp_model = "single";
        std::string tiling;
    };
    auto a = std::make_shared<A>();
    c->opts->add("per-step", a->per_step, "JSON with per-step counts (NR_V, NR_T, NT_T), a row or {rows: [...]}");
    c->opts->add("molecule", a->molecule, "molecule name, e.g. acene3 (selects a row, or computes the counts)");
    c->opts->add("mode", a->mode, "gap | energy | fixed-error");
    c->opts->add("t", a->t, "time step (eV^-1) for gap and energy modes");
    c->opts->add("g", a->g, "error constant (eV^3) for fixed-error mode");
    c->opts->add("epsilon", a->epsilon, "target accuracy (eV)");
    c->opts->add("x", a->x, "fraction of the budget for rotation synthesis");
    c->opts->flag("hwp", a->hwp, "apply Hamming-weight phasing");
    c->opts->add("hwp-model", a->hwp_model, "single | weight_bits");
    c->opts->add("tiling", a->tiling, "tiling spec for HWP (default: shipped file)");
    c->opts->add("out", c->out, "output path (default stdout)");
    c->run = [a] {
        Json row;
        if (!a->per_step.empty()) {
            Json j;
            try {
                j = Json::parse(read_text(a->per_step));
            } catch (const std::exception &e) {
                throw ConfigError("per-step", e.what());
            }
            if (j.contains("rows")) j = j["rows"];
            if (j.is_array()) {
                for (const auto &r : j)
                    if (r.value("molecule", "") == a->molecule) row = r;
                if (row.is_null()) throw ConfigError("molecule", "no row for '" + a->molecule + "' in " + a->per_step);
            } else {
                row = j;
            }
            for (const char *k : {"NR_V", "NR_T", "NT_T"})
                if (!row.contains(k) || !row[k].is_number_integer())
                    throw ConfigError(std::string("per-step.") + k, "missing or not an integer");
            if (a->molecule.empty()) a->molecule = row.value("molecule", "");
        }
        if (a->molecule.empty()) throw ConfigError("molecule", "missing");
        size_t cut = a->molecule.find_first_of("0123456789");
        if (cut == std::string::npos || cut == 0) throw ConfigError("molecule", "expected e.g. acene3");
        Family f;
        int n;
        try {
            f = parse_family(a->molecule.substr(0, cut));
            n = std::stoi(a->molecule.substr(cut));
        } catch (const std::exception &e) {
            throw ConfigError("molecule", e.what());
        }
        std::optional<MolecularSystem> sys;
        std::optional<TilingSpec> tl;
        auto need_system = [&] {
            if (!sys) {
                sys = build_system(f, n);
                tl = load_tiling(a->tiling, sys->lattice);
            }
        };
        if (row.is_null()) {
            need_system();
            auto g = kinetic_gate_count(*tl);
            row = {{"molecule", a->molecule},
                   {"NR_V", sys->shifted_potential.term_count()},
                   {"NR_T", g.rotations},
                   {"NT_T", g.t_gates}};
        }
        CostParams p;
        p.epsilon = a->epsilon;
        p.x = a->x;
        p.n_sites = expected_site_count(f, n);
        p.n_rotations = row["NR_V"].get<int64_t>() + row["NR_T"].get<int64_t>();
        p.n_t = row["NT_T"].get<int64_t>();
        if (a->mode == "gap" || a->mode == "energy") {
            p.mode = CostMode::fixed_timestep;
            p.t = a->t;
            p.gap = a->mode == "gap";
        } else if (a->mode == "fixed-error") {
            p.mode = CostMode::fixed_error;
            p.g = a->g;
        } else {
            throw ConfigError("mode", "expected gap, energy or fixed-error");
        }
        try {
            p.validate();
        } catch (const std::exception &e) {
            std::string msg = e.what();
            std::string field = msg.substr(0, msg.find(' '));
            throw ConfigError(field == "gate" ? "per-step" : field, msg);
        }
        Json j{{"molecule", a->molecule}, {"per_step", row}};
        if (a->hwp) {
            HwpModel model;
            if (a->hwp_model == "single")
                model = HwpModel::single;
            else if (a->hwp_model == "weight_bits")
                model = HwpModel::weight_bits;
            else
                throw ConfigError("hwp-model", "expected single or weight_bits");
            need_system();
            auto hb = hwp_breakdown(sys->shifted_potential, *tl, sys->n_sites(), model);
            j["report"] = cost_json(hwp_estimate(sys->shifted_potential, *tl, p, model));
            j["report"]["hwp"]["model"] = a->hwp_model;
            j["report"]["hwp"]["rotations_before"] = hb.rotations_before;
            j["report"]["hwp"]["potential_groups"] = hb.potential.size();
            j["baseline"] = cost_json(total_cost(p));
        } else {
            j["report"] = cost_json(total_cost(p));
        }
        return j;
    };
    cmds.push_back(std::move(c));
}

void add_reproduce(CLI::App &root, std::vector<std::unique_ptr<Command>> &cmds, bool &failed) {
    auto c = std::make_unique<Command>();
    c->app = root.add_subcommand("reproduce", "Compare computed values with the shipped reference values");
    c->opts = std::make_unique<Options>(c->app);
    auto a = std::make_shared<cli::ReproduceArgs>();
    c->app->add_option("target", a->target, "table1 | table2 | table3 | table4 | fig5 | fig7")->required();
    c->opts->flag("slow", a->slow, "include slow rows");
    c->opts->add("jobs", a->jobs, "worker threads");
    c->opts->add("samples", a->samples, "Frobenius samples (table2)");
    c->opts->add("seed", a->seed, "sampling seed (table2)");
    c->opts->add("molecule", a->molecule, "restrict to one molecule (table4)");
    c->opts->add("csv", a->csv, "also write the per-state data as CSV (fig5, fig7)");
    c->opts->add("gamma", a->gamma, "fig7: exponent of the worst-case constant power law in N");
    c->opts->add("anchor-w", a->anchor_w, "fig7: worst-case constant at the anchor size (eV^3)");
    c->opts->add("anchor-sites", a->anchor_sites, "fig7: site count of the anchor");
    c->opts->add("out", c->out, "output path (default stdout)");
    c->run = [a, &failed] {
        Json j = cli::reproduce(*a, failed);
        return j;
    };
    cmds.push_back(std::move(c));
}

Json error_record(const std::string &kind, const std::string &field, const std::string &msg) {
    Json e{{"kind", kind}, {"message", msg}};
    if (!field.empty()) e["field"] = field;
    return Json{{"error", e}, {"version", version()}};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App root{"trotterlab: Trotter error analysis and QPE costing for PPP nanographenes"};
    root.set_version_flag("--version", version());
    root.require_subcommand(1);
    bool failed = false;
    std::vector<std::unique_ptr<Command>> cmds;
    add_lattice(root, cmds);
    add_hamiltonian(root, cmds);
    add_norms(root, cmds);
    add_freefermion(root, cmds);
    add_spectral(root, cmds);
    add_resources(root, cmds);
    add_reproduce(root, cmds, failed);
    try {
        root.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return root.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return root.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return root.exit(e);
    } catch (const CLI::ParseError &e) {
        std::string msg = e.what();
        std::string field;
        auto pos = msg.find("--");
        if (pos != std::string::npos) field = msg.substr(pos + 2, msg.find_first_of(" :", pos) - pos - 2);
        std::cerr << error_record("usage", field, msg).dump(2) << "\n";
        return 2;
    }
    for (auto &c : cmds) {
        if (!c->app->parsed()) continue;
        Json result;
        try {
            c->opts->apply_config();
        } catch (const ConfigError &e) {
            std::cerr << error_record("config", e.field, e.what()).dump(2) << "\n";
            return 2;
        }
        try {
            result = c->run();
        } catch (const ConfigError &e) {
            std::cerr << error_record("config", e.field, e.what()).dump(2) << "\n";
            return 2;
        } catch (const std::exception &e) {
            std::cerr << error_record("runtime", "", e.what()).dump(2) << "\n";
            return 1;
        }
        Json out = cli::envelope(c->app->get_name(), c->opts->resolved());
        out.update(result);
        cli::emit(out, c->out);
        return failed ? 1 : 0;
    }
    return 2;
}
