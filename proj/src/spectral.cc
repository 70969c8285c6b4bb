#include "trotterlab/spectral.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace trotterlab {

namespace {

constexpr double kTwoPi = 2 * M_PI;

}  // namespace

std::vector<double> TrotterScheme::durations_per_op() const {
    std::vector<double> d(ops.size(), 0.0);
    for (const auto &f : chain) d[f.op] += f.duration;
    return d;
}

bool TrotterScheme::palindromic() const {
    for (size_t i = 0, j = chain.size(); i < j--; i++)
        if (chain[i].op != chain[j].op || std::abs(chain[i].duration - chain[j].duration) > 1e-15 * std::abs(t))
            return false;
    return true;
}

std::string TrotterScheme::describe() const {
    std::ostringstream os;
    os << scheme_name(kind) << " t=" << t << " [";
    for (size_t i = 0; i < chain.size(); i++) os << (i ? " " : "") << names[chain[i].op] << ":" << chain[i].duration;
    os << "]";
    return os.str();
}

TrotterScheme so_scheme(const PauliSum &kinetic, const PauliSum &potential, double t) {
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    TrotterScheme s;
    s.kind = Scheme::so;
    s.t = t;
    s.ops = {potential, kinetic};
    s.names = {"V", "T"};
    s.chain = {{0, t / 2}, {1, t}, {0, t / 2}};
    return s;
}

TrotterScheme tile_scheme(const std::vector<PauliSum> &sections, const PauliSum &potential, double t) {
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    if (sections.empty()) throw std::invalid_argument("tile scheme needs at least one section");
    TrotterScheme s;
    s.kind = Scheme::tile;
    s.t = t;
    s.ops.push_back(potential);
    s.names.push_back("V");
    for (size_t i = 0; i < sections.size(); i++) {
        s.ops.push_back(sections[i]);
        s.names.push_back("T" + std::to_string(i + 1));
    }
    const int n = static_cast<int>(sections.size());
    s.chain.push_back({0, t / 2});
    for (int i = 1; i < n; i++) s.chain.push_back({i, t / 2});
    s.chain.push_back({n, t});
    for (int i = n - 1; i >= 1; i--) s.chain.push_back({i, t / 2});
    s.chain.push_back({0, t / 2});
    return s;
}

std::vector<PauliSum> kinetic_section_operators(const FermionHamiltonian &h, const KineticSections &ks,
                                                SpinLayout layout) {
    std::vector<PauliSum> out;
    for (const auto &bonds : ks.bonds) {
        FermionHamiltonian part;
        part.site_count = h.site_count;
        part.onsite = Eigen::VectorXd::Zero(h.site_count);
        part.pair = Eigen::MatrixXd::Zero(h.site_count, h.site_count);
        for (const auto &hop : h.kinetic) {
            std::pair<int, int> key{std::min(hop.i, hop.j), std::max(hop.i, hop.j)};
            if (std::find(bonds.begin(), bonds.end(), key) != bonds.end()) part.kinetic.push_back(hop);
        }
        out.push_back(jordan_wigner(part, layout).kinetic);
    }
    return out;
}

Propagator make_propagator(const TrotterScheme &scheme, const SectorBasis &basis, double krylov_tol) {
    std::vector<SparseRowMatrix> ops;
    std::vector<bool> diag;
    for (const auto &op : scheme.ops) {
        SectorOperator so(op, basis);
        ops.push_back(so.sparse());
        diag.push_back(so.is_diagonal());
    }
    return Propagator(std::move(ops), std::move(diag), scheme.chain, krylov_tol);
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd dense_unitary(const TrotterScheme &scheme, const SectorBasis &basis) {
    const int64_t d = basis.dimension();
    if (d > 20000) throw std::invalid_argument("sector too large for the dense route");
    std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> eig(scheme.ops.size());
    std::vector<RealVector> diag(scheme.ops.size());
    std::vector<bool> is_diag(scheme.ops.size());
    for (size_t i = 0; i < scheme.ops.size(); i++) {
        SectorOperator so(scheme.ops[i], basis);
        is_diag[i] = so.is_diagonal();
        if (is_diag[i])
            diag[i] = so.diagonal();
        else
            eig[i].compute(so.dense());
    }
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
    for (const auto &f : scheme.chain) {
        if (is_diag[f.op]) {
            for (int64_t r = 0; r < d; r++) u.col(r) *= std::polar(1.0, -diag[f.op][r] * f.duration);
        } else {
            const auto &es = eig[f.op];
            Eigen::VectorXcd ph(d);
            for (int64_t k = 0; k < d; k++) ph[k] = std::polar(1.0, -es.eigenvalues()[k] * f.duration);
            Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
            u = (u * v) * ph.asDiagonal() * v.transpose();
        }
    }
    return u;
}

EffectiveSpectrum effective_hamiltonian_dense(const TrotterScheme &scheme, const SectorBasis &basis) {
    const int64_t d = basis.dimension();
    if (d > 5000) throw std::invalid_argument("dense effective Hamiltonian limited to dimension 5000");
    // extremal energies of H for the centering shift
    PauliSum full;
    for (const auto &op : scheme.ops) full += op;
    Eigen::MatrixXd h = SectorOperator(full, basis).dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hs(h, Eigen::EigenvaluesOnly);
    const double shift = -(hs.eigenvalues()[0] + hs.eigenvalues()[d - 1]) / 2;

    Eigen::MatrixXcd u = dense_unitary(scheme, basis) * std::polar(1.0, -shift * scheme.t);
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
    const auto &tri = schur.matrixT();
    std::vector<std::pair<double, int64_t>> e(d);
    for (int64_t k = 0; k < d; k++) {
        double ph = std::arg(tri(k, k));
        if (std::abs(ph) >= M_PI - 1e-6) throw std::domain_error("eigenphase at the log branch cut; reduce t");
        e[k] = {-ph / scheme.t - shift, k};
    }
    std::sort(e.begin(), e.end());
    EffectiveSpectrum out;
    out.t = scheme.t;
    out.shift = shift;
    out.energies.resize(d);
    out.vectors.resize(d, d);
    for (int64_t k = 0; k < d; k++) {
        out.energies[k] = e[k].first;
        out.vectors.col(k) = schur.matrixU().col(e[k].second);
    }
    return out;
}

std::vector<Match> pair_eigenstates(const RealVector &h_values, const Eigen::MatrixXcd &h_vectors,
                                    const Eigen::MatrixXcd &tilde_vectors, double degeneracy_tol) {
    const int n = static_cast<int>(h_values.size());
    const int m = static_cast<int>(tilde_vectors.cols());
    // degenerate blocks of H (values assumed ascending)
    std::vector<int> block(n);
    int b = 0;
    for (int i = 0; i < n; i++) {
        if (i > 0 && std::abs(h_values[i] - h_values[i - 1]) > degeneracy_tol * std::max(1.0, std::abs(h_values[i]))) b++;
        block[i] = b;
    }
    Eigen::MatrixXd ov = (h_vectors.adjoint() * tilde_vectors).cwiseAbs2();
    Eigen::MatrixXd bw = Eigen::MatrixXd::Zero(b + 1, m);
    for (int i = 0; i < n; i++) bw.row(block[i]) += ov.row(i);

    std::vector<std::tuple<double, double, int, int>> cand;
    cand.reserve(size_t(n) * m);
    for (int i = 0; i < n; i++)
        for (int j = 0; j < m; j++)
            if (bw(block[i], j) > 1e-6) cand.emplace_back(-bw(block[i], j), -ov(i, j), i, j);
    std::sort(cand.begin(), cand.end());
    std::vector<bool> used_h(n, false), used_t(m, false);
    std::vector<Match> out;
    for (const auto &[w, o, i, j] : cand) {
        if (used_h[i] || used_t[j]) continue;
        used_h[i] = used_t[j] = true;
        out.push_back({i, j, -w, -w < 0.9});
    }
    // leftovers (negligible overlaps) are paired in order and flagged
    int jj = 0;
    for (int i = 0; i < n; i++) {
        if (used_h[i]) continue;
        while (jj < m && used_t[jj]) jj++;
        if (jj == m) break;
        used_t[jj] = true;
        out.push_back({i, jj, bw(block[i], jj), true});
    }
    std::sort(out.begin(), out.end(), [](const Match &a, const Match &b) { return a.exact < b.exact; });
    return out;
}

// ---------------------------------------------------------------------------

void TimeSeries::write_csv(const std::string &path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# t=" << std::setprecision(17) << t << " state=" << state << " scheme=" << scheme << "\n";
    out << "k,re,im\n";
    for (size_t k = 0; k < g.size(); k++) out << k << "," << g[k].real() << "," << g[k].imag() << "\n";
}

TimeSeries TimeSeries::read_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    TimeSeries s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream is(line.substr(1));
            std::string tok;
            while (is >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "t") s.t = std::stod(val);
                else if (key == "state") s.state = val;
                else if (key == "scheme") s.scheme = val;
            }
            continue;
        }
        if (line.rfind("k,", 0) == 0) continue;
        std::istringstream is(line);
        std::string a, b, c;
        std::getline(is, a, ',');
        std::getline(is, b, ',');
        std::getline(is, c, ',');
        size_t k = std::stoul(a);
        if (k != s.g.size()) throw std::runtime_error("non-contiguous series in " + path);
        s.g.emplace_back(std::stod(b), std::stod(c));
    }
    return s;
}

TimeSeries compute_time_series(const Propagator &u, const SectorBasis &basis, const ComplexVector &psi, int n_steps,
                               double t, const std::string &checkpoint_stem, int every) {
    if (n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
    if (psi.size() != basis.dimension()) throw std::invalid_argument("state dimension does not match the sector");
    const double nrm = psi.norm();
    if (std::abs(nrm - 1) > 1e-8) throw std::invalid_argument("initial state must be normalized");
    TimeSeries s;
    s.t = t;
    ComplexVector cur = psi;
    const std::string csv = checkpoint_stem + ".csv", state = checkpoint_stem + ".state";
    if (!checkpoint_stem.empty() && std::filesystem::exists(csv) && std::filesystem::exists(state)) {
        auto saved = TimeSeries::read_csv(csv);
        SectorSpec spec;
        auto v = read_snapshot(state, &spec);
        if (v.size() == psi.size() && std::abs(saved.t - t) < 1e-15 && !saved.g.empty() &&
            std::abs(saved.g[0] - cplx(1, 0)) < 1e-12) {
            s.g = saved.g;
            cur = v;
        }
    }
    if (s.g.empty()) s.g.push_back(psi.squaredNorm());
    if (static_cast<int>(s.g.size()) > n_steps + 1) s.g.resize(n_steps + 1);
    for (int k = static_cast<int>(s.g.size()); k <= n_steps; k++) {
        u.apply(cur);
        s.g.push_back(psi.dot(cur));
        if (!checkpoint_stem.empty() && (k % every == 0 || k == n_steps)) {
            write_snapshot(state, basis.spec(), cur);
            s.write_csv(csv);
        }
    }
    return s;
}

FilterSpec FilterSpec::gaussian(double a, int order) {
    if (!(a > 0)) throw std::invalid_argument("filter width must be positive");
    FilterSpec f;
    f.a = a;
    f.order = order > 0 ? order : static_cast<int>(std::ceil(6 / a));
    f.coeffs.resize(f.order + 1);
    for (int k = 0; k <= f.order; k++) f.coeffs[k] = std::exp(-0.5 * k * k * a * a);
    return f;
}

double unwrap_energy(double phase, double t, double prior) {
    double e = -phase / t;
    double period = kTwoPi / t;
    return e + period * std::round((prior - e) / period);
}

Extraction extract_energy(const TimeSeries &series, const FilterSpec &filter, double prior_energy, int grid_points) {
    if (filter.order > series.steps())
        throw std::invalid_argument("filter order " + std::to_string(filter.order) + " exceeds series length " +
                                    std::to_string(series.steps()));
    const int n = filter.order;
    // C(x) = F_0 + 2 sum_k F_k (cos kx Re g_k - sin kx Im g_k); peaks at x = -E~ t
    auto c_of = [&](double x) {
        double s = filter.coeffs[0] * series.g[0].real();
        for (int k = 1; k <= n; k++) {
            cplx e = std::polar(1.0, k * x) * series.g[k];
            s += 2 * filter.coeffs[k] * e.real();
        }
        return s;
    };
    const double h = kTwoPi / grid_points;
    int best = 0;
    double cmax = -std::numeric_limits<double>::infinity(), cmin = std::numeric_limits<double>::infinity();
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; i++) {
        double x = -M_PI + (i + 1) * h;
        grid[i] = c_of(x);
        if (grid[i] > cmax) {
            cmax = grid[i];
            best = i;
        }
        cmin = std::min(cmin, grid[i]);
    }
    // golden-section search over the neighbouring cells
    double lo = -M_PI + best * h, hi = -M_PI + (best + 2) * h;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = c_of(x1), f2 = c_of(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15; it++) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = c_of(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = c_of(x1);
        }
    }
    Extraction ex;
    double x = 0.5 * (lo + hi);
    // g_k = sum w e^{-i k E t}, so C peaks at x = E t
    ex.phase = std::remainder(x, kTwoPi);
    ex.peak = std::max(f1, f2);
    ex.contrast = cmax > 0 ? (cmax - cmin) / cmax : 0;
    ex.flat = !(cmax > 0) || ex.contrast < 1e-3;
    ex.energy = unwrap_energy(-ex.phase, series.t, prior_energy);
    return ex;
}

// ---------------------------------------------------------------------------

UnitaryEigenpair unitary_eigenpair(const UnitaryApply &u, const ComplexVector &start, double t, double prior_energy,
                                   int krylov_dim, double tol, int max_restarts) {
    const int64_t d = start.size();
    const int m = static_cast<int>(std::min<int64_t>(krylov_dim, d));
    const ComplexVector ref = start.normalized();
    ComplexVector x = ref;
    UnitaryEigenpair best;
    for (int r = 0; r <= max_restarts; r++) {
        std::vector<ComplexVector> v{x};
        Eigen::MatrixXcd hm = Eigen::MatrixXcd::Zero(m + 1, m);
        int used = m;
        for (int j = 0; j < m; j++) {
            ComplexVector w = v[j];
            u(w);
            for (int pass = 0; pass < 2; pass++)
                for (int i = 0; i <= j; i++) {
                    cplx c = v[i].dot(w);
                    hm(i, j) += c;
                    w -= c * v[i];
                }
            double b = w.norm();
            hm(j + 1, j) = b;
            if (b < 1e-14) {
                used = j + 1;
                break;
            }
            v.push_back(w / b);
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(hm.topLeftCorner(used, used));
        Eigen::VectorXcd cref(used);
        for (int i = 0; i < used; i++) cref[i] = v[i].dot(ref);
        int pick = 0;
        double pick_ov = -1;
        for (int k = 0; k < used; k++) {
            Eigen::VectorXcd y = es.eigenvectors().col(k).normalized();
            double ov = std::norm(y.dot(cref));
            if (ov > pick_ov) {
                pick_ov = ov;
                pick = k;
            }
        }
        Eigen::VectorXcd y = es.eigenvectors().col(pick).normalized();
        ComplexVector nx = ComplexVector::Zero(d);
        for (int i = 0; i < used; i++) nx += y[i] * v[i];
        nx.normalize();
        best.mu = es.eigenvalues()[pick];
        best.restarts = r;
        // explicit residual
        ComplexVector ux = nx;
        u(ux);
        best.residual = (ux - best.mu * nx).norm();
        best.overlap2 = std::norm(ref.dot(nx));
        best.vector = nx;
        if (best.residual < tol) {
            best.converged = true;
            break;
        }
        x = nx;
    }
    best.energy = unwrap_energy(std::arg(best.mu), t, prior_energy);
    return best;
}

// ---------------------------------------------------------------------------

std::string multiplicity_letter(double spin) {
    static const char *letters[] = {"S", "D", "T", "Q", "P", "H"};
    int m = static_cast<int>(std::lround(2 * spin)) + 1;
    if (m >= 1 && m <= 6) return letters[m - 1];
    return "M" + std::to_string(m);
}

std::vector<LabeledState> low_lying_states(const PauliSum &h, const SectorBasis &basis, int k,
                                           const LanczosOptions &opt) {
    SectorOperator so(h, basis);
    auto pairs = lowest_eigenpairs(so.sparse(), k, opt);
    std::vector<LabeledState> out;
    for (auto &p : pairs) {
        double s2 = total_spin_expectation(basis, p.vector);
        double s = 0.5 * (std::sqrt(1 + 4 * std::max(0.0, s2)) - 1);
        out.push_back({"", p.value, s, std::move(p.vector)});
    }
    std::map<std::string, int> seen;
    std::string ground = out.empty() ? "" : multiplicity_letter(out[0].spin);
    for (auto &st : out) {
        std::string letter = multiplicity_letter(st.spin);
        auto it = seen.find(letter);
        int idx = it == seen.end() ? (letter == ground ? 0 : 1) : it->second + 1;
        seen[letter] = idx;
        st.label = letter + std::to_string(idx);
    }
    return out;
}

SpectrumReport error_constants(const std::vector<std::string> &labels, const std::vector<double> &exact,
                               const std::vector<double> &effective, double t,
                               const std::vector<std::pair<int, int>> &pairs) {
    if (labels.size() != exact.size() || exact.size() != effective.size())
        throw std::invalid_argument("label/energy length mismatch");
    SpectrumReport r;
    r.t = t;
    const double t2 = t * t;
    for (size_t i = 0; i < exact.size(); i++) {
        double err = effective[i] - exact[i];
        r.states.push_back({labels[i], exact[i], effective[i], err, std::abs(err) / t2, err / t2});
    }
    for (auto [a, b] : pairs) {
        PairRecord p;
        p.a = labels.at(a);
        p.b = labels.at(b);
        p.exact_gap = exact[b] - exact[a];
        p.effective_gap = effective[b] - effective[a];
        p.constant = std::abs(p.exact_gap - p.effective_gap) / t2;
        r.pairs.push_back(p);
    }
    return r;
}

double pearson(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson needs two equal-length samples");
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < x.size(); i++) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

double effective_energy(const TrotterScheme &scheme, const SectorBasis &basis, const ComplexVector &psi,
                        double prior, EffectiveMethod method, double filter_a) {
    switch (method) {
        case EffectiveMethod::dense: {
            auto es = effective_hamiltonian_dense(scheme, basis);
            Eigen::VectorXd ov = (es.vectors.adjoint() * psi).cwiseAbs2();
            Eigen::Index k;
            ov.maxCoeff(&k);
            return es.energies[k];
        }
        case EffectiveMethod::arnoldi: {
            Propagator u = make_propagator(scheme, basis);
            auto r = unitary_eigenpair([&u](ComplexVector &v) { u.apply(v); }, psi, scheme.t, prior);
            if (!r.converged)
                throw std::runtime_error("unitary eigenpair not converged, residual " + std::to_string(r.residual));
            return r.energy;
        }
        case EffectiveMethod::series: {
            Propagator u = make_propagator(scheme, basis);
            auto f = FilterSpec::gaussian(filter_a);
            auto s = compute_time_series(u, basis, psi.normalized(), f.order, scheme.t);
            auto ex = extract_energy(s, f, prior);
            if (ex.flat) throw std::runtime_error("flat filter response, no dominant pole");
            return ex.energy;
        }
    }
    return 0;
}

std::vector<SweepCell> gap_sweep(const std::function<TrotterScheme(double)> &scheme_at,
                                 const std::vector<SweepState> &states, const std::vector<std::pair<int, int>> &pairs,
                                 const std::vector<double> &t_list, double epsilon, EffectiveMethod method,
                                 double filter_a) {
    for (size_t i = 1; i < t_list.size(); i++)
        if (!(t_list[i] > t_list[i - 1])) throw std::invalid_argument("t list must be ascending");
    std::vector<std::string> labels;
    std::vector<double> exact;
    for (const auto &s : states) {
        labels.push_back(s.label);
        exact.push_back(s.energy);
    }
    std::vector<SweepCell> out;
    for (double t : t_list) {
        SweepCell cell;
        cell.t = t;
        try {
            if (!(t > 0)) throw std::invalid_argument("t must be positive");
            TrotterScheme sch = scheme_at(t);
            for (const auto &s : states)
                cell.effective.push_back(effective_energy(sch, *s.basis, s.vector, s.energy, method, filter_a));
            cell.report = error_constants(labels, exact, cell.effective, t, pairs);
            for (const auto &p : cell.report.pairs)
                cell.within_budget.push_back(std::abs(p.exact_gap - p.effective_gap) <= epsilon / 3);
        } catch (const std::exception &e) {
            cell.error = e.what();
        }
        out.push_back(std::move(cell));
    }
    return out;
}

}  // namespace trotterlab
