#include "trotterlab/freefermion.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace trotterlab {

using json = nlohmann::json;
using cplx = std::complex<double>;

TilingSpec TilingSpec::parse(const std::string &json_text) {
    json j = json::parse(json_text);
    TilingSpec spec;
    spec.family = parse_family(j.at("family").get<std::string>());
    spec.size = j.at("size").get<int>();
    for (const auto &js : j.at("sections")) {
        TilingSection sec;
        sec.name = js.value("name", "");
        for (const auto &jt : js.at("tiles")) {
            Tile t;
            t.shape = jt.at("shape").get<std::string>();
            t.sites = jt.value("sites", std::vector<int>{});
            for (const auto &b : jt.at("bonds")) t.bonds.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
            t.rotations = jt.value("rotations", 0);
            t.t_gates = jt.value("t_gates", 0);
            sec.tiles.push_back(std::move(t));
        }
        spec.sections.push_back(std::move(sec));
    }
    if (spec.sections.empty()) throw std::invalid_argument("tiling has no sections");
    return spec;
}

TilingSpec TilingSpec::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tiling file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string TilingSpec::to_json() const {
    json j;
    j["family"] = family_name(family);
    j["size"] = size;
    j["sections"] = json::array();
    for (const auto &sec : sections) {
        json js{{"name", sec.name}, {"tiles", json::array()}};
        for (const auto &t : sec.tiles) {
            json bonds = json::array();
            for (auto [a, b] : t.bonds) bonds.push_back({a, b});
            js["tiles"].push_back(
                {{"shape", t.shape}, {"sites", t.sites}, {"bonds", bonds}, {"rotations", t.rotations}, {"t_gates", t.t_gates}});
        }
        j["sections"].push_back(js);
    }
    return j.dump(1);
}

TilingSpec TilingSpec::single_section(const Lattice &lat) {
    TilingSpec spec;
    spec.family = lat.family;
    spec.size = lat.size_n;
    Tile t;
    t.shape = "all";
    t.bonds = lat.bonds;
    for (int i = 0; i < lat.site_count(); i++) t.sites.push_back(i);
    spec.sections.push_back({"all", {t}});
    return spec;
}

std::string data_dir() {
    if (const char *env = std::getenv("TROTTERLAB_DATA")) return env;
    return TROTTERLAB_DATA_DIR;
}

std::string default_tiling_path(Family f, int n) {
    return data_dir() + "/tilings/" + family_name(f) + std::to_string(n) + ".json";
}

KineticGateCount kinetic_gate_count(const TilingSpec &spec) {
    KineticGateCount c;
    const int s_count = static_cast<int>(spec.sections.size());
    for (int s = 0; s < s_count; s++) {
        int mult = s + 1 < s_count ? 2 : 1;
        for (const auto &t : spec.sections[s].tiles) {
            c.rotations += int64_t(2) * mult * t.rotations;
            c.t_gates += int64_t(2) * mult * t.t_gates;
        }
    }
    return c;
}

KineticSections tile_sections(const Lattice &lat, const TilingSpec &spec, double tau) {
    const int n = lat.site_count();
    std::set<std::pair<int, int>> remaining(lat.bonds.begin(), lat.bonds.end());
    KineticSections ks;
    ks.n_modes = n;
    ks.full = Eigen::MatrixXd::Zero(n, n);
    for (const auto &sec : spec.sections) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        std::vector<std::pair<int, int>> bonds;
        for (const auto &t : sec.tiles) {
            for (auto [i, j] : t.bonds) {
                std::pair<int, int> key{std::min(i, j), std::max(i, j)};
                if (i < 0 || j < 0 || i >= n || j >= n || !std::binary_search(lat.bonds.begin(), lat.bonds.end(), key))
                    throw std::invalid_argument("tiling bond (" + std::to_string(i) + "," + std::to_string(j) +
                                                ") is not a lattice bond");
                if (!remaining.erase(key))
                    throw std::invalid_argument("tiling bond (" + std::to_string(i) + "," + std::to_string(j) +
                                                ") appears twice");
                a(i, j) = a(j, i) = tau;
                bonds.push_back(key);
            }
        }
        ks.full += a;
        ks.names.push_back(sec.name);
        ks.sections.push_back(std::move(a));
        ks.bonds.push_back(std::move(bonds));
    }
    if (!remaining.empty()) {
        auto [i, j] = *remaining.begin();
        throw std::invalid_argument("tiling misses " + std::to_string(remaining.size()) + " bond(s), first (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    }
    return ks;
}

namespace {

Eigen::MatrixXcd expi_sym(const Eigen::MatrixXd &a, double s) {
    // e^{i s a} for real symmetric a
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXcd ph(a.rows());
    for (int k = 0; k < a.rows(); k++) ph[k] = std::polar(1.0, s * es.eigenvalues()[k]);
    Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
    return v * ph.asDiagonal() * v.transpose();
}

}  // namespace

Eigen::MatrixXcd section_product(const KineticSections &ks, double t) {
    const int n = ks.n_modes;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    std::vector<Eigen::MatrixXcd> half;
    for (const auto &a : ks.sections) half.push_back(expi_sym(a, -t / 2));
    for (int s = 0; s < ks.count(); s++) u = u * half[s];
    for (int s = ks.count() - 1; s >= 0; s--) u = u * half[s];
    return u;
}

EffectiveKinetic effective_kinetic(const KineticSections &ks, double t) {
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    Eigen::MatrixXcd m = expi_sym(ks.full, t) * section_product(ks, t);
    // m is unitary (normal), so its Schur form is diagonal up to round-off
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m);
    const auto &tri = schur.matrixT();
    const auto &q = schur.matrixU();
    const int n = ks.n_modes;
    Eigen::VectorXd lam(n);
    for (int k = 0; k < n; k++) {
        double ph = std::arg(tri(k, k));
        if (std::abs(ph) >= M_PI - 1e-6) throw std::domain_error("eigenphase at the log branch cut; reduce t");
        lam[k] = -ph / t;
    }
    EffectiveKinetic out;
    out.t = t;
    out.matrix = q * lam.cast<cplx>().asDiagonal() * q.adjoint();
    // departure from normality of the product, i.e. how far log(m) is from Hermitian
    out.hermiticity_error = tri.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff();
    out.modes = lam;
    std::sort(out.modes.data(), out.modes.data() + n, std::greater<double>());
    return out;
}

std::pair<double, double> filled_mode_range(const Eigen::VectorXd &modes, int n) {
    std::vector<double> v(modes.data(), modes.data() + modes.size());
    std::sort(v.begin(), v.end());
    n = std::clamp(n, 0, static_cast<int>(v.size()));
    double lo = 0, hi = 0;
    for (int k = 0; k < n; k++) {
        lo += v[k];
        hi += v[v.size() - 1 - k];
    }
    return {lo, hi};
}

double filled_mode_norm(const Eigen::VectorXd &modes, int n) {
    auto [lo, hi] = filled_mode_range(modes, n);
    return std::max(std::abs(lo), std::abs(hi));
}

std::vector<double> default_t_grid() { return {0.01, 0.03, 0.05}; }

namespace {

// Least squares v = W t^3 through the origin, standard errors propagated.
void fit_cubic(KineticConstant &kc) {
    double num = 0, den = 0, var = 0, ss = 0, ssr = 0;
    for (const auto &p : kc.points) {
        double t3 = p.t * p.t * p.t;
        num += p.value * t3;
        den += t3 * t3;
        var += t3 * t3 * p.standard_error * p.standard_error;
    }
    double w = num / den;
    for (const auto &p : kc.points) {
        double r = p.value - w * p.t * p.t * p.t;
        ssr += r * r;
        ss += p.value * p.value;
    }
    kc.constant.value = w;
    kc.constant.standard_error = std::sqrt(var) / den;
    kc.fit_r2 = ss > 0 ? 1 - ssr / ss : 1;
}

std::vector<double> check_grid(const std::vector<double> &g) {
    if (g.empty()) throw std::invalid_argument("empty t grid");
    for (double t : g)
        if (!(t > 0)) throw std::invalid_argument("t grid values must be positive");
    return g;
}

}  // namespace

KineticConstant worst_case_kinetic(const KineticSections &ks, const std::vector<double> &t_grid, int n_up, int n_down) {
    KineticConstant kc;
    kc.constant.kind = ConstantKind::worst;
    kc.constant.scheme = Scheme::tile;
    for (double t : check_grid(t_grid)) {
        auto eff = effective_kinetic(ks, t);
        // both spins fill the same side of the mode spectrum at the extremes
        auto [lu, hu] = filled_mode_range(eff.modes, n_up);
        auto [ld, hd] = filled_mode_range(eff.modes, n_down);
        double norm = std::max(std::abs(lu + ld), std::abs(hu + hd));
        kc.points.push_back({t, 2 * std::abs(std::sin(norm * t / 2))});
    }
    fit_cubic(kc);
    return kc;
}

KineticConstant average_case_kinetic(const KineticSections &ks, const std::vector<double> &t_grid, int n_up,
                                     int n_down, int64_t samples, uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    const int n = ks.n_modes;
    KineticConstant kc;
    kc.constant.kind = ConstantKind::average;
    kc.constant.scheme = Scheme::tile;
    for (double t : check_grid(t_grid)) {
        auto eff = effective_kinetic(ks, t);
        std::vector<int> perm(n);
        // q = |1 - e^{i phi}|^2 = 4 sin^2(phi/2), accurate for tiny phases
        double mean = 0, m2 = 0;
        for (int64_t k = 0; k < samples; k++) {
            std::mt19937_64 rng(stream_seed(seed, static_cast<uint64_t>(k)));
            double phi = 0;
            for (int spin_n : {n_up, n_down}) {
                for (int i = 0; i < n; i++) perm[i] = i;
                for (int i = 0; i < spin_n; i++) {
                    std::uniform_int_distribution<int> pick(i, n - 1);
                    std::swap(perm[i], perm[pick(rng)]);
                    phi += eff.modes[perm[i]];
                }
            }
            double s = std::sin(phi * t / 2);
            double q = 4 * s * s;
            double d = q - mean;
            mean += d / (k + 1);
            m2 += d * (q - mean);
        }
        double var = m2 / (samples - 1);
        double value = std::sqrt(mean);
        double se = value > 0 ? std::sqrt(var / samples) / (2 * value) : 0;
        kc.points.push_back({t, value, se});
    }
    fit_cubic(kc);
    kc.constant.components = {{"samples", double(samples)}};
    return kc;
}

namespace {

// e_k(z) for k = 0..kmax
std::vector<cplx> elementary_symmetric(const std::vector<cplx> &z, int kmax) {
    std::vector<cplx> e(kmax + 1, 0.0);
    e[0] = 1;
    for (const auto &zi : z)
        for (int k = kmax; k >= 1; k--) e[k] += e[k - 1] * zi;
    return e;
}

double binom(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

}  // namespace

KineticConstant average_case_kinetic_exact(const KineticSections &ks, const std::vector<double> &t_grid, int n_up,
                                           int n_down) {
    const int n = ks.n_modes;
    KineticConstant kc;
    kc.constant.kind = ConstantKind::average;
    kc.constant.scheme = Scheme::tile;
    for (double t : check_grid(t_grid)) {
        auto eff = effective_kinetic(ks, t);
        // Tr e^{i phi}/d = e_{nu}(z) e_{nd}(z) / (C(n,nu) C(n,nd)). Loses digits
        // when the phases are tiny; meant for checks at larger t.
        std::vector<cplx> z(n);
        for (int j = 0; j < n; j++) z[j] = std::polar(1.0, eff.modes[j] * t);
        auto e = elementary_symmetric(z, std::max(n_up, n_down));
        cplx tr = e[n_up] / binom(n, n_up) * e[n_down] / binom(n, n_down);
        double value = std::sqrt(std::max(0.0, 2 - 2 * tr.real()));
        kc.points.push_back({t, value, 0});
    }
    fit_cubic(kc);
    return kc;
}

}  // namespace trotterlab
