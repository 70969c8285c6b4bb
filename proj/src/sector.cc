#include "trotterlab/sector.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace trotterlab {

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    double r = 1;
    for (int i = 1; i <= k; i++) r = r * (n - k + i) / i;
    return std::round(r);
}

uint64_t spread_bits(uint64_t v) {
    v &= 0xffffffffULL;
    v = (v | (v << 16)) & 0x0000ffff0000ffffULL;
    v = (v | (v << 8)) & 0x00ff00ff00ff00ffULL;
    v = (v | (v << 4)) & 0x0f0f0f0f0f0f0f0fULL;
    v = (v | (v << 2)) & 0x3333333333333333ULL;
    v = (v | (v << 1)) & 0x5555555555555555ULL;
    return v;
}

uint64_t compact_bits(uint64_t v) {
    v &= 0x5555555555555555ULL;
    v = (v | (v >> 1)) & 0x3333333333333333ULL;
    v = (v | (v >> 2)) & 0x0f0f0f0f0f0f0f0fULL;
    v = (v | (v >> 4)) & 0x00ff00ff00ff00ffULL;
    v = (v | (v >> 8)) & 0x0000ffff0000ffffULL;
    v = (v | (v >> 16)) & 0x00000000ffffffffULL;
    return v;
}

std::vector<uint64_t> patterns(int n, int k) {
    // increasing numeric order; n <= 32 here
    if (k == 0) return {0};
    std::vector<uint64_t> out;
    uint64_t v = (uint64_t{1} << k) - 1;
    const uint64_t limit = uint64_t{1} << n;
    while (true) {
        out.push_back(v);
        uint64_t c = v & (~v + 1);
        uint64_t r = v + c;
        uint64_t next = (((r ^ v) >> 2) / c) | r;  // Gosper's hack
        if (next >= limit) break;
        v = next;
    }
    return out;
}

}  // namespace

double SectorSpec::dimension() const { return binomial(n_sites, n_up) * binomial(n_sites, n_down); }

std::string SectorSpec::describe() const {
    return "N=" + std::to_string(n_sites) + " up=" + std::to_string(n_up) + " down=" + std::to_string(n_down) +
           (layout == SpinLayout::interleaved ? " interleaved" : " blocked");
}

SectorSpec SectorSpec::from_electrons(int n_sites, int electrons, int sz_twice, SpinLayout layout) {
    if (n_sites < 1) throw std::invalid_argument("sector needs at least one site");
    if (electrons < 0 || electrons > 2 * n_sites) throw std::invalid_argument("electron count out of range");
    if ((electrons + sz_twice) % 2 != 0) throw std::invalid_argument("S_z parity does not match electron count");
    int up = (electrons + sz_twice) / 2, down = (electrons - sz_twice) / 2;
    if (up < 0 || down < 0 || up > n_sites || down > n_sites) throw std::invalid_argument("infeasible S_z");
    return SectorSpec{n_sites, up, down, layout};
}

SectorSpec SectorSpec::half_filling(int n_sites, SpinLayout layout) {
    return from_electrons(n_sites, n_sites, n_sites % 2, layout);
}

BitMask SectorSpec::to_bitstring(const std::vector<int> &up_sites, const std::vector<int> &down_sites) const {
    BitMask b;
    for (int i : up_sites) b.set(qubit_index(i, Spin::up, n_sites, layout));
    for (int i : down_sites) b.set(qubit_index(i, Spin::down, n_sites, layout));
    return b;
}

BitMask SectorSpec::random_bitstring(std::mt19937_64 &rng) const {
    // partial Fisher-Yates for each spin species
    std::vector<int> idx(n_sites);
    auto draw = [&](int k) {
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = 0; i < k; i++) {
            std::uniform_int_distribution<int> pick(i, n_sites - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        return std::vector<int>(idx.begin(), idx.begin() + k);
    };
    auto ups = draw(n_up);
    auto downs = draw(n_down);
    return to_bitstring(ups, downs);
}

SectorBasis::SectorBasis(const SectorSpec &spec) : spec_(spec) {
    const int n = spec.n_sites;
    if (n < 1 || 2 * n > 64) throw std::invalid_argument("enumerated sectors need 1 <= N <= 32 sites");
    if (spec.n_up < 0 || spec.n_up > n || spec.n_down < 0 || spec.n_down > n) {
        throw std::invalid_argument("infeasible sector " + spec.describe());
    }
    if (spec.dimension() > 4e9) throw std::invalid_argument("sector too large to enumerate");
    ups_ = patterns(n, spec.n_up);
    downs_ = patterns(n, spec.n_down);
    dim_ = static_cast<int64_t>(ups_.size()) * static_cast<int64_t>(downs_.size());

    binom_.assign(n + 1, std::vector<int64_t>(n + 2, 0));
    for (int a = 0; a <= n; a++) {
        binom_[a][0] = 1;
        for (int b = 1; b <= a; b++) binom_[a][b] = binom_[a - 1][b - 1] + (b <= a - 1 ? binom_[a - 1][b] : 0);
    }
    if (n <= 22) {
        auto fill = [&](const std::vector<uint64_t> &pats, std::vector<int32_t> &table) {
            table.assign(size_t{1} << n, -1);
            for (size_t r = 0; r < pats.size(); r++) table[pats[r]] = static_cast<int32_t>(r);
        };
        fill(ups_, up_rank_);
        fill(downs_, down_rank_);
    }
}

uint64_t SectorBasis::join(uint64_t up, uint64_t down) const {
    if (spec_.layout == SpinLayout::interleaved) return spread_bits(up) | (spread_bits(down) << 1);
    return up | (down << spec_.n_sites);
}

void SectorBasis::split(uint64_t bits, uint64_t &up, uint64_t &down) const {
    if (spec_.layout == SpinLayout::interleaved) {
        up = compact_bits(bits);
        down = compact_bits(bits >> 1);
        return;
    }
    const int n = spec_.n_sites;
    const uint64_t m = (n == 64) ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
    up = bits & m;
    down = (bits >> n) & m;
}

int64_t SectorBasis::rank(uint64_t mask, int n_set, const std::vector<int32_t> &table) const {
    const int n = spec_.n_sites;
    if (n < 64 && (mask >> n)) return -1;
    if (std::popcount(mask) != n_set) return -1;
    if (!table.empty()) return table[mask];
    // combinatorial number system: colex rank = numeric order for fixed popcount
    int64_t r = 0;
    int k = 1;
    while (mask) {
        int pos = std::countr_zero(mask);
        r += binom_[pos][k];
        k++;
        mask &= mask - 1;
    }
    return r;
}

int64_t SectorBasis::index_of(uint64_t up, uint64_t down) const {
    int64_t ru = rank(up, spec_.n_up, up_rank_);
    if (ru < 0) return -1;
    int64_t rd = rank(down, spec_.n_down, down_rank_);
    if (rd < 0) return -1;
    return ru * dim_down() + rd;
}

int64_t SectorBasis::index_of(uint64_t bits) const {
    if (2 * spec_.n_sites < 64 && (bits >> (2 * spec_.n_sites))) return -1;
    uint64_t up, down;
    split(bits, up, down);
    return index_of(up, down);
}

// ---------------------------------------------------------------------------

SectorOperator::SectorOperator(const PauliSum &op, const SectorBasis &basis) : basis_(&basis) {
    if (op.qubit_count() > basis.qubit_count()) throw std::invalid_argument("operator acts outside the sector qubits");
    std::unordered_map<uint64_t, size_t> where;
    std::vector<std::pair<uint64_t, double>> diag_terms;
    for (auto &[p, c] : op.sorted_terms()) {
        if (p.x.w[1] || p.x.w[2] || p.z.w[1] || p.z.w[2]) throw std::invalid_argument("operator exceeds 64 qubits");
        int y = p.y_count() & 3;
        if (y & 1) throw std::domain_error("sector operator with imaginary matrix elements: " + p.to_string());
        double coeff = (y == 2) ? -c : c;
        if (p.x.w[0] == 0) {
            diag_terms.emplace_back(p.z.w[0], coeff);
            continue;
        }
        auto [it, fresh] = where.try_emplace(p.x.w[0], offdiag_.size());
        if (fresh) offdiag_.push_back(Group{p.x.w[0], {}, {}});
        offdiag_[it->second].z.push_back(p.z.w[0]);
        offdiag_[it->second].coeff.push_back(coeff);
    }
    const int64_t dim = basis.dimension();
    diag_ = RealVector::Zero(dim);
    for (int64_t k = 0; k < dim; k++) {
        uint64_t b = basis.bits(k);
        double s = 0;
        for (auto &[z, c] : diag_terms) s += (std::popcount(z & b) & 1) ? -c : c;
        diag_[k] = s;
    }
}

template <class F>
void SectorOperator::for_each_offdiag(int64_t col, F &&f) const {
    const uint64_t b = basis_->bits(col);
    for (auto &g : offdiag_) {
        int64_t row = basis_->index_of(b ^ g.x);
        if (row < 0) continue;  // number-conserving groups cancel outside the sector
        double amp = 0;
        for (size_t k = 0; k < g.z.size(); k++) amp += (std::popcount(g.z[k] & b) & 1) ? -g.coeff[k] : g.coeff[k];
        if (amp != 0.0) f(row, amp);
    }
}

void SectorOperator::apply(const double *x, double *y) const {
    const int64_t dim = dimension();
    for (int64_t k = 0; k < dim; k++) y[k] = diag_[k] * x[k];
    for (int64_t k = 0; k < dim; k++) {
        const double xk = x[k];
        if (xk == 0.0) continue;
        for_each_offdiag(k, [&](int64_t row, double amp) { y[row] += amp * xk; });
    }
}

void SectorOperator::apply(const cplx *x, cplx *y) const {
    const int64_t dim = dimension();
    for (int64_t k = 0; k < dim; k++) y[k] = diag_[k] * x[k];
    for (int64_t k = 0; k < dim; k++) {
        const cplx xk = x[k];
        if (xk == cplx(0)) continue;
        for_each_offdiag(k, [&](int64_t row, double amp) { y[row] += amp * xk; });
    }
}

void SectorOperator::apply_abs(const double *x, double *y) const {
    const int64_t dim = dimension();
    for (int64_t k = 0; k < dim; k++) y[k] = std::abs(diag_[k]) * x[k];
    for (int64_t k = 0; k < dim; k++) {
        const double xk = x[k];
        if (xk == 0.0) continue;
        for_each_offdiag(k, [&](int64_t row, double amp) { y[row] += std::abs(amp) * xk; });
    }
}

double SectorOperator::row_norm_sq(int64_t k) const {
    double s = diag_[k] * diag_[k];
    for_each_offdiag(k, [&](int64_t, double amp) { s += amp * amp; });
    return s;
}

Eigen::MatrixXd SectorOperator::dense() const {
    const int64_t dim = dimension();
    if (dim > 20000) throw std::invalid_argument("dense realization refused above dimension 20000");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int64_t k = 0; k < dim; k++) {
        m(k, k) += diag_[k];
        for_each_offdiag(k, [&](int64_t row, double amp) { m(row, k) += amp; });
    }
    return m;
}

SparseRowMatrix SectorOperator::sparse() const {
    const int64_t dim = dimension();
    std::vector<Eigen::Triplet<double, int64_t>> trip;
    trip.reserve(static_cast<size_t>(dim) * (1 + offdiag_.size() / 4));
    for (int64_t k = 0; k < dim; k++) {
        if (diag_[k] != 0.0) trip.emplace_back(k, k, diag_[k]);
        for_each_offdiag(k, [&](int64_t row, double amp) { trip.emplace_back(row, k, amp); });
    }
    SparseRowMatrix m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

// ---------------------------------------------------------------------------

namespace {

RealVector random_unit(int64_t dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    RealVector v(dim);
    for (int64_t i = 0; i < dim; i++) v[i] = g(rng);
    return v / v.norm();
}

void orthogonalize(RealVector &w, const std::vector<const RealVector *> &against) {
    for (int pass = 0; pass < 2; pass++) {
        for (auto *q : against) w -= q->dot(w) * (*q);
    }
}

}  // namespace

std::vector<EigenPair> lowest_eigenpairs(const RealMatvec &op, int64_t dim, int k, const LanczosOptions &opt) {
    if (k < 1 || k > dim) throw std::invalid_argument("requested eigenpair count out of range");
    std::vector<EigenPair> locked;
    double scale = 0;
    RealVector w(dim), tmp(dim);

    for (int target = 0; target < k; target++) {
        RealVector start = random_unit(dim, opt.seed + 7919ULL * target);
        double best_res = INFINITY;
        bool done = false;
        for (int restart = 0; restart <= opt.max_restarts && !done; restart++) {
            std::vector<const RealVector *> lock_ptrs;
            for (auto &e : locked) lock_ptrs.push_back(&e.vector);
            orthogonalize(start, lock_ptrs);
            double sn = start.norm();
            if (sn < 1e-12) {
                start = random_unit(dim, opt.seed + 104729ULL * (target + 1) + restart);
                orthogonalize(start, lock_ptrs);
                sn = start.norm();
            }
            start /= sn;

            const int m_max = static_cast<int>(std::min<int64_t>(opt.krylov_dim, dim - static_cast<int64_t>(locked.size())));
            std::vector<RealVector> basis;
            basis.reserve(m_max);
            basis.push_back(start);
            std::vector<double> alpha, beta;
            int m = 0;
            for (int j = 0; j < m_max; j++) {
                op(basis[j].data(), w.data());
                double a = basis[j].dot(w);
                alpha.push_back(a);
                m = j + 1;
                if (j + 1 == m_max) break;
                std::vector<const RealVector *> all = lock_ptrs;
                for (auto &b : basis) all.push_back(&b);
                orthogonalize(w, all);
                double bnorm = w.norm();
                if (bnorm < 1e-13 * std::max(1.0, std::abs(a))) break;  // invariant subspace
                beta.push_back(bnorm);
                basis.push_back(w / bnorm);
            }
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; i++) {
                tri(i, i) = alpha[i];
                if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
            scale = std::max({scale, std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m - 1))});
            RealVector x = RealVector::Zero(dim);
            for (int i = 0; i < m; i++) x += es.eigenvectors()(i, 0) * basis[i];
            x /= x.norm();
            op(x.data(), tmp.data());
            double theta = x.dot(tmp);
            double res = (tmp - theta * x).norm();
            best_res = std::min(best_res, res);
            if (res <= opt.tol * std::max(scale, 1.0)) {
                locked.push_back({theta, x, res});
                done = true;
            } else {
                start = x;
            }
        }
        if (!done) {
            throw std::runtime_error("Lanczos did not converge for eigenpair " + std::to_string(target) +
                                     "; best residual " + std::to_string(best_res));
        }
    }
    std::sort(locked.begin(), locked.end(), [](const EigenPair &a, const EigenPair &b) { return a.value < b.value; });
    return locked;
}

std::vector<EigenPair> lowest_eigenpairs(const SparseRowMatrix &h, int k, const LanczosOptions &opt) {
    const int64_t dim = h.rows();
    RealMatvec mv = [&h, dim](const double *x, double *y) {
        Eigen::Map<const RealVector> xv(x, dim);
        Eigen::Map<RealVector> yv(y, dim);
        yv.noalias() = h * xv;
    };
    return lowest_eigenpairs(mv, dim, k, opt);
}

double largest_eigenvalue(const RealMatvec &op, int64_t dim, double rel_tol, int max_iter, bool *converged,
                          uint64_t seed) {
    // Plain three-term Lanczos; the extreme Ritz value converges even
    // without reorthogonalization (ghosts only duplicate it).
    RealVector v = random_unit(dim, seed), vprev = RealVector::Zero(dim), w(dim);
    std::vector<double> alpha, beta;
    double last = -INFINITY, theta = -INFINITY;
    int stable = 0;
    if (converged) *converged = false;
    for (int j = 0; j < std::min<int64_t>(max_iter, dim); j++) {
        op(v.data(), w.data());
        double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (j > 0) w -= beta.back() * vprev;
        double b = w.norm();
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; i++) {
            tri(i, i) = alpha[i];
            if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        theta = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(tri, Eigen::EigenvaluesOnly).eigenvalues()(m - 1);
        if (std::abs(theta - last) <= rel_tol * 1e-3 * std::abs(theta)) {
            if (++stable >= 3) {
                if (converged) *converged = true;
                break;
            }
        } else {
            stable = 0;
        }
        last = theta;
        if (b < 1e-13 * std::abs(theta)) {
            if (converged) *converged = true;  // invariant subspace: exact
            break;
        }
        beta.push_back(b);
        vprev = v;
        v = w / b;
    }
    return theta;
}

// ---------------------------------------------------------------------------

namespace {

void sparse_apply(const SparseRowMatrix &h, const ComplexVector &x, ComplexVector &y) {
    RealVector re = h * x.real();
    RealVector im = h * x.imag();
    y.resize(x.size());
    y.real() = re;
    y.imag() = im;
}

}  // namespace

void Propagator::expm_krylov(const SparseRowMatrix &h, double duration, ComplexVector &psi, double tol) {
    const int m_max = 40;
    const int64_t dim = psi.size();
    double remaining = duration;
    double step = duration;
    ComplexVector w;
    while (std::abs(remaining) > 0) {
        double dt = (std::abs(step) < std::abs(remaining)) ? step : remaining;
        const double beta0 = psi.norm();
        if (beta0 == 0.0) return;
        std::vector<ComplexVector> basis;
        basis.push_back(psi / beta0);
        std::vector<double> alpha, beta;
        bool ok = false;
        Eigen::VectorXcd coef;
        for (int j = 0; j < std::min<int64_t>(m_max, dim); j++) {
            sparse_apply(h, basis[j], w);
            double a = basis[j].dot(w).real();
            alpha.push_back(a);
            for (int pass = 0; pass < 2; pass++) {
                for (auto &q : basis) w -= q.dot(w) * q;
            }
            double b = w.norm();
            const int m = j + 1;
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; i++) {
                tri(i, i) = alpha[i];
                if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
            const auto &q = es.eigenvectors();
            Eigen::VectorXcd phase(m);
            for (int i = 0; i < m; i++) phase[i] = std::exp(cplx(0, -es.eigenvalues()(i) * dt)) * q(0, i);
            coef = q.cast<cplx>() * phase;
            double err = beta0 * b * std::abs(coef[m - 1]);
            bool breakdown = b < 1e-14 * std::max(1.0, std::abs(a));
            if (err <= tol || breakdown || m == dim) {
                ok = true;
                break;
            }
            if (m == m_max) break;
            beta.push_back(b);
            basis.push_back(w / b);
        }
        if (!ok) {
            step = dt / 2;
            if (std::abs(step) < 1e-12 * std::abs(duration)) throw std::runtime_error("Krylov propagation did not converge");
            continue;
        }
        ComplexVector out = ComplexVector::Zero(dim);
        for (int i = 0; i < coef.size(); i++) out += coef[i] * basis[i];
        psi = beta0 * out;
        remaining -= dt;
    }
}

Propagator::Propagator(std::vector<SparseRowMatrix> ops, std::vector<bool> diagonal, std::vector<Factor> chain,
                       double krylov_tol)
    : ops_(std::move(ops)), diagonal_(std::move(diagonal)), chain_(std::move(chain)), tol_(krylov_tol) {
    if (ops_.size() != diagonal_.size()) throw std::invalid_argument("operator/diagonal flag size mismatch");
    for (auto &f : chain_) {
        if (f.op < 0 || f.op >= static_cast<int>(ops_.size())) throw std::invalid_argument("factor references unknown operator");
        ComplexVector ph;
        if (diagonal_[f.op]) {
            RealVector d = ops_[f.op].diagonal();
            ph.resize(d.size());
            for (int64_t i = 0; i < d.size(); i++) ph[i] = std::exp(cplx(0, -d[i] * f.duration));
        }
        phases_.push_back(std::move(ph));
    }
}

void Propagator::apply(ComplexVector &psi) const {
    for (size_t n = chain_.size(); n-- > 0;) {
        const auto &f = chain_[n];
        if (diagonal_[f.op]) {
            psi.array() *= phases_[n].array();
        } else {
            expm_krylov(ops_[f.op], f.duration, psi, tol_);
        }
    }
}

ComplexVector propagate(const std::vector<std::pair<PauliSum, double>> &factors, const SectorBasis &basis,
                        const ComplexVector &psi) {
    std::vector<SparseRowMatrix> ops;
    std::vector<bool> diag;
    std::vector<Factor> chain;
    for (size_t i = 0; i < factors.size(); i++) {
        SectorOperator so(factors[i].first, basis);
        ops.push_back(so.sparse());
        diag.push_back(factors[i].first.is_diagonal());
        chain.push_back({static_cast<int>(i), factors[i].second});
    }
    Propagator prop(std::move(ops), std::move(diag), std::move(chain));
    ComplexVector out = psi;
    prop.apply(out);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// ||S+ psi||^2 with S+ = sum_i a+_{i,up} a_{i,down}, accumulated into the
// (n_up + 1, n_down - 1) sector.
template <class Vec>
double raise_norm_sq(const SectorBasis &basis, const Vec &psi) {
    const auto &spec = basis.spec();
    if (spec.n_down == 0 || spec.n_up == spec.n_sites) return 0.0;
    SectorBasis target(SectorSpec{spec.n_sites, spec.n_up + 1, spec.n_down - 1, spec.layout});
    Eigen::Matrix<typename Vec::Scalar, Eigen::Dynamic, 1> out =
        Eigen::Matrix<typename Vec::Scalar, Eigen::Dynamic, 1>::Zero(target.dimension());
    const int n = spec.n_sites;
    for (int64_t k = 0; k < basis.dimension(); k++) {
        if (psi[k] == typename Vec::Scalar(0)) continue;
        const uint64_t up = basis.up(k), dn = basis.down(k);
        const uint64_t bits = basis.join(up, dn);
        for (int i = 0; i < n; i++) {
            if (!((dn >> i) & 1) || ((up >> i) & 1)) continue;
            int qa = qubit_index(i, Spin::down, n, spec.layout);
            int qc = qubit_index(i, Spin::up, n, spec.layout);
            // a_qa first, then a+_qc: each passes the occupied modes below it
            uint64_t below_a = (qa == 0) ? 0 : (bits & ((uint64_t{1} << qa) - 1));
            int sign_a = std::popcount(below_a) & 1;
            uint64_t mid = bits & ~(uint64_t{1} << qa);
            uint64_t below_c = (qc == 0) ? 0 : (mid & ((uint64_t{1} << qc) - 1));
            int sign_c = std::popcount(below_c) & 1;
            int64_t j = target.index_of(up | (uint64_t{1} << i), dn & ~(uint64_t{1} << i));
            out[j] += ((sign_a ^ sign_c) ? -1.0 : 1.0) * psi[k];
        }
    }
    return out.squaredNorm();
}

template <class Vec>
double spin_expectation(const SectorBasis &basis, const Vec &psi) {
    if (psi.size() != basis.dimension()) throw std::invalid_argument("state dimension does not match sector");
    const double sz = 0.5 * basis.spec().sz_twice();
    const double nrm = psi.squaredNorm();
    // S^2 = S- S+ + Sz (Sz + 1)
    return (raise_norm_sq(basis, psi) + sz * (sz + 1) * nrm) / nrm;
}

}  // namespace

double total_spin_expectation(const SectorBasis &basis, const ComplexVector &psi) { return spin_expectation(basis, psi); }
double total_spin_expectation(const SectorBasis &basis, const RealVector &psi) { return spin_expectation(basis, psi); }

// ---------------------------------------------------------------------------

namespace {
constexpr char kSnapMagic[8] = {'T', 'L', 'S', 'N', 'A', 'P', '0', '1'};
constexpr uint32_t kEndianTag = 0x01020304;
}  // namespace

void write_snapshot(const std::string &path, const SectorSpec &spec, const ComplexVector &psi) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(kSnapMagic, 8);
    f.write(reinterpret_cast<const char *>(&kEndianTag), 4);
    int64_t dim = psi.size();
    int32_t hdr[4] = {spec.n_sites, spec.n_up, spec.n_down, spec.layout == SpinLayout::interleaved ? 0 : 1};
    f.write(reinterpret_cast<const char *>(&dim), 8);
    f.write(reinterpret_cast<const char *>(hdr), sizeof hdr);
    f.write(reinterpret_cast<const char *>(psi.data()), static_cast<std::streamsize>(dim * sizeof(cplx)));
    if (!f) throw std::runtime_error("write failed for " + path);
}

ComplexVector read_snapshot(const std::string &path, SectorSpec *spec) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[8];
    uint32_t tag = 0;
    int64_t dim = 0;
    int32_t hdr[4];
    f.read(magic, 8);
    f.read(reinterpret_cast<char *>(&tag), 4);
    if (!f || std::memcmp(magic, kSnapMagic, 8) != 0) throw std::runtime_error(path + ": not a state snapshot");
    if (tag != kEndianTag) throw std::runtime_error(path + ": snapshot written with a different byte order");
    f.read(reinterpret_cast<char *>(&dim), 8);
    f.read(reinterpret_cast<char *>(hdr), sizeof hdr);
    SectorSpec s{hdr[0], hdr[1], hdr[2], hdr[3] == 0 ? SpinLayout::interleaved : SpinLayout::blocked};
    if (!f || dim < 0 || static_cast<double>(dim) != s.dimension()) throw std::runtime_error(path + ": corrupt header");
    ComplexVector psi(dim);
    f.read(reinterpret_cast<char *>(psi.data()), static_cast<std::streamsize>(dim * sizeof(cplx)));
    if (!f) throw std::runtime_error(path + ": truncated snapshot");
    if (spec) *spec = s;
    return psi;
}

}  // namespace trotterlab
