#include "trotterlab/norms.h"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace trotterlab {

std::string norm_kind_name(NormKind k) {
    switch (k) {
        case NormKind::spectral_bound: return "spectral_bound";
        case NormKind::frobenius_sampled: return "frobenius_sampled";
        case NormKind::frobenius_exact: return "frobenius_exact";
        case NormKind::dense_exact: return "dense_exact";
    }
    return "?";
}

std::string constant_kind_name(ConstantKind k) { return k == ConstantKind::worst ? "worst" : "average"; }
std::string scheme_name(Scheme s) { return s == Scheme::so ? "SO" : "tile"; }

NestedCommutators nested_commutators(const PauliSum &t_op, const PauliSum &v_op) {
    if (t_op.qubit_count() != v_op.qubit_count()) throw std::invalid_argument("qubit count mismatch");
    // commutator() returns C with [A,B] = iC, so [[V,T],X] = i[C1,X] = -commutator(C1, X)
    PauliSum c1 = commutator(v_op, t_op);
    NestedCommutators out{commutator(c1, v_op), commutator(c1, t_op)};
    out.vtv *= -1.0;
    out.vtt *= -1.0;
    return out;
}

NormEstimate spectral_norm_bound(const PauliSum &op, const SectorBasis &basis, double rel_tol, int max_iter) {
    SectorOperator so(op, basis);
    NormEstimate est;
    est.kind = NormKind::spectral_bound;
    if (so.is_diagonal()) {
        est.value = so.diagonal().cwiseAbs().maxCoeff();
        return est;
    }
    RealMatvec mv = [&so](const double *x, double *y) { so.apply_abs(x, y); };
    bool conv = false;
    est.value = largest_eigenvalue(mv, basis.dimension(), rel_tol, max_iter, &conv);
    est.converged = conv;
    return est;
}

NormEstimate dense_spectral_norm(const PauliSum &op, const SectorBasis &basis) {
    SectorOperator so(op, basis);
    Eigen::MatrixXd m = so.dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    NormEstimate est;
    est.kind = NormKind::dense_exact;
    est.value = es.eigenvalues().cwiseAbs().maxCoeff();
    return est;
}

uint64_t stream_seed(uint64_t seed, uint64_t index) {
    // splitmix64 over a mix of both inputs
    uint64_t z = seed * 0x9e3779b97f4a7c15ULL + index + 0x632be59bd9b4e019ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

NormEstimate from_moments(double mean, double var, int64_t k, NormKind kind) {
    NormEstimate est;
    est.kind = kind;
    est.sample_count = k;
    est.value = std::sqrt(mean);
    // delta method: d sqrt(m) = dm / (2 sqrt(m))
    est.standard_error = (mean > 0 && k > 0) ? std::sqrt(var / k) / (2 * est.value) : 0.0;
    return est;
}

}  // namespace

NormEstimate frobenius_sampled(const PauliSum &op, const SectorSpec &sector, int64_t samples, uint64_t seed, int jobs) {
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    if (op.qubit_count() > sector.qubit_count()) throw std::invalid_argument("operator acts outside the sector qubits");
    CompiledPauliSum comp(op);
    std::vector<double> x(samples);
    auto work = [&](int64_t begin, int64_t end) {
        for (int64_t k = begin; k < end; k++) {
            std::mt19937_64 rng(stream_seed(seed, static_cast<uint64_t>(k)));
            x[k] = comp.row_norm_sq(sector.random_bitstring(rng));
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        work(0, samples);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; j++) pool.emplace_back(work, samples * j / jobs, samples * (j + 1) / jobs);
        for (auto &t : pool) t.join();
    }
    // fixed-order two-pass moments
    double mean = 0;
    for (double v : x) mean += v;
    mean /= samples;
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= (samples - 1);
    auto est = from_moments(mean, var, samples, NormKind::frobenius_sampled);
    est.seed = seed;
    return est;
}

NormEstimate frobenius_exact(const PauliSum &op, const SectorBasis &basis) {
    SectorOperator so(op, basis);
    const int64_t d = basis.dimension();
    double sum = 0;
    for (int64_t k = 0; k < d; k++) sum += so.row_norm_sq(k);
    NormEstimate est;
    est.kind = NormKind::frobenius_exact;
    est.value = std::sqrt(sum / d);
    est.sample_count = d;
    return est;
}

ErrorConstant worst_case_constant(const NormEstimate &vtv, const NormEstimate &vtt) {
    ErrorConstant c;
    c.kind = ConstantKind::worst;
    c.value = vtv.value / 24 + vtt.value / 12;
    c.standard_error = std::hypot(vtv.standard_error / 24, vtt.standard_error / 12);
    c.upper_bound = vtv.kind == NormKind::spectral_bound || vtt.kind == NormKind::spectral_bound;
    c.components = {{"vtv", vtv.value}, {"vtt", vtt.value}};
    return c;
}

ErrorConstant average_case_constant(const NormEstimate &vtv, const NormEstimate &vtt) {
    ErrorConstant c = worst_case_constant(vtv, vtt);
    c.kind = ConstantKind::average;
    c.upper_bound = false;
    return c;
}

ErrorConstant tile_constant(const ErrorConstant &so, const ErrorConstant &kinetic) {
    if (so.kind != kinetic.kind) throw std::invalid_argument("cannot combine worst-case and average-case constants");
    ErrorConstant c = so;
    c.scheme = Scheme::tile;
    c.value = so.value + kinetic.value;
    c.standard_error = std::hypot(so.standard_error, kinetic.standard_error);
    c.upper_bound = true;
    c.components = {{"so", so.value}, {"kinetic", kinetic.value}};
    return c;
}

}  // namespace trotterlab
