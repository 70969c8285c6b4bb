#include "trotterlab/pauli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace trotterlab {

int BitMask::highest() const {
    for (int k = kMaskWords - 1; k >= 0; k--) {
        if (w[k]) return 64 * k + 63 - std::countl_zero(w[k]);
    }
    return -1;
}

PauliString PauliString::single(int q, char letter) {
    if (q < 0 || q >= kMaxQubits) throw std::out_of_range("qubit index out of range");
    PauliString p;
    switch (letter) {
        case 'X': p.x.set(q); break;
        case 'Y': p.x.set(q); p.z.set(q); break;
        case 'Z': p.z.set(q); break;
        case 'I': break;
        default: throw std::invalid_argument(std::string("bad Pauli letter ") + letter);
    }
    return p;
}

PauliString PauliString::parse(std::string_view text) {
    PauliString p;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
        if (tok == "I") continue;
        if (tok.size() < 2) throw std::invalid_argument("bad Pauli token '" + tok + "'");
        int q = std::stoi(tok.substr(1));
        if (p.x.get(q) || p.z.get(q)) throw std::invalid_argument("qubit repeated in '" + std::string(text) + "'");
        auto s = single(q, tok[0]);
        p.x = p.x | s.x;
        p.z = p.z | s.z;
    }
    return p;
}

char PauliString::letter(int q) const {
    bool xb = x.get(q), zb = z.get(q);
    if (xb && zb) return 'Y';
    if (xb) return 'X';
    if (zb) return 'Z';
    return 'I';
}

int PauliString::support_end() const { return (x | z).highest(); }

std::string PauliString::to_string() const {
    if (is_identity()) return "I";
    std::string out;
    int end = support_end();
    for (int q = 0; q <= end; q++) {
        char c = letter(q);
        if (c == 'I') continue;
        if (!out.empty()) out += ' ';
        out += c;
        out += std::to_string(q);
    }
    return out;
}

namespace {

int letter_code(const PauliString &p, int q) {
    bool xb = p.x.get(q), zb = p.z.get(q);
    return xb ? (zb ? 2 : 1) : (zb ? 3 : 0);
}

int lowest_set(const BitMask &m) {
    for (int k = 0; k < kMaskWords; k++) {
        if (m.w[k]) return 64 * k + std::countr_zero(m.w[k]);
    }
    return -1;
}

}  // namespace

bool canonical_less(const PauliString &a, const PauliString &b) {
    int wa = a.weight(), wb = b.weight();
    if (wa != wb) return wa < wb;
    BitMask sa = a.x | a.z, sb = b.x | b.z;
    int q = lowest_set(sa ^ sb);
    if (q >= 0) return sa.get(q);
    q = lowest_set((a.x ^ b.x) | (a.z ^ b.z));
    if (q < 0) return false;
    return letter_code(a, q) < letter_code(b, q);
}

int product_phase(const PauliString &a, const PauliString &b) {
    PauliString c = product_string(a, b);
    int k = a.y_count() + b.y_count() - c.y_count() + 2 * popcount_and(a.z, b.x);
    return ((k % 4) + 4) % 4;
}

PauliSum::PauliSum(int qubit_count) : n_qubits_(qubit_count) {
    if (qubit_count < 0 || qubit_count > kMaxQubits) throw std::out_of_range("qubit count out of range");
}

void PauliSum::add(const PauliString &p, double c) {
    if (c == 0.0) return;
    int end = p.support_end();
    if (end >= n_qubits_) throw std::out_of_range("Pauli string exceeds qubit count");
    auto [it, fresh] = terms_.try_emplace(p, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double PauliSum::coefficient(const PauliString &p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? 0.0 : it->second;
}

double PauliSum::identity_coefficient() const { return coefficient(PauliString{}); }

void PauliSum::set_identity(double c) {
    terms_.erase(PauliString{});
    add(PauliString{}, c);
}

size_t PauliSum::term_count() const { return terms_.size() - (terms_.count(PauliString{}) ? 1 : 0); }

bool PauliSum::is_diagonal() const {
    for (auto &[p, c] : terms_) {
        if (!p.is_diagonal()) return false;
    }
    return true;
}

double PauliSum::max_abs() const {
    double m = 0;
    for (auto &[p, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

double PauliSum::one_norm(bool include_identity) const {
    double s = 0;
    for (auto &[p, c] : terms_) {
        if (include_identity || !p.is_identity()) s += std::abs(c);
    }
    return s;
}

void PauliSum::prune(double rel) {
    double cut = rel * max_abs();
    std::erase_if(terms_, [cut](const auto &kv) { return std::abs(kv.second) <= cut; });
}

void PauliSum::prune_absolute(double cut) {
    std::erase_if(terms_, [cut](const auto &kv) { return std::abs(kv.second) < cut; });
}

PauliSum PauliSum::without_identity() const {
    PauliSum r = *this;
    r.terms_.erase(PauliString{});
    return r;
}

std::vector<std::pair<PauliString, double>> PauliSum::sorted_terms() const {
    std::vector<std::pair<PauliString, double>> v(terms_.begin(), terms_.end());
    std::sort(v.begin(), v.end(), [](const auto &a, const auto &b) { return canonical_less(a.first, b.first); });
    return v;
}

PauliSum &PauliSum::operator+=(const PauliSum &o) {
    n_qubits_ = std::max(n_qubits_, o.n_qubits_);
    for (auto &[p, c] : o.sorted_terms()) add(p, c);
    return *this;
}

PauliSum &PauliSum::operator-=(const PauliSum &o) {
    n_qubits_ = std::max(n_qubits_, o.n_qubits_);
    for (auto &[p, c] : o.sorted_terms()) add(p, -c);
    return *this;
}

PauliSum &PauliSum::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto &[p, c] : terms_) c *= s;
    return *this;
}

std::string PauliSum::to_text() const {
    std::string out;
    char buf[32];
    for (auto &[p, c] : sorted_terms()) {
        std::snprintf(buf, sizeof buf, "%+.7e", c);
        out += buf;
        out += ' ';
        out += p.to_string();
        out += '\n';
    }
    return out;
}

PauliSum PauliSum::from_text(std::string_view text, int qubit_count) {
    PauliSum r(qubit_count);
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        double c;
        if (!(ls >> c)) throw std::invalid_argument("line " + std::to_string(lineno) + ": missing coefficient");
        std::string rest;
        std::getline(ls, rest);
        r.add(PauliString::parse(rest), c);
    }
    return r;
}

namespace {

// Accumulates complex products, then folds into a real PauliSum.
struct ComplexAccumulator {
    std::unordered_map<PauliString, cplx, PauliHash> map;

    void add(const PauliString &p, cplx c) { map[p] += c; }

    // Returns the real part as a PauliSum of (scale * value); the part that
    // must vanish is checked against tol relative to the largest entry.
    PauliSum fold(int n_qubits, cplx scale, const char *what) const {
        double big = 0;
        for (auto &[p, c] : map) big = std::max(big, std::abs(c));
        PauliSum out(n_qubits);
        std::vector<std::pair<PauliString, cplx>> v(map.begin(), map.end());
        std::sort(v.begin(), v.end(), [](const auto &a, const auto &b) { return canonical_less(a.first, b.first); });
        for (auto &[p, c] : v) {
            cplx s = scale * c;
            if (std::abs(s.imag()) > 1e-10 * std::max(big, 1e-300)) {
                throw std::domain_error(std::string(what) + ": imaginary residue on " + p.to_string());
            }
            out.add(p, s.real());
        }
        out.prune(1e-12);
        return out;
    }
};

const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

}  // namespace

PauliSum multiply(const PauliSum &a, const PauliSum &b) {
    ComplexAccumulator acc;
    auto ta = a.sorted_terms();
    auto tb = b.sorted_terms();
    for (auto &[pa, ca] : ta) {
        for (auto &[pb, cb] : tb) {
            acc.add(product_string(pa, pb), kIPow[product_phase(pa, pb)] * (ca * cb));
        }
    }
    return acc.fold(std::max(a.qubit_count(), b.qubit_count()), 1.0, "multiply");
}

PauliSum commutator(const PauliSum &a, const PauliSum &b) {
    // [Pa, Pb] = 2 Pa Pb when they anticommute, else 0.
    ComplexAccumulator acc;
    auto ta = a.sorted_terms();
    auto tb = b.sorted_terms();
    for (auto &[pa, ca] : ta) {
        if (pa.is_identity()) continue;
        for (auto &[pb, cb] : tb) {
            if (commutes(pa, pb)) continue;
            acc.add(product_string(pa, pb), kIPow[product_phase(pa, pb)] * (2.0 * ca * cb));
        }
    }
    // [a,b] = i C  =>  C = -i [a,b]
    return acc.fold(std::max(a.qubit_count(), b.qubit_count()), cplx(0, -1), "commutator");
}

CompiledPauliSum::CompiledPauliSum(const PauliSum &op) : n_qubits_(op.qubit_count()) {
    struct MaskHash {
        size_t operator()(const BitMask &m) const { return PauliHash{}(PauliString{m, {}}); }
    };
    std::unordered_map<BitMask, size_t, MaskHash> index;
    for (auto &[p, c] : op.sorted_terms()) {
        auto [it, fresh] = index.try_emplace(p.x, groups_.size());
        if (fresh) groups_.push_back(Group{p.x, {}, {}, true});
        Group &g = groups_[it->second];
        int y = p.y_count() & 3;
        g.z.push_back(p.z);
        g.coeff.push_back(kIPow[y] * c);
        if (y & 1) g.real_valued = false;
    }
}

double CompiledPauliSum::row_norm_sq(const BitMask &b) const {
    double s = 0;
    for (auto &g : groups_) s += std::norm(group_amplitude(g, b));
    return s;
}

std::vector<std::pair<BitMask, cplx>> apply_to_basis_state(const PauliSum &op, const BitMask &b) {
    CompiledPauliSum comp(op);
    std::vector<std::pair<BitMask, cplx>> out;
    for (auto &g : comp.groups()) {
        cplx a = CompiledPauliSum::group_amplitude(g, b);
        if (a != cplx(0)) out.emplace_back(b ^ g.x, a);
    }
    std::sort(out.begin(), out.end(), [](const auto &l, const auto &r) {
        for (int k = kMaskWords - 1; k >= 0; k--) {
            if (l.first.w[k] != r.first.w[k]) return l.first.w[k] < r.first.w[k];
        }
        return false;
    });
    return out;
}

}  // namespace trotterlab
