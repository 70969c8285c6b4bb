#pragma once

#include <array>
#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace trotterlab {

constexpr int kMaskWords = 3;
constexpr int kMaxQubits = 64 * kMaskWords;

using cplx = std::complex<double>;

// Fixed-width qubit bitset. 192 qubits covers every molecule in scope
// (5-rhombene needs 140).
struct BitMask {
    std::array<uint64_t, kMaskWords> w{};

    bool get(int q) const { return (w[q >> 6] >> (q & 63)) & 1; }
    void set(int q) { w[q >> 6] |= uint64_t{1} << (q & 63); }
    void flip(int q) { w[q >> 6] ^= uint64_t{1} << (q & 63); }
    bool any() const {
        for (auto v : w) {
            if (v) return true;
        }
        return false;
    }
    int popcount() const {
        int n = 0;
        for (auto v : w) n += std::popcount(v);
        return n;
    }
    int highest() const;  // -1 if empty

    BitMask operator^(const BitMask &o) const {
        BitMask r;
        for (int k = 0; k < kMaskWords; k++) r.w[k] = w[k] ^ o.w[k];
        return r;
    }
    BitMask operator&(const BitMask &o) const {
        BitMask r;
        for (int k = 0; k < kMaskWords; k++) r.w[k] = w[k] & o.w[k];
        return r;
    }
    BitMask operator|(const BitMask &o) const {
        BitMask r;
        for (int k = 0; k < kMaskWords; k++) r.w[k] = w[k] | o.w[k];
        return r;
    }
    bool operator==(const BitMask &o) const = default;
};

inline int popcount_and(const BitMask &a, const BitMask &b) {
    int n = 0;
    for (int k = 0; k < kMaskWords; k++) n += std::popcount(a.w[k] & b.w[k]);
    return n;
}

inline BitMask mask_from_u64(uint64_t v) {
    BitMask m;
    m.w[0] = v;
    return m;
}

// Phase-free Pauli string. Letter on qubit q: x=1,z=0 -> X; x=0,z=1 -> Z;
// x=1,z=1 -> Y. The operator is i^{|x&z|} X^x Z^z.
struct PauliString {
    BitMask x, z;

    static PauliString single(int q, char letter);
    static PauliString parse(std::string_view text);

    char letter(int q) const;
    bool is_identity() const { return !x.any() && !z.any(); }
    bool is_diagonal() const { return !x.any(); }
    int weight() const { return (x | z).popcount(); }
    int y_count() const { return popcount_and(x, z); }
    // Highest qubit touched, -1 for identity.
    int support_end() const;
    std::string to_string() const;  // "X0 Z3 Y7", "I" for identity

    bool operator==(const PauliString &o) const = default;
};

// Canonical order: by weight, then by the lowest qubit where the two strings
// differ (a letter sorts before I there; otherwise X < Y < Z).
bool canonical_less(const PauliString &a, const PauliString &b);

struct PauliHash {
    size_t operator()(const PauliString &p) const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (int k = 0; k < kMaskWords; k++) {
            h ^= p.x.w[k] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h ^= p.z.w[k] * 0xff51afd7ed558ccdULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

inline bool commutes(const PauliString &a, const PauliString &b) {
    return ((popcount_and(a.x, b.z) + popcount_and(a.z, b.x)) & 1) == 0;
}

// a*b = i^k * (a^b) with k returned mod 4.
int product_phase(const PauliString &a, const PauliString &b);

inline PauliString product_string(const PauliString &a, const PauliString &b) {
    return PauliString{a.x ^ b.x, a.z ^ b.z};
}

// Sparse real-coefficient Pauli sum. The identity is an ordinary key but is
// excluded from term_count().
class PauliSum {
   public:
    using Map = std::unordered_map<PauliString, double, PauliHash>;

    PauliSum() = default;
    explicit PauliSum(int qubit_count);

    int qubit_count() const { return n_qubits_; }
    void add(const PauliString &p, double c);
    double coefficient(const PauliString &p) const;
    double identity_coefficient() const;
    void set_identity(double c);
    size_t term_count() const;  // non-identity terms
    size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const Map &terms() const { return terms_; }
    bool is_diagonal() const;

    double max_abs() const;
    double one_norm(bool include_identity = false) const;
    // Drop terms with |c| <= rel * max|c| (and exact zeros).
    void prune(double rel = 1e-12);
    // Drop terms with |c| < cut.
    void prune_absolute(double cut);
    // Non-identity part only.
    PauliSum without_identity() const;

    std::vector<std::pair<PauliString, double>> sorted_terms() const;

    PauliSum &operator+=(const PauliSum &o);
    PauliSum &operator-=(const PauliSum &o);
    PauliSum &operator*=(double s);
    friend PauliSum operator+(PauliSum a, const PauliSum &b) { return a += b; }
    friend PauliSum operator-(PauliSum a, const PauliSum &b) { return a -= b; }
    friend PauliSum operator*(PauliSum a, double s) { return a *= s; }
    friend PauliSum operator*(double s, PauliSum a) { return a *= s; }

    std::string to_text() const;
    static PauliSum from_text(std::string_view text, int qubit_count);

   private:
    int n_qubits_ = 0;
    Map terms_;
};

// Product a*b; throws std::domain_error if the result carries an imaginary
// residue (i.e. is not Hermitian).
PauliSum multiply(const PauliSum &a, const PauliSum &b);

// Returns C with [a, b] = i*C. For Hermitian a, b the commutator is
// anti-Hermitian, so C is Hermitian with real coefficients.
PauliSum commutator(const PauliSum &a, const PauliSum &b);

// Matrix elements of a PauliSum grouped by X-mask: on |b>, the group with
// flip mask x sends b to b^x with amplitude sum_k c_k (-1)^{|z_k & b|}.
class CompiledPauliSum {
   public:
    struct Group {
        BitMask x;
        std::vector<BitMask> z;
        std::vector<cplx> coeff;  // c * i^{|x&z|}
        bool real_valued = true;  // all coeff purely real
    };

    explicit CompiledPauliSum(const PauliSum &op);

    int qubit_count() const { return n_qubits_; }
    const std::vector<Group> &groups() const { return groups_; }

    static cplx group_amplitude(const Group &g, const BitMask &b) {
        cplx s = 0;
        for (size_t k = 0; k < g.z.size(); k++) {
            s += (popcount_and(g.z[k], b) & 1) ? -g.coeff[k] : g.coeff[k];
        }
        return s;
    }
    // ||O|b>||^2
    double row_norm_sq(const BitMask &b) const;

   private:
    int n_qubits_;
    std::vector<Group> groups_;
};

// Sparse output of O|b>, sorted by bitstring for determinism.
std::vector<std::pair<BitMask, cplx>> apply_to_basis_state(const PauliSum &op, const BitMask &b);

}  // namespace trotterlab
