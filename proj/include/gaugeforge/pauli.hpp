#pragma once

// Phased n-qubit Pauli operators.
//
// A PauliOp stores i^phase * P_0 (x) P_1 (x) ... where qubit j carries
// I, X, Z or Y according to (x_j, z_j) = (0,0), (1,0), (0,1), (1,1).
// Y is the Hermitian Pauli Y = iXZ, so every operator with an even phase is
// Hermitian. Qubit j is bit j of x and z; at most 63 qubits.

#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaugeforge/error.hpp"
#include "gaugeforge/gf2.hpp"

namespace gaugeforge {

inline constexpr std::size_t kMaxQubits = 63;

struct PauliOp {
    std::size_t n = 1;
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    std::uint8_t phase = 0;  // exponent of i, mod 4

    static PauliOp identity(std::size_t n) {
        if (n == 0 || n > kMaxQubits) throw DimensionError("PauliOp: qubit count must be in [1, 63]");
        return PauliOp{n, 0, 0, 0};
    }
    static PauliOp single(std::size_t n, std::size_t q, char letter) {
        PauliOp p = identity(n);
        if (q >= n) throw DimensionError("PauliOp: qubit index out of range");
        switch (letter) {
            case 'X': p.x = gf2::bit(q); break;
            case 'Z': p.z = gf2::bit(q); break;
            case 'Y': p.x = p.z = gf2::bit(q); break;
            case 'I': break;
            default: throw ParseError(std::string("unknown Pauli letter '") + letter + "'");
        }
        return p;
    }
    static PauliOp x_type(std::size_t n, std::uint64_t support) { return PauliOp{n, support, 0, 0}; }
    static PauliOp z_type(std::size_t n, std::uint64_t support) { return PauliOp{n, 0, support, 0}; }

    std::size_t weight() const { return static_cast<std::size_t>(gf2::popcount(x | z)); }
    bool is_identity() const { return x == 0 && z == 0; }
    bool is_hermitian() const { return phase % 2 == 0; }
    bool is_x_type() const { return z == 0; }
    bool is_z_type() const { return x == 0; }
    std::uint64_t support() const { return x | z; }

    // Phase-free symplectic vector (X part low, Z part high).
    gf2::Bits128 symplectic() const { return {x, z}; }
    bool same_word(const PauliOp& o) const { return n == o.n && x == o.x && z == o.z; }

    PauliOp negated() const { return PauliOp{n, x, z, static_cast<std::uint8_t>((phase + 2) % 4)}; }
    PauliOp unsigned_word() const { return PauliOp{n, x, z, 0}; }

    friend bool operator==(const PauliOp&, const PauliOp&) = default;
};

inline void require_same_size(const PauliOp& a, const PauliOp& b) {
    if (a.n != b.n)
        throw DimensionError("Pauli operators act on " + std::to_string(a.n) + " and " + std::to_string(b.n) +
                             " qubits");
}

// Product a*b with exact i-power phase.
inline PauliOp multiply(const PauliOp& a, const PauliOp& b) {
    require_same_size(a, b);
    // Per-qubit phase exponents for single-qubit products, summed bitwise:
    //   Y*Z = iX, Y*X = -iZ, X*Y = iZ, X*Z = -iY, Z*X = iY, Z*Y = -iX.
    const std::uint64_t ay = a.x & a.z, ax = a.x & ~a.z, az = a.z & ~a.x;
    const std::uint64_t by = b.x & b.z, bx = b.x & ~b.z, bz = b.z & ~b.x;
    const int plus = gf2::popcount(ay & bz) + gf2::popcount(ax & by) + gf2::popcount(az & bx);
    const int minus = gf2::popcount(ay & bx) + gf2::popcount(ax & bz) + gf2::popcount(az & by);
    const int phase = (a.phase + b.phase + plus - minus) % 4;
    return PauliOp{a.n, a.x ^ b.x, a.z ^ b.z, static_cast<std::uint8_t>((phase + 4) % 4)};
}

inline PauliOp operator*(const PauliOp& a, const PauliOp& b) { return multiply(a, b); }

inline int symplectic_form(const PauliOp& a, const PauliOp& b) {
    require_same_size(a, b);
    return gf2::popcount((a.x & b.z) ^ (a.z & b.x)) & 1;
}

inline bool commutes(const PauliOp& a, const PauliOp& b) { return symplectic_form(a, b) == 0; }

// Maps qubit indices to the labels used in operator text.
//
// Linear labeling uses 1-based indices ("Z3"). Grid labeling uses 1-based
// (row, column) coordinates ("X[2,3]") over an explicit list of occupied
// sites, qubit q sitting at sites[q].
class Labeling {
  public:
    static Labeling linear(std::size_t n) {
        Labeling l;
        l.n_ = n;
        return l;
    }

    static Labeling grid(std::size_t rows, std::size_t cols) {
        std::vector<std::pair<std::size_t, std::size_t>> sites;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) sites.emplace_back(r, c);
        return grid(std::move(sites));
    }

    // Sites are 0-based (row, column) pairs, one per qubit.
    static Labeling grid(std::vector<std::pair<std::size_t, std::size_t>> sites) {
        Labeling l;
        l.n_ = sites.size();
        l.is_grid_ = true;
        for (std::size_t q = 0; q < sites.size(); ++q) l.index_[sites[q]] = q;
        l.sites_ = std::move(sites);
        return l;
    }

    std::size_t size() const { return n_; }
    bool is_grid() const { return is_grid_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& sites() const { return sites_; }

    // 1-based coordinates in, qubit index out.
    std::optional<std::size_t> at(std::size_t row1, std::size_t col1) const {
        if (row1 == 0 || col1 == 0) return std::nullopt;
        auto it = index_.find({row1 - 1, col1 - 1});
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::string label(std::size_t q) const {
        if (!is_grid_) return std::to_string(q + 1);
        return "[" + std::to_string(sites_[q].first + 1) + "," + std::to_string(sites_[q].second + 1) + "]";
    }

  private:
    std::size_t n_ = 0;
    bool is_grid_ = false;
    std::vector<std::pair<std::size_t, std::size_t>> sites_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index_;
};

namespace detail {

inline std::uint8_t parse_sign(std::string_view s) {
    if (s == "+" || s.empty()) return 0;
    if (s == "-") return 2;
    if (s == "+i" || s == "i") return 1;
    if (s == "-i") return 3;
    return 255;
}

}  // namespace detail

// Parses whitespace-separated single-qubit factors such as "X[1,1] X[1,2]" or
// "-Z3 Z5", multiplying them left to right. An optional sign (+, -, +i, -i)
// may lead, either as its own token or attached to the first factor.
inline PauliOp pauli_from_string(std::string_view text, const Labeling& labeling) {
    PauliOp result = PauliOp::identity(labeling.size());
    std::size_t pos = 0;
    bool first = true;
    auto fail = [&](std::string_view tok, std::size_t at, const std::string& why) -> ParseError {
        return ParseError("bad Pauli token '" + std::string(tok) + "' at position " + std::to_string(at) + ": " + why);
    };
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) break;
        const std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        std::string_view tok = text.substr(start, pos - start);

        std::size_t k = 0;
        while (k < tok.size() && (tok[k] == '+' || tok[k] == '-' || tok[k] == 'i')) ++k;
        if (k > 0) {
            if (!first) throw fail(tok, start, "sign only allowed before the first factor");
            const std::uint8_t s = detail::parse_sign(tok.substr(0, k));
            if (s == 255) throw fail(tok, start, "malformed sign");
            result.phase = s;
            first = false;
            tok = tok.substr(k);
            if (tok.empty()) continue;
        }
        first = false;

        const char letter = tok[0];
        if (letter != 'X' && letter != 'Y' && letter != 'Z')
            throw fail(tok, start, "expected X, Y or Z");
        std::string_view rest = tok.substr(1);
        std::optional<std::size_t> q;
        auto parse_uint = [&](std::string_view s) -> std::optional<std::size_t> {
            if (s.empty() || s.size() > 9) return std::nullopt;
            std::size_t v = 0;
            for (char c : s) {
                if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
                v = v * 10 + static_cast<std::size_t>(c - '0');
            }
            return v;
        };
        if (!rest.empty() && rest.front() == '[') {
            if (!labeling.is_grid()) throw fail(tok, start, "grid coordinates need a grid labeling");
            const auto comma = rest.find(',');
            if (rest.back() != ']' || comma == std::string_view::npos) throw fail(tok, start, "expected [row,col]");
            auto r = parse_uint(rest.substr(1, comma - 1));
            auto c = parse_uint(rest.substr(comma + 1, rest.size() - comma - 2));
            if (!r || !c) throw fail(tok, start, "expected [row,col]");
            q = labeling.at(*r, *c);
            if (!q) throw fail(tok, start, "no qubit at this site");
        } else {
            if (labeling.is_grid()) throw fail(tok, start, "expected [row,col] coordinates");
            auto idx = parse_uint(rest);
            if (!idx) throw fail(tok, start, "expected a qubit index");
            if (*idx == 0 || *idx > labeling.size()) throw fail(tok, start, "qubit index out of range");
            q = *idx - 1;
        }
        result = multiply(result, PauliOp::single(labeling.size(), *q, letter));
    }
    return result;
}

inline PauliOp pauli_from_string(std::string_view text, std::size_t n) {
    return pauli_from_string(text, Labeling::linear(n));
}

// Inverse of pauli_from_string: factors in qubit order, identity prints as "".
inline std::string to_string(const PauliOp& p, const Labeling& labeling) {
    static constexpr std::array<const char*, 4> signs = {"", "+i ", "-", "-i "};
    std::string out = signs[p.phase];
    bool any = false;
    // Writing a Y factor as "Y" absorbs no phase: the stored word already uses Y.
    for (std::size_t q = 0; q < p.n; ++q) {
        const bool bx = gf2::test(p.x, q), bz = gf2::test(p.z, q);
        if (!bx && !bz) continue;
        if (any) out += ' ';
        out += bx && bz ? 'Y' : (bx ? 'X' : 'Z');
        out += labeling.label(q);
        any = true;
    }
    if (!any && p.phase == 2) out = "-";
    return out;
}

inline std::string to_string(const PauliOp& p) { return to_string(p, Labeling::linear(p.n)); }

struct BasisDecomposition {
    std::vector<std::uint8_t> exponents;
    int sign = 1;
};

inline PauliOp product_in_order(std::span<const PauliOp> basis, std::span<const std::uint8_t> exponents,
                                std::size_t n) {
    PauliOp acc = PauliOp::identity(n);
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (exponents[i]) acc = multiply(acc, basis[i]);
    return acc;
}

// Writes target = sign * prod_i basis[i]^{e_i}, factors multiplied in basis
// order. The sign is read off the explicit product.
inline BasisDecomposition express_in_basis(const PauliOp& target, std::span<const PauliOp> basis) {
    std::vector<gf2::Bits128> vecs;
    vecs.reserve(basis.size());
    for (const auto& b : basis) {
        require_same_size(target, b);
        vecs.push_back(b.symplectic());
    }
    auto sol = gf2::solve<gf2::Bits128>(vecs, target.symplectic());
    if (!sol) throw InfeasibleError("express_in_basis: operator is not in the group generated by the basis");
    const PauliOp prod = product_in_order(basis, *sol, target.n);
    const int diff = (target.phase - prod.phase + 4) % 4;
    if (diff % 2 != 0)
        throw ConsistencyError("express_in_basis: product differs from target by a factor of +-i");
    return BasisDecomposition{std::move(*sol), diff == 0 ? 1 : -1};
}

}  // namespace gaugeforge
