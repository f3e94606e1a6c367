#pragma once

#include <random>
#include <string>
#include <vector>

#include "gaugeforge/extraction.hpp"

namespace gaugeforge::fixtures {

inline PauliOp op(const SubsystemCode& c, const std::string& s) { return pauli_from_string(s, c.labeling()); }

inline std::vector<gf2::Bits128> symplectic(const std::vector<PauliOp>& ops) {
    std::vector<gf2::Bits128> v;
    for (const auto& p : ops) v.push_back(p.symplectic());
    return v;
}

inline bool same_group(const std::vector<PauliOp>& a, const std::vector<PauliOp>& b) {
    auto va = symplectic(a), vb = symplectic(b);
    return gf2::same_span<gf2::Bits128>(va, vb);
}

inline std::string random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    while (true) {
        std::vector<std::string> m(rows, std::string(cols, '0'));
        for (auto& r : m)
            for (auto& ch : r) ch = (rng() % 100) < 55 ? '1' : '0';
        bool ok = true;
        for (auto& r : m) ok = ok && r.find('1') != std::string::npos;
        for (std::size_t c = 0; c < cols; ++c) {
            bool any = false;
            for (auto& r : m) any = any || r[c] == '1';
            ok = ok && any;
        }
        if (!ok) continue;
        std::string s;
        for (auto& r : m) s += r + "\n";
        return s;
    }
}

// Operators written down by hand for the 5x5 code, in the order they appear.
inline ReducedBasis hand_basis_1623(const SubsystemCode& c) {
    auto o = [&](const std::string& s) { return op(c, s); };
    ReducedBasis rb;
    rb.n = c.n;
    const PauliOp x1 = o("X[3,2] X[3,4]"), x2 = o("X[3,2] X[3,5]"), x3 = o("X[2,1] X[2,3]");
    const PauliOp x4 = o("X[2,1] X[2,5]"), x5 = o("X[4,1] X[4,3]"), x6 = o("X[4,1] X[4,5]");
    const PauliOp x7 = o("X[1,2] X[1,5]") * x2 * x4 * x6;
    const PauliOp x8 = o("X[1,4] X[1,5]") * x1 * x2 * x4 * x6;
    rb.aux_pairs = {{x1, o("Z[1,4] Z[3,4]")}, {x2, o("Z[1,5] Z[3,5]")}, {x3, o("Z[2,3] Z[5,3]")},
                    {x4, o("Z[2,5] Z[1,5]")}, {x5, o("Z[4,3] Z[5,3]")}, {x6, o("Z[4,5] Z[1,5]")},
                    {x7, o("Z[5,2] Z[1,2]")}, {x8, o("Z[5,4] Z[1,4]")}};
    auto col = [&](std::size_t j) { return PauliOp::x_type(c.n, c.matrix.col_support(j - 1)); };
    auto row = [&](std::size_t j) { return PauliOp::z_type(c.n, c.matrix.row_support(j - 1)); };
    rb.x_stabilizers = {col(3) * col(1), col(2) * col(5) * col(1), col(5) * col(1) * col(4)};
    rb.z_stabilizers = {row(1) * row(3), row(2) * row(5) * row(1), row(5) * row(1) * row(4)};
    return rb;
}

}  // namespace gaugeforge::fixtures
