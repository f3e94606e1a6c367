#pragma once

// Linear algebra over GF(2) on bit-packed rows.
//
// Rows are either std::uint64_t (vectors of length <= 64) or Bits128
// (symplectic vectors: X part in the low word, Z part in the high word).
// All routines are templates over the row type so the same elimination
// code serves code matrices and Pauli operators.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaugeforge/error.hpp"

namespace gaugeforge::gf2 {

struct Bits128 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    constexpr Bits128& operator^=(const Bits128& o) {
        lo ^= o.lo;
        hi ^= o.hi;
        return *this;
    }
    friend constexpr Bits128 operator^(Bits128 a, const Bits128& b) { return a ^= b; }
    friend constexpr Bits128 operator&(const Bits128& a, const Bits128& b) {
        return {a.lo & b.lo, a.hi & b.hi};
    }
    friend constexpr bool operator==(const Bits128&, const Bits128&) = default;
    friend constexpr auto operator<=>(const Bits128& a, const Bits128& b) {
        if (a.hi != b.hi) return a.hi <=> b.hi;
        return a.lo <=> b.lo;
    }
};

constexpr bool is_zero(std::uint64_t v) { return v == 0; }
constexpr bool is_zero(const Bits128& v) { return v.lo == 0 && v.hi == 0; }

constexpr bool test(std::uint64_t v, std::size_t i) { return (v >> i) & 1u; }
constexpr bool test(const Bits128& v, std::size_t i) {
    return i < 64 ? ((v.lo >> i) & 1u) : ((v.hi >> (i - 64)) & 1u);
}

// Index of the lowest set bit; v must be nonzero.
constexpr std::size_t lowest_bit(std::uint64_t v) { return static_cast<std::size_t>(std::countr_zero(v)); }
constexpr std::size_t lowest_bit(const Bits128& v) {
    return v.lo ? static_cast<std::size_t>(std::countr_zero(v.lo))
                : 64 + static_cast<std::size_t>(std::countr_zero(v.hi));
}

constexpr int popcount(std::uint64_t v) { return std::popcount(v); }
constexpr int popcount(const Bits128& v) { return std::popcount(v.lo) + std::popcount(v.hi); }

constexpr void set_bit(std::uint64_t& v, std::size_t i) { v |= std::uint64_t{1} << i; }
constexpr void set_bit(Bits128& v, std::size_t i) {
    if (i < 64)
        v.lo |= std::uint64_t{1} << i;
    else
        v.hi |= std::uint64_t{1} << (i - 64);
}

constexpr std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

// Rectangular binary matrix with at most 64 columns; column j is bit j.
struct Matrix {
    std::size_t cols = 0;
    std::vector<std::uint64_t> rows;

    std::size_t row_count() const { return rows.size(); }
    bool at(std::size_t r, std::size_t c) const { return test(rows[r], c); }

    Matrix transposed() const {
        Matrix t;
        t.cols = rows.size();
        t.rows.assign(cols, 0);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (at(r, c)) t.rows[c] |= bit(r);
        return t;
    }

    std::uint64_t column(std::size_t c) const {
        std::uint64_t v = 0;
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (at(r, c)) v |= bit(r);
        return v;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

template <class Row>
std::size_t rank(std::vector<Row> rows) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        // Reduce row i against the pivots found so far (stored in rows[0..r)).
        Row v = rows[i];
        for (std::size_t p = 0; p < r; ++p) {
            const std::size_t pb = lowest_bit(rows[p]);
            if (test(v, pb)) v ^= rows[p];
        }
        if (is_zero(v)) continue;
        // Keep the pivot basis fully reduced so pivot bits stay unique.
        const std::size_t nb = lowest_bit(v);
        for (std::size_t p = 0; p < r; ++p)
            if (test(rows[p], nb)) rows[p] ^= v;
        rows[r++] = v;
    }
    return r;
}

inline std::size_t rank(const Matrix& m) { return m.rows.empty() ? 0 : rank(m.rows); }

template <class Row>
bool independent(std::span<const Row> rows) {
    return rank(std::vector<Row>(rows.begin(), rows.end())) == rows.size();
}

// Incremental echelon basis that remembers which inputs produced each pivot.
template <class Row>
class EchelonBasis {
  public:
    explicit EchelonBasis(std::size_t input_count = 0) : input_count_(input_count) {}

    // Adds v (tagged as input `index`). Returns false if v was already in the span.
    bool insert(Row v, std::size_t index) {
        std::vector<std::uint8_t> combo(input_count_, 0);
        if (index < input_count_) combo[index] = 1;
        reduce(v, combo);
        if (is_zero(v)) return false;
        const std::size_t nb = lowest_bit(v);
        for (std::size_t p = 0; p < pivots_.size(); ++p) {
            if (test(pivots_[p], nb)) {
                pivots_[p] ^= v;
                xor_into(combos_[p], combo);
            }
        }
        pivots_.push_back(v);
        combos_.push_back(std::move(combo));
        return true;
    }

    bool contains(Row v) const {
        std::vector<std::uint8_t> combo(input_count_, 0);
        reduce(v, combo);
        return is_zero(v);
    }

    // Coefficients over the inserted inputs reproducing v, if v is in the span.
    std::optional<std::vector<std::uint8_t>> solve(Row v) const {
        std::vector<std::uint8_t> combo(input_count_, 0);
        reduce(v, combo);
        if (!is_zero(v)) return std::nullopt;
        return combo;
    }

    std::size_t size() const { return pivots_.size(); }

  private:
    static void xor_into(std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
    }

    void reduce(Row& v, std::vector<std::uint8_t>& combo) const {
        for (std::size_t p = 0; p < pivots_.size(); ++p) {
            if (test(v, lowest_bit(pivots_[p]))) {
                v ^= pivots_[p];
                xor_into(combo, combos_[p]);
            }
        }
    }

    std::size_t input_count_;
    std::vector<Row> pivots_;
    std::vector<std::vector<std::uint8_t>> combos_;
};

// Coefficients c with sum_i c_i * vecs[i] == target, or nullopt.
template <class Row>
std::optional<std::vector<std::uint8_t>> solve(std::span<const Row> vecs, const Row& target) {
    EchelonBasis<Row> basis(vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) basis.insert(vecs[i], i);
    return basis.solve(target);
}

template <class Row>
bool in_span(std::span<const Row> vecs, const Row& target) {
    return solve(vecs, target).has_value();
}

template <class Row>
bool same_span(std::span<const Row> a, std::span<const Row> b) {
    EchelonBasis<Row> ea(a.size()), eb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ea.insert(a[i], i);
    for (std::size_t i = 0; i < b.size(); ++i) eb.insert(b[i], i);
    if (ea.size() != eb.size()) return false;
    return std::all_of(a.begin(), a.end(), [&](const Row& v) { return eb.contains(v); });
}

// Basis of { c in GF(2)^rows : sum_i c_i * m.rows[i] == 0 }, one vector per
// free input, each as a bitmask over row indices. Requires rows <= 64.
inline std::vector<std::uint64_t> left_null_space(const Matrix& m) {
    if (m.rows.size() > 64) throw SizeError("left_null_space: more than 64 rows");
    EchelonBasis<std::uint64_t> basis(m.rows.size());
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        auto combo = basis.solve(m.rows[i]);
        if (combo) {
            std::uint64_t mask = bit(i);
            for (std::size_t j = 0; j < combo->size(); ++j)
                if ((*combo)[j]) mask |= bit(j);
            out.push_back(mask);
        } else {
            basis.insert(m.rows[i], i);
        }
    }
    return out;
}

// Basis of { v : <row, v> = 0 for every row }, restricted to the listed
// column positions. One basis vector per free column, in column order.
template <class Row>
std::vector<Row> null_space(std::vector<Row> rows, std::span<const std::size_t> columns) {
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t col : columns) {
        std::size_t sel = r;
        while (sel < rows.size() && !test(rows[sel], col)) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && test(rows[i], col)) rows[i] ^= rows[r];
        pivot_col.push_back(col);
        ++r;
    }
    std::vector<Row> out;
    for (std::size_t col : columns) {
        if (std::find(pivot_col.begin(), pivot_col.end(), col) != pivot_col.end()) continue;
        Row v{};
        set_bit(v, col);
        for (std::size_t p = 0; p < pivot_col.size(); ++p)
            if (test(rows[p], col)) set_bit(v, pivot_col[p]);
        out.push_back(v);
    }
    return out;
}

// Smallest index set S (by size, then lexicographically) whose candidates sum
// to target. Exhaustive; intended for the handful of rows of a code matrix.
template <class Row>
std::vector<std::size_t> minimal_dependent_cover(const Row& target, std::span<const Row> candidates) {
    if (!in_span(candidates, target))
        throw InfeasibleError("minimal_dependent_cover: target is not in the span of the candidates");
    if (is_zero(target)) return {};
    const std::size_t m = candidates.size();
    std::vector<std::size_t> idx;
    for (std::size_t size = 1; size <= m; ++size) {
        idx.resize(size);
        for (std::size_t i = 0; i < size; ++i) idx[i] = i;
        while (true) {
            Row sum{};
            for (std::size_t i : idx) sum ^= candidates[i];
            if (sum == target) return idx;
            // Next combination in lexicographic order.
            std::size_t i = size;
            while (i > 0 && idx[i - 1] == m - size + (i - 1)) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    throw ConsistencyError("minimal_dependent_cover: span check passed but no subset found");
}

inline std::string to_bitstring(std::uint64_t v, std::size_t len) {
    std::string s(len, '0');
    for (std::size_t i = 0; i < len; ++i)
        if (test(v, i)) s[i] = '1';
    return s;
}

}  // namespace gaugeforge::gf2
