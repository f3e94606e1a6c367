#pragma once

// Generalized-Bacon-Shor subsystem codes defined by a binary matrix.
//
// Each nonzero entry of the matrix hosts a physical qubit; qubits are numbered
// in row-major order of the nonzero entries. Rows carry XX gauge generators,
// columns carry ZZ gauge generators.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "gaugeforge/error.hpp"
#include "gaugeforge/gf2.hpp"
#include "gaugeforge/pauli.hpp"

namespace gaugeforge {

class CodeMatrix {
  public:
    CodeMatrix() = default;

    explicit CodeMatrix(gf2::Matrix m) : m_(std::move(m)) {
        if (m_.rows.empty() || m_.cols == 0) throw ParseError("code matrix is empty");
        if (m_.cols > 64 || m_.rows.size() > 64) throw SizeError("code matrix larger than 64x64");
        for (std::size_t r = 0; r < m_.rows.size(); ++r) {
            if (m_.rows[r] == 0) throw ParseError("row " + std::to_string(r + 1) + " of the code matrix is all zero");
            for (std::size_t c = 0; c < m_.cols; ++c) {
                if (m_.at(r, c)) {
                    index_.push_back(static_cast<int>(sites_.size()));
                    sites_.emplace_back(r, c);
                } else {
                    index_.push_back(-1);
                }
            }
        }
        for (std::size_t c = 0; c < m_.cols; ++c)
            if (m_.column(c) == 0) throw ParseError("column " + std::to_string(c + 1) + " of the code matrix is all zero");
        if (sites_.size() > kMaxQubits) throw SizeError("code has more than 63 qubits");
    }

    static CodeMatrix from_rows(const std::vector<std::string>& rows) {
        gf2::Matrix m;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == 0) m.cols = rows[r].size();
            if (rows[r].size() != m.cols) throw ParseError("ragged code matrix rows");
            std::uint64_t v = 0;
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                if (rows[r][c] == '1')
                    v |= gf2::bit(c);
                else if (rows[r][c] != '0')
                    throw ParseError("non-binary entry in code matrix");
            }
            m.rows.push_back(v);
        }
        return CodeMatrix(std::move(m));
    }

    const gf2::Matrix& matrix() const { return m_; }
    std::size_t rows() const { return m_.rows.size(); }
    std::size_t cols() const { return m_.cols; }
    std::size_t qubit_count() const { return sites_.size(); }

    // Qubit at 0-based (row, col), or -1.
    int qubit_at(std::size_t r, std::size_t c) const { return index_[r * m_.cols + c]; }
    std::pair<std::size_t, std::size_t> site(std::size_t q) const { return sites_[q]; }
    const std::vector<std::pair<std::size_t, std::size_t>>& sites() const { return sites_; }

    // Qubits in row r (left to right) / column c (top to bottom).
    std::vector<std::size_t> row_qubits(std::size_t r) const {
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < m_.cols; ++c)
            if (int q = qubit_at(r, c); q >= 0) out.push_back(static_cast<std::size_t>(q));
        return out;
    }
    std::vector<std::size_t> col_qubits(std::size_t c) const {
        std::vector<std::size_t> out;
        for (std::size_t r = 0; r < m_.rows.size(); ++r)
            if (int q = qubit_at(r, c); q >= 0) out.push_back(static_cast<std::size_t>(q));
        return out;
    }

    std::uint64_t row_support(std::size_t r) const { return mask_of(row_qubits(r)); }
    std::uint64_t col_support(std::size_t c) const { return mask_of(col_qubits(c)); }

    Labeling labeling() const { return Labeling::grid(sites_); }

    std::string to_text() const {
        std::string s;
        for (std::size_t r = 0; r < rows(); ++r) {
            s += gf2::to_bitstring(m_.rows[r], m_.cols);
            s += '\n';
        }
        return s;
    }

    friend bool operator==(const CodeMatrix& a, const CodeMatrix& b) { return a.m_ == b.m_; }

  private:
    static std::uint64_t mask_of(const std::vector<std::size_t>& qs) {
        std::uint64_t m = 0;
        for (auto q : qs) m |= gf2::bit(q);
        return m;
    }

    gf2::Matrix m_;
    std::vector<int> index_;
    std::vector<std::pair<std::size_t, std::size_t>> sites_;
};

// Lines of 0/1 characters, optionally whitespace separated; '#' starts a comment.
inline CodeMatrix load_code_matrix(std::string_view text) {
    std::vector<std::string> rows;
    std::vector<std::size_t> line_numbers;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string bits;
        for (char c : line) {
            if (c == '0' || c == '1')
                bits += c;
            else if (!std::isspace(static_cast<unsigned char>(c)))
                throw ParseError("line " + std::to_string(line_no) + ": non-binary character '" + std::string(1, c) +
                                 "'");
        }
        if (bits.empty()) continue;
        if (!rows.empty() && bits.size() != rows.front().size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(rows.front().size()) +
                             " entries, found " + std::to_string(bits.size()));
        rows.push_back(std::move(bits));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw ParseError("code matrix file contains no data lines");
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].find('1') == std::string::npos)
            throw ParseError("line " + std::to_string(line_numbers[r]) + ": all-zero row");
    if (rows.front().size() > 64 || rows.size() > 64) throw ParseError("code matrix larger than 64x64");
    for (std::size_t c = 0; c < rows.front().size(); ++c) {
        bool any = false;
        for (const auto& r : rows) any = any || r[c] == '1';
        if (!any) throw ParseError("column " + std::to_string(c + 1) + " is all zero");
    }
    return CodeMatrix::from_rows(rows);
}

enum class GeneratorSet { NearestNeighbor, AllPairs };

struct GaugeGenerator {
    PauliOp op;
    bool x_type = true;
    std::size_t line = 0;  // row for XX, column for ZZ
    std::size_t q0 = 0, q1 = 0;
};

struct LogicalPair {
    PauliOp x;
    PauliOp z;
};

struct SubsystemCode {
    CodeMatrix matrix;
    std::size_t n = 0;
    std::size_t k = 0;
    std::optional<std::size_t> d;  // empty when too large for exhaustive search
    GeneratorSet generator_set = GeneratorSet::NearestNeighbor;
    std::vector<GaugeGenerator> gauge;  // X-type first (row order), then Z-type (column order)
    std::vector<PauliOp> x_stabilizers;
    std::vector<PauliOp> z_stabilizers;
    std::vector<LogicalPair> logical_pairs;

    std::vector<PauliOp> gauge_ops() const {
        std::vector<PauliOp> out;
        for (const auto& g : gauge) out.push_back(g.op);
        return out;
    }
    std::vector<PauliOp> stabilizers() const {
        auto out = x_stabilizers;
        out.insert(out.end(), z_stabilizers.begin(), z_stabilizers.end());
        return out;
    }
    Labeling labeling() const { return matrix.labeling(); }
};

inline constexpr std::size_t kMaxDistanceLines = 20;

// Minimum nonzero Hamming weight over the row space and the column space.
inline std::size_t distance(const CodeMatrix& cm) {
    if (cm.rows() > kMaxDistanceLines || cm.cols() > kMaxDistanceLines)
        throw SizeError("distance: exhaustive search limited to 20x20 matrices; supply the distance manually");
    auto min_weight = [](const std::vector<std::uint64_t>& vecs) {
        std::size_t best = SIZE_MAX;
        const std::uint64_t count = std::uint64_t{1} << vecs.size();
        for (std::uint64_t mask = 1; mask < count; ++mask) {
            std::uint64_t sum = 0;
            for (std::size_t i = 0; i < vecs.size(); ++i)
                if (gf2::test(mask, i)) sum ^= vecs[i];
            if (sum != 0) best = std::min(best, static_cast<std::size_t>(gf2::popcount(sum)));
        }
        return best;
    };
    const auto& m = cm.matrix();
    return std::min(min_weight(m.rows), min_weight(m.transposed().rows));
}

namespace detail {

inline std::vector<GaugeGenerator> gauge_generators(const CodeMatrix& cm, GeneratorSet set) {
    const std::size_t n = cm.qubit_count();
    std::vector<GaugeGenerator> out;
    auto add_pairs = [&](const std::vector<std::size_t>& qs, bool x_type, std::size_t line) {
        for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
            const std::size_t last = set == GeneratorSet::NearestNeighbor ? i + 1 : qs.size() - 1;
            for (std::size_t j = i + 1; j <= last; ++j) {
                const std::uint64_t s = gf2::bit(qs[i]) | gf2::bit(qs[j]);
                out.push_back({x_type ? PauliOp::x_type(n, s) : PauliOp::z_type(n, s), x_type, line, qs[i], qs[j]});
            }
        }
    };
    for (std::size_t r = 0; r < cm.rows(); ++r) add_pairs(cm.row_qubits(r), true, r);
    for (std::size_t c = 0; c < cm.cols(); ++c) add_pairs(cm.col_qubits(c), false, c);
    return out;
}

// Multiplies op by the element of the group generated by `pool` that
// minimizes weight; ties keep the product with fewer factors.
inline PauliOp reduce_weight(const PauliOp& op, const std::vector<PauliOp>& pool) {
    if (pool.size() > 20) return op;
    PauliOp best = op;
    int best_factors = 0;
    const std::uint64_t count = std::uint64_t{1} << pool.size();
    for (std::uint64_t mask = 1; mask < count; ++mask) {
        PauliOp cand = op;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (gf2::test(mask, i)) cand = multiply(cand, pool[i]);
        const int factors = gf2::popcount(mask);
        if (cand.weight() < best.weight() || (cand.weight() == best.weight() && factors < best_factors)) {
            best = cand;
            best_factors = factors;
        }
    }
    return best;
}

}  // namespace detail

// Symplectic basis of C(G)/G: centralizer of the gauge group, quotiented by
// the gauge group, paired by symplectic Gram-Schmidt, then each operator
// shortened by multiplying in stabilizers of its own type.
inline std::vector<LogicalPair> logical_operators(const SubsystemCode& code) {
    const std::size_t n = code.n;
    // <g, v> = 0 for all g  <=>  (g.z, g.x) . (v.x, v.z) = 0.
    std::vector<gf2::Bits128> constraints;
    for (const auto& g : code.gauge) constraints.push_back({g.op.z, g.op.x});
    std::vector<std::size_t> columns;
    for (std::size_t q = 0; q < n; ++q) columns.push_back(q);
    for (std::size_t q = 0; q < n; ++q) columns.push_back(64 + q);
    auto centralizer = gf2::null_space<gf2::Bits128>(constraints, columns);

    auto to_op = [n](const gf2::Bits128& v) { return PauliOp{n, v.lo, v.hi, 0}; };
    std::vector<PauliOp> cands;
    for (const auto& v : centralizer) cands.push_back(to_op(v));
    // X-type before Z-type, then light before heavy, then by support.
    std::stable_sort(cands.begin(), cands.end(), [](const PauliOp& a, const PauliOp& b) {
        auto key = [](const PauliOp& p) {
            return std::tuple(p.is_x_type() ? 0 : (p.is_z_type() ? 1 : 2), p.weight(), p.x, p.z);
        };
        return key(a) < key(b);
    });

    gf2::EchelonBasis<gf2::Bits128> span(0);
    for (const auto& g : code.gauge) span.insert(g.op.symplectic(), 0);
    std::vector<PauliOp> reps;
    for (const auto& c : cands)
        if (span.insert(c.symplectic(), 0)) reps.push_back(c);
    if (reps.size() != 2 * code.k)
        throw ConsistencyError("logical_operators: found " + std::to_string(reps.size()) +
                               " independent logicals, expected " + std::to_string(2 * code.k));

    std::vector<LogicalPair> pairs;
    while (!reps.empty()) {
        PauliOp v = reps.front();
        reps.erase(reps.begin());
        auto it = std::find_if(reps.begin(), reps.end(), [&](const PauliOp& w) { return !commutes(v, w); });
        if (it == reps.end()) throw ConsistencyError("logical_operators: no anticommuting partner");
        PauliOp w = *it;
        reps.erase(it);
        for (auto& u : reps) {
            const bool fw = !commutes(u, w), fv = !commutes(u, v);
            if (fw) u = multiply(u, v);
            if (fv) u = multiply(u, w);
            u = u.unsigned_word();
        }
        if (v.is_z_type() && !v.is_x_type() && w.is_x_type()) std::swap(v, w);
        pairs.push_back({v, w});
    }

    for (auto& p : pairs) {
        p.x = detail::reduce_weight(p.x, p.x.is_x_type() ? code.x_stabilizers : code.stabilizers());
        p.z = detail::reduce_weight(p.z, p.z.is_z_type() ? code.z_stabilizers : code.stabilizers());
    }
    return pairs;
}

inline SubsystemCode build_code(const CodeMatrix& cm, GeneratorSet set = GeneratorSet::NearestNeighbor) {
    SubsystemCode code;
    code.matrix = cm;
    code.n = cm.qubit_count();
    code.k = gf2::rank(cm.matrix());
    code.generator_set = set;
    if (cm.rows() <= kMaxDistanceLines && cm.cols() <= kMaxDistanceLines) code.d = distance(cm);
    code.gauge = detail::gauge_generators(cm, set);

    // Dependent row sets give Z-type stabilizers, dependent column sets X-type.
    for (std::uint64_t rows : gf2::left_null_space(cm.matrix())) {
        std::uint64_t s = 0;
        for (std::size_t r = 0; r < cm.rows(); ++r)
            if (gf2::test(rows, r)) s |= cm.row_support(r);
        code.z_stabilizers.push_back(PauliOp::z_type(code.n, s));
    }
    for (std::uint64_t cols : gf2::left_null_space(cm.matrix().transposed())) {
        std::uint64_t s = 0;
        for (std::size_t c = 0; c < cm.cols(); ++c)
            if (gf2::test(cols, c)) s |= cm.col_support(c);
        code.x_stabilizers.push_back(PauliOp::x_type(code.n, s));
    }
    code.logical_pairs = logical_operators(code);
    return code;
}

inline SubsystemCode build_code(std::string_view matrix_text, GeneratorSet set = GeneratorSet::NearestNeighbor) {
    return build_code(load_code_matrix(matrix_text), set);
}

// Named matrices used throughout the tests and examples.
namespace presets {
inline constexpr std::string_view k412 = "11\n11\n";
inline constexpr std::string_view k622 = "110\n011\n101\n";
inline constexpr std::string_view k913 = "111\n111\n111\n";
inline constexpr std::string_view k1623 = "01011\n10101\n01011\n10101\n11110\n";

// [[2k+2, k, 2]] family: row i has ones at columns i and i+1 (cyclically).
inline std::string cyclic_family(std::size_t k) {
    const std::size_t m = k + 1;
    std::string s;
    for (std::size_t r = 0; r < m; ++r) {
        std::string row(m, '0');
        row[r] = '1';
        row[(r + 1) % m] = '1';
        s += row + "\n";
    }
    return s;
}
}  // namespace presets

}  // namespace gaugeforge
