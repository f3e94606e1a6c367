#pragma once

// Rewrites the gauge group of a generalized-Bacon-Shor code as stabilizers
// plus auxiliary qubits: pairs (X_j, Z_j) obeying the canonical commutation
// relations. Three stages: dependent rows, dependent columns, then whatever
// pairs remain in the independent core.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gaugeforge/codes.hpp"
#include "gaugeforge/error.hpp"
#include "gaugeforge/gf2.hpp"
#include "gaugeforge/pauli.hpp"

namespace gaugeforge {

enum class Stage { Row, Column, Core };

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::Row: return "row";
        case Stage::Column: return "column";
        default: return "core";
    }
}

struct Provenance {
    std::string role;    // x_stabilizer, z_stabilizer, aux_x, aux_z
    std::size_t index = 0;
    Stage stage = Stage::Row;
    std::string source;  // matrix lines involved, e.g. "r2 r5 r1"
    std::vector<std::size_t> corrections;  // aux pairs multiplied in
};

struct AuxPair {
    PauliOp x;
    PauliOp z;
};

struct ReducedBasis {
    std::size_t n = 0;
    std::vector<PauliOp> x_stabilizers;
    std::vector<PauliOp> z_stabilizers;
    std::vector<AuxPair> aux_pairs;
    std::vector<Provenance> provenance;

    std::vector<PauliOp> stabilizers() const {
        auto out = x_stabilizers;
        out.insert(out.end(), z_stabilizers.begin(), z_stabilizers.end());
        return out;
    }
    // Stabilizers (X then Z), then aux X_1..X_a, then aux Z_1..Z_a.
    std::vector<PauliOp> ordered_basis() const {
        auto out = stabilizers();
        for (const auto& p : aux_pairs) out.push_back(p.x);
        for (const auto& p : aux_pairs) out.push_back(p.z);
        return out;
    }
};

namespace detail {

inline std::string line_labels(char prefix, const std::vector<std::size_t>& lines) {
    std::string s;
    for (std::size_t l : lines) {
        if (!s.empty()) s += ' ';
        s += prefix + std::to_string(l + 1);
    }
    return s;
}

class Extractor {
  public:
    explicit Extractor(const CodeMatrix& cm) : cm_(cm) {
        rb_.n = cm.qubit_count();
        for (std::size_t r = 0; r < cm.rows(); ++r) rows_.push_back(r);
        for (std::size_t c = 0; c < cm.cols(); ++c) cols_.push_back(c);
    }

    void rows_stage() {
        std::vector<std::size_t> cur{rows_.front()};
        while (!lines_independent(rows_, true)) {
            std::vector<std::size_t> cand;
            // Rotate until the rows under consideration can be closed into a dependency.
            for (std::size_t guard = 0;; ++guard) {
                if (guard > rows_.size()) throw ConsistencyError("row extraction: no dependent set found");
                cand = minus(rows_, cur);
                if (in_span_lines(sum_lines(cur, true), cand, true)) break;
                rotate_to_end(rows_, cur);
                cur = {rows_.front()};
            }
            std::vector<std::uint64_t> vecs;
            for (std::size_t r : cand) vecs.push_back(row_vector(r));
            auto pick = gf2::minimal_dependent_cover<std::uint64_t>(sum_lines(cur, true), vecs);
            std::vector<std::size_t> added;
            for (std::size_t i : pick) added.push_back(cand[i]);
            // Added rows go on top, in their current order, above the old set.
            std::vector<std::size_t> next = added;
            next.insert(next.end(), cur.begin(), cur.end());
            std::vector<std::size_t> order = next;
            for (std::size_t r : rows_)
                if (std::find(next.begin(), next.end(), r) == next.end()) order.push_back(r);
            rows_ = order;
            cur = next;

            std::uint64_t stab = 0;
            for (std::size_t r : cur) stab ^= cm_.row_support(r);
            push_stabilizer(PauliOp::z_type(rb_.n, stab), "z_stabilizer", Stage::Row, line_labels('r', cur));

            const std::size_t top = cur.front();
            const auto qs = current_row_qubits(top);
            std::vector<PauliOp> xs, zs;
            for (std::size_t j = 1; j < qs.size(); ++j) {
                xs.push_back(PauliOp::x_type(rb_.n, gf2::bit(qs[0]) | gf2::bit(qs[j])));
                const std::size_t c = cm_.site(qs[j]).second;
                int below = -1;
                for (std::size_t i = 1; i < cur.size() && below < 0; ++i) below = cm_.qubit_at(cur[i], c);
                if (below < 0) throw ConsistencyError("row extraction: no qubit below in the dependent set");
                zs.push_back(PauliOp::z_type(rb_.n, gf2::bit(qs[j]) | gf2::bit(static_cast<std::size_t>(below))));
            }
            add_pairs(xs, zs, Stage::Row, line_labels('r', {top}));

            cur.erase(cur.begin());
            rows_.erase(std::find(rows_.begin(), rows_.end(), top));
        }
    }

    void columns_stage() {
        if (cols_.empty()) return;
        std::vector<std::size_t> cur{cols_.front()};
        while (!lines_independent(cols_, false)) {
            std::vector<std::size_t> cand;
            for (std::size_t guard = 0;; ++guard) {
                if (guard > cols_.size()) throw ConsistencyError("column extraction: no dependent set found");
                cand = minus(cols_, cur);
                if (in_span_lines(sum_lines(cur, false), cand, false)) break;
                rotate_to_end(cols_, cur);
                cur = {cols_.front()};
            }
            std::vector<std::uint64_t> vecs;
            for (std::size_t c : cand) vecs.push_back(col_vector(c));
            auto pick = gf2::minimal_dependent_cover<std::uint64_t>(sum_lines(cur, false), vecs);
            std::vector<std::size_t> next;
            for (std::size_t i : pick) next.push_back(cand[i]);
            next.insert(next.end(), cur.begin(), cur.end());
            std::vector<std::size_t> order = next;
            for (std::size_t c : cols_)
                if (std::find(next.begin(), next.end(), c) == next.end()) order.push_back(c);
            cols_ = order;
            cur = next;

            // Full columns of the original matrix.
            std::uint64_t stab = 0;
            for (std::size_t c : cur) stab ^= cm_.col_support(c);
            push_stabilizer(PauliOp::x_type(rb_.n, stab), "x_stabilizer", Stage::Column, line_labels('c', cur));

            const std::size_t left = cur.front();
            const auto qs = current_col_qubits(left);
            std::vector<PauliOp> xs, zs;
            for (std::size_t j = 1; j < qs.size(); ++j) {
                zs.push_back(PauliOp::z_type(rb_.n, gf2::bit(qs[0]) | gf2::bit(qs[j])));
                const std::size_t r = cm_.site(qs[j]).first;
                int right = -1;
                for (std::size_t i = 1; i < cur.size() && right < 0; ++i) right = cm_.qubit_at(r, cur[i]);
                if (right < 0) throw ConsistencyError("column extraction: no qubit to the right in the dependent set");
                xs.push_back(PauliOp::x_type(rb_.n, gf2::bit(qs[j]) | gf2::bit(static_cast<std::size_t>(right))));
            }
            add_pairs(xs, zs, Stage::Column, line_labels('c', {left}));

            cur.erase(cur.begin());
            cols_.erase(std::find(cols_.begin(), cols_.end(), left));
        }
    }

    void core_stage() {
        std::vector<PauliOp> xs, zs;
        for (std::size_t c : cols_) {
            const auto qs = current_col_qubits(c);
            for (std::size_t j = 0; j + 1 < qs.size(); ++j)
                zs.push_back(PauliOp::z_type(rb_.n, gf2::bit(qs[j]) | gf2::bit(qs[j + 1])));
        }
        for (std::size_t r : rows_) {
            const auto qs = current_row_qubits(r);
            for (std::size_t j = 0; j + 1 < qs.size(); ++j)
                xs.push_back(PauliOp::x_type(rb_.n, gf2::bit(qs[j]) | gf2::bit(qs[j + 1])));
        }
        if (xs.size() != zs.size()) throw ConsistencyError("core extraction: unequal numbers of row and column pairs");
        add_pairs(xs, zs, Stage::Core, "core");
    }

    ReducedBasis take() { return std::move(rb_); }

    // Current (reduced) matrix, lines in their current order.
    std::vector<std::size_t> current_rows() const { return rows_; }
    std::vector<std::size_t> current_cols() const { return cols_; }

  private:
    std::uint64_t row_vector(std::size_t r) const {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < cols_.size(); ++i)
            if (cm_.matrix().at(r, cols_[i])) v |= gf2::bit(i);
        return v;
    }
    std::uint64_t col_vector(std::size_t c) const {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (cm_.matrix().at(rows_[i], c)) v |= gf2::bit(i);
        return v;
    }
    std::uint64_t line_vector(std::size_t l, bool row) const { return row ? row_vector(l) : col_vector(l); }

    std::uint64_t sum_lines(const std::vector<std::size_t>& ls, bool row) const {
        std::uint64_t v = 0;
        for (std::size_t l : ls) v ^= line_vector(l, row);
        return v;
    }
    bool in_span_lines(std::uint64_t target, const std::vector<std::size_t>& ls, bool row) const {
        std::vector<std::uint64_t> vecs;
        for (std::size_t l : ls) vecs.push_back(line_vector(l, row));
        return gf2::in_span<std::uint64_t>(vecs, target);
    }
    bool lines_independent(const std::vector<std::size_t>& ls, bool row) const {
        std::vector<std::uint64_t> vecs;
        for (std::size_t l : ls) vecs.push_back(line_vector(l, row));
        return gf2::independent<std::uint64_t>(vecs);
    }

    static std::vector<std::size_t> minus(const std::vector<std::size_t>& all, const std::vector<std::size_t>& drop) {
        std::vector<std::size_t> out;
        for (std::size_t l : all)
            if (std::find(drop.begin(), drop.end(), l) == drop.end()) out.push_back(l);
        return out;
    }
    static void rotate_to_end(std::vector<std::size_t>& order, const std::vector<std::size_t>& moved) {
        auto rest = minus(order, moved);
        rest.insert(rest.end(), moved.begin(), moved.end());
        order = rest;
    }

    // Qubits of a row restricted to the remaining columns, in current column order.
    std::vector<std::size_t> current_row_qubits(std::size_t r) const {
        std::vector<std::size_t> out;
        for (std::size_t c : cols_)
            if (int q = cm_.qubit_at(r, c); q >= 0) out.push_back(static_cast<std::size_t>(q));
        return out;
    }
    std::vector<std::size_t> current_col_qubits(std::size_t c) const {
        std::vector<std::size_t> out;
        for (std::size_t r : rows_)
            if (int q = cm_.qubit_at(r, c); q >= 0) out.push_back(static_cast<std::size_t>(q));
        return out;
    }

    void push_stabilizer(const PauliOp& s, const char* role, Stage stage, std::string source) {
        auto& list = s.is_x_type() ? rb_.x_stabilizers : rb_.z_stabilizers;
        rb_.provenance.push_back({role, list.size(), stage, std::move(source), {}});
        list.push_back(s);
    }

    // Makes the new operators commute with every existing pair by multiplying
    // in partners, then fixes up the new block so it is canonical.
    void add_pairs(std::vector<PauliOp> xs, std::vector<PauliOp> zs, Stage stage, const std::string& source) {
        if (xs.size() != zs.size()) throw ConsistencyError("extraction: unbalanced auxiliary operators");
        const std::size_t base = rb_.aux_pairs.size();
        std::vector<std::vector<std::size_t>> xfix(xs.size()), zfix(zs.size());
        for (std::size_t i = 0; i < zs.size(); ++i)
            for (std::size_t m = 0; m < base; ++m)
                if (!commutes(zs[i], rb_.aux_pairs[m].x)) {
                    zs[i] = zs[i] * rb_.aux_pairs[m].z;
                    zfix[i].push_back(m);
                }
        for (std::size_t j = 0; j < xs.size(); ++j)
            for (std::size_t m = 0; m < base; ++m)
                if (!commutes(xs[j], rb_.aux_pairs[m].z)) {
                    xs[j] = xs[j] * rb_.aux_pairs[m].x;
                    xfix[j].push_back(m);
                }
        const std::size_t a = xs.size();
        std::vector<std::uint64_t> gram(a, 0);
        bool canonical = true;
        for (std::size_t j = 0; j < a; ++j)
            for (std::size_t i = 0; i < a; ++i) {
                if (!commutes(xs[j], zs[i])) gram[j] |= gf2::bit(i);
                if ((i == j) != !commutes(xs[j], zs[i])) canonical = false;
            }
        if (!canonical) {
            // Recombine the X operators so that X_j anticommutes with Z_j only.
            std::vector<PauliOp> fixed;
            for (std::size_t j = 0; j < a; ++j) {
                auto combo = gf2::solve<std::uint64_t>(gram, gf2::bit(j));
                if (!combo) throw ConsistencyError("extraction: auxiliary operators have no canonical partner");
                PauliOp p = PauliOp::identity(rb_.n);
                for (std::size_t l = 0; l < a; ++l)
                    if ((*combo)[l]) p = p * xs[l];
                fixed.push_back(p);
            }
            xs = fixed;
        }
        for (std::size_t j = 0; j < a; ++j) {
            const std::size_t idx = rb_.aux_pairs.size();
            rb_.provenance.push_back({"aux_x", idx, stage, source, xfix[j]});
            rb_.provenance.push_back({"aux_z", idx, stage, source, zfix[j]});
            rb_.aux_pairs.push_back({xs[j], zs[j]});
        }
    }

    const CodeMatrix& cm_;
    ReducedBasis rb_;
    std::vector<std::size_t> rows_, cols_;
};

}  // namespace detail

inline ReducedBasis extract_reduced_basis(const CodeMatrix& cm) {
    detail::Extractor ex(cm);
    ex.rows_stage();
    ex.columns_stage();
    ex.core_stage();
    return ex.take();
}

struct VerificationReport {
    bool commutation = true;
    bool decomposition = true;
    bool membership = true;
    bool counts = true;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

inline VerificationReport verify_reduced_basis(const SubsystemCode& code, const ReducedBasis& rb) {
    VerificationReport rep;
    const Labeling lab = code.labeling();
    auto fail = [&](bool& flag, std::string msg) {
        flag = false;
        rep.violations.push_back(std::move(msg));
    };

    if (rb.n != code.n) {
        fail(rep.counts, "basis acts on " + std::to_string(rb.n) + " qubits, code has " + std::to_string(code.n));
        return rep;
    }
    const std::size_t mr = code.matrix.rows(), mc = code.matrix.cols();
    const std::size_t zc = mr - code.k, xc = mc - code.k;
    const std::size_t ac = code.n - zc - xc - code.k;
    if (rb.z_stabilizers.size() != zc)
        fail(rep.counts, "expected " + std::to_string(zc) + " Z-type stabilizers, got " + std::to_string(rb.z_stabilizers.size()));
    if (rb.x_stabilizers.size() != xc)
        fail(rep.counts, "expected " + std::to_string(xc) + " X-type stabilizers, got " + std::to_string(rb.x_stabilizers.size()));
    if (rb.aux_pairs.size() != ac)
        fail(rep.counts, "expected " + std::to_string(ac) + " auxiliary pairs, got " + std::to_string(rb.aux_pairs.size()));

    const auto stabs = rb.stabilizers();
    for (std::size_t i = 0; i < stabs.size(); ++i) {
        for (std::size_t j = i + 1; j < stabs.size(); ++j)
            if (!commutes(stabs[i], stabs[j]))
                fail(rep.commutation, "stabilizers " + to_string(stabs[i], lab) + " and " + to_string(stabs[j], lab) + " anticommute");
        for (std::size_t a = 0; a < rb.aux_pairs.size(); ++a)
            for (const auto* p : {&rb.aux_pairs[a].x, &rb.aux_pairs[a].z})
                if (!commutes(stabs[i], *p))
                    fail(rep.commutation, "stabilizer " + to_string(stabs[i], lab) + " anticommutes with aux pair " + std::to_string(a + 1));
    }
    for (std::size_t a = 0; a < rb.aux_pairs.size(); ++a)
        for (std::size_t b = 0; b < rb.aux_pairs.size(); ++b) {
            const auto& A = rb.aux_pairs[a];
            const auto& B = rb.aux_pairs[b];
            if (commutes(A.x, B.z) != (a != b))
                fail(rep.commutation, "aux X" + std::to_string(a + 1) + " and aux Z" + std::to_string(b + 1) +
                                          (a == b ? " commute" : " anticommute"));
            if (a < b && (!commutes(A.x, B.x) || !commutes(A.z, B.z)))
                fail(rep.commutation, "aux pairs " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " do not commute");
        }

    const auto basis = rb.ordered_basis();
    for (const auto& g : code.gauge) {
        try {
            auto dec = express_in_basis(g.op, basis);
            if (dec.sign != 1) fail(rep.decomposition, "gauge generator " + to_string(g.op, lab) + " decomposes with sign -1");
        } catch (const InfeasibleError&) {
            fail(rep.decomposition, "gauge generator " + to_string(g.op, lab) + " is not generated by the basis");
        } catch (const ConsistencyError&) {
            fail(rep.decomposition, "gauge generator " + to_string(g.op, lab) + " decomposes only up to a factor of i");
        }
    }
    std::vector<gf2::Bits128> gauge;
    for (const auto& g : code.gauge) gauge.push_back(g.op.symplectic());
    for (const auto& b : basis)
        if (!gf2::in_span<gf2::Bits128>(gauge, b.symplectic()))
            fail(rep.membership, to_string(b, lab) + " is not in the gauge group");
    return rep;
}

}  // namespace gaugeforge
