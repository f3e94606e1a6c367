#pragma once

// Encoding logical Pauli terms onto one or more code blocks and counting the
// locality of the resulting physical interactions.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gaugeforge/codes.hpp"
#include "gaugeforge/error.hpp"
#include "gaugeforge/pauli.hpp"

namespace gaugeforge {

// Several code blocks side by side; block b occupies physical qubits
// [offset(b), offset(b) + n_b).
class BlockLayout {
  public:
    explicit BlockLayout(std::vector<SubsystemCode> blocks) : blocks_(std::move(blocks)) {
        for (const auto& b : blocks_) {
            offsets_.push_back(total_);
            total_ += b.n;
        }
        if (blocks_.empty()) throw DimensionError("BlockLayout: no blocks");
        if (total_ > kMaxQubits) throw SizeError("BlockLayout: more than 63 physical qubits in total");
    }

    std::size_t block_count() const { return blocks_.size(); }
    const SubsystemCode& block(std::size_t b) const { return blocks_.at(b); }
    std::size_t offset(std::size_t b) const { return offsets_.at(b); }
    std::size_t qubit_count() const { return total_; }

    // Embeds an operator on block b into the full register.
    PauliOp embed(std::size_t b, const PauliOp& local) const {
        return PauliOp{total_, local.x << offsets_[b], local.z << offsets_[b], local.phase};
    }

    Labeling labeling() const {
        if (blocks_.size() == 1) return blocks_[0].labeling();
        return Labeling::linear(total_);
    }

  private:
    std::vector<SubsystemCode> blocks_;
    std::vector<std::size_t> offsets_;
    std::size_t total_ = 0;
};

struct LogicalSlot {
    std::size_t block = 0;
    std::size_t slot = 0;
};

// Logical qubit i lives in slot assignment[i].
using Assignment = std::vector<LogicalSlot>;

struct LogicalFactor {
    std::size_t logical = 0;
    char letter = 'Z';  // X, Y or Z
};

struct EncodedOperator {
    PauliOp op;
    std::size_t weight = 0;
};

inline PauliOp logical_pauli(const SubsystemCode& code, std::size_t slot, char letter) {
    if (slot >= code.logical_pairs.size())
        throw DimensionError("logical slot " + std::to_string(slot) + " out of range for a block with k = " +
                             std::to_string(code.logical_pairs.size()));
    const auto& p = code.logical_pairs[slot];
    switch (letter) {
        case 'X': return p.x;
        case 'Z': return p.z;
        case 'Y': {
            PauliOp y = multiply(p.x, p.z);
            y.phase = static_cast<std::uint8_t>((y.phase + 1) % 4);
            return y;
        }
        default: throw ParseError(std::string("unknown logical Pauli letter '") + letter + "'");
    }
}

// Replaces each logical factor with its block's logical operator. Where two or
// more factors land on the same block the block's part is shortened by
// stabilizer multiplication, which leaves its action on the code space intact.
inline EncodedOperator encode_operator(const BlockLayout& layout, const Assignment& assignment,
                                       const std::vector<LogicalFactor>& factors) {
    std::vector<PauliOp> per_block;
    std::vector<std::size_t> counts(layout.block_count(), 0);
    for (std::size_t b = 0; b < layout.block_count(); ++b) per_block.push_back(PauliOp::identity(layout.block(b).n));
    for (const auto& f : factors) {
        if (f.logical >= assignment.size())
            throw DimensionError("logical qubit " + std::to_string(f.logical) + " has no assignment");
        const auto& slot = assignment[f.logical];
        if (slot.block >= layout.block_count()) throw DimensionError("assignment refers to a missing block");
        per_block[slot.block] = multiply(per_block[slot.block], logical_pauli(layout.block(slot.block), slot.slot, f.letter));
        ++counts[slot.block];
    }
    PauliOp total = PauliOp::identity(layout.qubit_count());
    for (std::size_t b = 0; b < layout.block_count(); ++b) {
        PauliOp local = per_block[b];
        if (counts[b] >= 2) {
            const auto& code = layout.block(b);
            const auto& pool = local.is_x_type()   ? code.x_stabilizers
                               : local.is_z_type() ? code.z_stabilizers
                                                   : code.stabilizers();
            local = detail::reduce_weight(local, pool);
        }
        total = multiply(total, layout.embed(b, local));
    }
    return {total, total.weight()};
}

struct IsingProblem {
    std::vector<double> h;                                      // Z fields
    std::vector<double> transverse;                             // X fields (optional)
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> couplings;  // (i, j) -> J_ij
};

struct EncodedTerm {
    std::string label;  // logical term, e.g. "Z1 Z2"
    double coefficient = 0.0;
    PauliOp op;
    std::size_t weight = 0;
};

struct LocalityStats {
    std::map<std::size_t, std::size_t> by_weight;
    std::size_t count(std::size_t w) const {
        auto it = by_weight.find(w);
        return it == by_weight.end() ? 0 : it->second;
    }
    std::size_t max_weight() const { return by_weight.empty() ? 0 : by_weight.rbegin()->first; }
};

struct EncodedIsing {
    std::vector<EncodedTerm> terms;
    LocalityStats stats;
};

// Encodes sum_i h_i Z_i + sum_i g_i X_i + sum_{ij} J_ij Z_i Z_j; zero
// coefficients are skipped. Terms come out fields first, then couplings, in
// input order.
inline EncodedIsing encode_ising(const IsingProblem& problem, const BlockLayout& layout, const Assignment& assignment) {
    EncodedIsing out;
    auto add = [&](std::string label, double c, const std::vector<LogicalFactor>& fs) {
        if (c == 0.0) return;
        auto enc = encode_operator(layout, assignment, fs);
        ++out.stats.by_weight[enc.weight];
        out.terms.push_back({std::move(label), c, enc.op, enc.weight});
    };
    for (std::size_t i = 0; i < problem.h.size(); ++i)
        add("Z" + std::to_string(i + 1), problem.h[i], {{i, 'Z'}});
    for (std::size_t i = 0; i < problem.transverse.size(); ++i)
        add("X" + std::to_string(i + 1), problem.transverse[i], {{i, 'X'}});
    for (const auto& [ij, c] : problem.couplings) {
        if (ij.first == ij.second) throw DimensionError("coupling J_ii is not a two-qubit term");
        add("Z" + std::to_string(ij.first + 1) + " Z" + std::to_string(ij.second + 1), c,
            {{ij.first, 'Z'}, {ij.second, 'Z'}});
    }
    return out;
}

}  // namespace gaugeforge
