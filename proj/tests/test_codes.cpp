#include <random>

#include <gtest/gtest.h>

#include "gaugeforge/codes.hpp"

using namespace gaugeforge;

namespace {

PauliOp op(const SubsystemCode& c, const char* s) { return pauli_from_string(s, c.labeling()); }

std::vector<gf2::Bits128> symplectic(const std::vector<PauliOp>& ops) {
    std::vector<gf2::Bits128> v;
    for (const auto& p : ops) v.push_back(p.symplectic());
    return v;
}

bool in_group(const std::vector<PauliOp>& gens, const PauliOp& p) {
    return gf2::in_span<gf2::Bits128>(symplectic(gens), p.symplectic());
}

// Random valid matrix: no zero rows or columns.
std::string random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    while (true) {
        std::vector<std::string> m(rows, std::string(cols, '0'));
        for (auto& r : m)
            for (auto& c : r) c = (rng() % 100) < 55 ? '1' : '0';
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

void check_code_invariants(const SubsystemCode& code) {
    const auto gauge = code.gauge_ops();
    for (const auto& s : code.stabilizers()) {
        for (const auto& g : gauge) EXPECT_TRUE(commutes(s, g));
        EXPECT_TRUE(in_group(gauge, s));
    }
    ASSERT_EQ(code.logical_pairs.size(), code.k);
    for (std::size_t i = 0; i < code.k; ++i) {
        const auto& a = code.logical_pairs[i];
        EXPECT_FALSE(commutes(a.x, a.z));
        for (const auto& g : gauge) {
            EXPECT_TRUE(commutes(a.x, g));
            EXPECT_TRUE(commutes(a.z, g));
        }
        EXPECT_FALSE(in_group(gauge, a.x));
        EXPECT_FALSE(in_group(gauge, a.z));
        for (std::size_t j = 0; j < code.k; ++j) {
            if (i == j) continue;
            const auto& b = code.logical_pairs[j];
            EXPECT_TRUE(commutes(a.x, b.x));
            EXPECT_TRUE(commutes(a.x, b.z));
            EXPECT_TRUE(commutes(a.z, b.z));
        }
    }
}

}  // namespace

TEST(LoadCodeMatrix, Formats) {
    const auto m412 = load_code_matrix("11\n11");
    EXPECT_EQ(m412.qubit_count(), 4u);
    const auto m622 = load_code_matrix("# Bravyi\n1 1 0\n0 1 1\n1 0 1\n");
    EXPECT_EQ(m622.qubit_count(), 6u);
    EXPECT_EQ(m622.qubit_at(2, 0), 4);
    const auto diag = load_code_matrix("10\n01");
    EXPECT_EQ(diag.qubit_count(), 2u);
    EXPECT_EQ(build_code(diag).k, 2u);
}

TEST(LoadCodeMatrix, Errors) {
    auto msg = [](const char* text) {
        try {
            load_code_matrix(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(msg("11\n1\n").find("line 2"), std::string::npos);
    EXPECT_NE(msg("11\n12\n").find("line 2"), std::string::npos);
    EXPECT_NE(msg("11\n00\n").find("line 2"), std::string::npos);
    EXPECT_NE(msg("10\n10\n").find("column 2"), std::string::npos);
    EXPECT_NE(msg("# nothing\n").find("no data"), std::string::npos);
}

TEST(BuildCode, Code412) {
    const auto code = build_code(presets::k412);
    EXPECT_EQ(code.n, 4u);
    EXPECT_EQ(code.k, 1u);
    EXPECT_EQ(code.d, 2u);
    const auto& l = code.labeling();
    std::vector<std::string> gens;
    for (const auto& g : code.gauge) gens.push_back(to_string(g.op, l));
    EXPECT_EQ(gens, (std::vector<std::string>{"X[1,1] X[1,2]", "X[2,1] X[2,2]", "Z[1,1] Z[2,1]", "Z[1,2] Z[2,2]"}));
    ASSERT_EQ(code.x_stabilizers.size(), 1u);
    ASSERT_EQ(code.z_stabilizers.size(), 1u);
    EXPECT_EQ(code.x_stabilizers[0], op(code, "X[1,1] X[1,2] X[2,1] X[2,2]"));
    EXPECT_EQ(code.z_stabilizers[0], op(code, "Z[1,1] Z[1,2] Z[2,1] Z[2,2]"));
    // Canonical logicals coincide with the usual hand choice here.
    EXPECT_EQ(code.logical_pairs[0].x, op(code, "X[1,1] X[2,1]"));
    EXPECT_EQ(code.logical_pairs[0].z, op(code, "Z[1,1] Z[1,2]"));
    check_code_invariants(code);
}

TEST(BuildCode, Code622) {
    const auto code = build_code(presets::k622);
    EXPECT_EQ(code.n, 6u);
    EXPECT_EQ(code.k, 2u);
    EXPECT_EQ(code.d, 2u);
    EXPECT_EQ(code.gauge.size(), 6u);
    const auto g = code.gauge_ops();
    ASSERT_EQ(code.x_stabilizers.size(), 1u);
    EXPECT_EQ(code.x_stabilizers[0], g[0] * g[1] * g[2]);
    EXPECT_EQ(code.z_stabilizers[0], g[3] * g[4] * g[5]);
    check_code_invariants(code);

    // The textbook logicals, up to gauge multiplication.
    const std::vector<LogicalPair> hand{{op(code, "X[2,3] X[3,3]"), op(code, "Z[3,1] Z[3,3]")},
                                         {op(code, "X[1,2] X[2,2]"), op(code, "Z[1,1] Z[1,2]")}};
    auto equivalent = [&](const PauliOp& a, const PauliOp& b) { return in_group(g, a * b); };
    // Our pairs span the same logical algebra: each hand-picked operator equals a
    // product of our logicals times a gauge element.
    std::vector<PauliOp> ours_and_gauge = g;
    for (const auto& p : code.logical_pairs) {
        ours_and_gauge.push_back(p.x);
        ours_and_gauge.push_back(p.z);
    }
    for (const auto& p : hand) {
        EXPECT_TRUE(in_group(ours_and_gauge, p.x));
        EXPECT_TRUE(in_group(ours_and_gauge, p.z));
    }
    // And at least one of ours matches a hand-picked choice exactly up to gauge.
    bool any = false;
    for (const auto& p : code.logical_pairs)
        for (const auto& q : hand) any = any || equivalent(p.x, q.x);
    EXPECT_TRUE(any);
}

TEST(BuildCode, BaconShor913) {
    const auto code = build_code(presets::k913);
    EXPECT_EQ(code.n, 9u);
    EXPECT_EQ(code.k, 1u);
    EXPECT_EQ(code.d, 3u);
    check_code_invariants(code);
}

TEST(BuildCode, Code1623Parameters) {
    const auto code = build_code(presets::k1623);
    EXPECT_EQ(code.n, 16u);
    EXPECT_EQ(code.k, 2u);
    EXPECT_EQ(code.d, 3u);
    EXPECT_EQ(code.gauge.size(), 22u);
    EXPECT_EQ(code.x_stabilizers.size(), 3u);
    EXPECT_EQ(code.z_stabilizers.size(), 3u);
    check_code_invariants(code);
}

TEST(BuildCode, UnencodedQubits) {
    const auto code = build_code("10\n01\n");
    EXPECT_EQ(code.n, 2u);
    EXPECT_TRUE(code.gauge.empty());
    ASSERT_EQ(code.logical_pairs.size(), 2u);
    for (const auto& p : code.logical_pairs) {
        EXPECT_EQ(p.x.weight(), 1u);
        EXPECT_EQ(p.z.weight(), 1u);
    }
    check_code_invariants(code);
    const auto one = build_code("1");
    EXPECT_EQ(one.n, 1u);
    EXPECT_EQ(one.k, 1u);
    EXPECT_EQ(one.d, 1u);
}

TEST(BuildCode, AllPairsGeneratesSameGroup) {
    const auto nn = build_code(presets::k1623);
    const auto all = build_code(presets::k1623, GeneratorSet::AllPairs);
    EXPECT_GT(all.gauge.size(), nn.gauge.size());
    EXPECT_TRUE(gf2::same_span<gf2::Bits128>(symplectic(nn.gauge_ops()), symplectic(all.gauge_ops())));
    EXPECT_EQ(all.x_stabilizers, nn.x_stabilizers);
}

TEST(Distance, Examples) {
    EXPECT_EQ(distance(load_code_matrix(presets::k412)), 2u);
    EXPECT_EQ(distance(load_code_matrix(presets::k622)), 2u);
    EXPECT_EQ(distance(load_code_matrix(presets::k1623)), 3u);
    std::string big;
    for (int r = 0; r < 21; ++r) big += "1\n";
    EXPECT_THROW(distance(load_code_matrix(big)), SizeError);
}

// Oracle: minimum weight of a dressed logical, an element of C(S) outside G,
// by exhaustive enumeration over pure X and pure Z words (the groups are CSS,
// so a minimum-weight logical can be taken of a single type). Bare logicals
// C(G)\G overestimate: for 111/101/110 they give 2 while the code has d = 1.
TEST(Distance, AgreesWithCentralizerOracle) {
    std::mt19937_64 rng(101);
    int checked = 0;
    while (checked < 60) {
        const std::size_t rows = 1 + rng() % 3, cols = 1 + rng() % 3;
        const auto code = build_code(random_matrix(rng, rows, cols));
        if (code.n > 9) continue;
        ++checked;
        const auto g = code.gauge_ops();
        const auto stabs = code.stabilizers();
        std::size_t best = SIZE_MAX;
        const std::uint64_t count = std::uint64_t{1} << code.n;
        for (int type = 0; type < 2; ++type) {
            for (std::uint64_t s = 1; s < count; ++s) {
                const auto p = type == 0 ? PauliOp::x_type(code.n, s) : PauliOp::z_type(code.n, s);
                if (std::all_of(stabs.begin(), stabs.end(), [&](const PauliOp& h) { return commutes(p, h); }) &&
                    !in_group(g, p))
                    best = std::min(best, p.weight());
            }
        }
        if (code.k == 0) continue;
        EXPECT_EQ(code.d, best) << code.matrix.to_text();
    }
}

TEST(BuildCode, RandomMatricesSatisfyInvariants) {
    std::mt19937_64 rng(55);
    for (int t = 0; t < 150; ++t) {
        const auto code = build_code(random_matrix(rng, 1 + rng() % 5, 1 + rng() % 5));
        check_code_invariants(code);
        EXPECT_EQ(code.x_stabilizers.size(), code.matrix.cols() - code.k);
        EXPECT_EQ(code.z_stabilizers.size(), code.matrix.rows() - code.k);
        for (const auto& s : code.stabilizers()) EXPECT_NO_THROW(express_in_basis(s, code.gauge_ops()));
    }
}

TEST(BuildCode, CyclicFamily) {
    for (std::size_t k = 1; k <= 5; ++k) {
        const auto code = build_code(presets::cyclic_family(k));
        EXPECT_EQ(code.n, 2 * k + 2);
        EXPECT_EQ(code.k, k);
        EXPECT_EQ(code.d, 2u);
    }
}
