// Acceptance run: one PASS/FAIL line per criterion, exit status = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fixtures.hpp"
#include "gaugeforge/encoding.hpp"
#include "gaugeforge/extraction.hpp"
#include "gaugeforge/opensys.hpp"
#include "gaugeforge/spectra.hpp"

using namespace gaugeforge;

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("FAILED " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return INFINITY;
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

WeightSpec six_weights(double lambda, double eta) { return WeightSpec::explicit_list({lambda, eta, lambda, eta, lambda, lambda}); }

// Sector spectrum of the six-qubit Hamiltonian in the Bell basis of the two
// gauge qubits, x and z the stabilizer signs.
std::vector<double> six_qubit_closed_form(double l, double e, int x, int z) {
    const double sp = (x + z) / 2.0;
    std::vector<double> ev;
    if (sp != 0.0) {
        const double r = std::sqrt(8 * l * l + e * e);
        ev = {-e * sp - r, -e * sp + r, 2 * e * sp, 0.0};
    } else {
        const double r = 2 * std::sqrt(2 * l * l + e * e);
        ev = {-r, r, 0.0, 0.0};
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> sector_union(const SubsystemCode& code, const ReducedBasis& rb, const WeightSpec& w) {
    std::vector<double> all;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << rb.stabilizers().size()); ++s)
        for (double e : sector_spectrum(build_sector_hamiltonian(code, rb, w, s)))
            for (std::size_t r = 0; r < (std::size_t{1} << code.k); ++r) all.push_back(e);
    std::sort(all.begin(), all.end());
    return all;
}

Check criterion1() {
    Check c;
    auto code = build_code(presets::k412);
    const auto full = dense_spectrum(build_full_hamiltonian(code, WeightSpec::uniform(1)).dense());
    const double r8 = std::sqrt(8.0);
    const std::vector<double> expected = {-r8, -r8, -2, -2, -2, -2, 0, 0, 0, 0, 2, 2, 2, 2, r8, r8};
    const double diff = max_abs_diff(full, expected);
    c.expect(diff <= 1e-10, "full spectrum");
    const auto rep = energy_separation(code, extract_reduced_basis(code.matrix), WeightSpec::uniform(1));
    c.expect(std::abs(rep.separation - 2 * (std::sqrt(2.0) - 1)) <= 1e-10, "separation");
    c.note("spectrum error " + fmt("%.2e", diff) + ", separation " + fmt("%.12f", rep.separation));
    return c;
}

Check criterion2() {
    Check c;
    auto code = build_code(presets::k622);
    auto rb = extract_reduced_basis(code.matrix);
    const double sep = energy_separation(code, rb, WeightSpec::uniform(1)).separation;
    c.expect(std::abs(sep - (4 - 2 * std::sqrt(3.0))) <= 1e-10, "separation at unit weights");
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    double worst = 0, worst_full = 0;
    for (int t = 0; t < 50; ++t) {
        const double l = u(rng), e = u(rng);
        for (int x : {1, -1})
            for (int z : {1, -1}) {
                const std::uint64_t sector = (x < 0 ? 1u : 0u) | (z < 0 ? 2u : 0u);
                const auto got = sector_spectrum(build_sector_hamiltonian(code, rb, six_weights(l, e), sector));
                worst = std::max(worst, max_abs_diff(got, six_qubit_closed_form(l, e, x, z)));
            }
        const auto w = six_weights(l, e);
        worst_full = std::max(worst_full, max_abs_diff(dense_spectrum(build_full_hamiltonian(code, w).dense()), sector_union(code, rb, w)));
    }
    c.expect(worst <= 1e-9, "closed-form sector spectra");
    c.expect(worst_full <= 1e-9, "full spectrum equals union of sectors");
    const double big = energy_separation(code, rb, six_weights(1e3, 1)).separation;
    c.expect(std::abs(big - 1) <= 1e-3, "large-lambda limit");
    c.note("separation " + fmt("%.12f", sep) + ", worst sector error " + fmt("%.1e", worst) + ", lambda=1e3 separation " +
           fmt("%.6f", big));
    return c;
}

Check criterion3() {
    Check c;
    auto code = build_code(presets::k1623);
    c.expect(code.n == 16 && code.k == 2 && code.d && *code.d == 3, "code parameters");
    auto rb = extract_reduced_basis(code.matrix);
    c.expect(rb.x_stabilizers.size() == 3 && rb.z_stabilizers.size() == 3 && rb.aux_pairs.size() == 8, "extraction counts");
    c.expect(verify_reduced_basis(code, rb).ok(), "verification");
    bool energy_ok = false;
    for (auto set : {GeneratorSet::NearestNeighbor, GeneratorSet::AllPairs}) {
        auto cs = build_code(presets::k1623, set);
        const auto rep = energy_separation(cs, extract_reduced_basis(cs.matrix), WeightSpec::uniform(1));
        const bool hit = std::abs(rep.e0_code + 13.83) <= 0.01 && std::abs(rep.separation - 0.33) <= 0.01;
        energy_ok = energy_ok || hit;
        c.note(std::string(set == GeneratorSet::NearestNeighbor ? "nearest-neighbour" : "all-pairs") + " E0 " +
               fmt("%.4f", rep.e0_code) + " separation " + fmt("%.4f", rep.separation));
        if (set == GeneratorSet::NearestNeighbor) {
            double lowest = rep.sectors.front().ground;
            for (const auto& s : rep.sectors) lowest = std::min(lowest, s.ground);
            const double full = full_ground_energy(build_full_hamiltonian(cs, WeightSpec::uniform(1)));
            c.expect(std::abs(full - lowest) <= 1e-6, "full-space ground energy matches sector minimum");
            c.note("full-space ground " + fmt("%.9f", full));
        }
    }
    c.expect(energy_ok, "ground energy -13.83 and separation 0.33 under some generating set");
    return c;
}

Check criterion4() {
    Check c;
    std::mt19937_64 rng(20240611);
    int bad = 0, checked = 0;
    for (int trial = 0; trial < 250; ++trial) {
        const std::size_t r = 1 + rng() % 5, col = 1 + rng() % 5;
        auto code = build_code(fixtures::random_matrix(rng, r, col));
        try {
            auto rb = extract_reduced_basis(code.matrix);
            if (!verify_reduced_basis(code, rb).ok() || !fixtures::same_group(rb.ordered_basis(), code.gauge_ops())) ++bad;
        } catch (const std::exception&) {
            ++bad;
        }
        ++checked;
    }
    c.expect(checked >= 200 && bad == 0, "random matrices");
    for (auto set : {GeneratorSet::NearestNeighbor, GeneratorSet::AllPairs}) {
        auto code = build_code(presets::k1623, set);
        c.expect(verify_reduced_basis(code, fixtures::hand_basis_1623(code)).ok(), "hand-listed operators");
    }
    c.note(std::to_string(checked) + " random matrices, " + std::to_string(bad) + " violations");
    return c;
}

NoisySystem system_for(std::string_view matrix, Blocks blocks, double gamma, BathSpec bath = {}) {
    ExperimentSpec spec;
    spec.matrix_text = std::string(matrix);
    spec.blocks = blocks;
    spec.bath = bath;
    return make_system(spec, gamma);
}

Check criterion5() {
    Check c;
    double completeness = 0, balance = 0, stationary = 0;
    for (auto m : {presets::k412, presets::k622}) {
        auto sys = system_for(m, Blocks::Together, 1.0);
        const auto& g = sys.generators[0];
        const auto couplings = single_qubit_couplings(sys.layout.qubit_count());
        for (std::size_t a = 0; a < couplings.size(); ++a) {
            Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(couplings[a].rows(), couplings[a].cols());
            for (std::size_t b = 0; b < g.bohr_frequencies().size(); ++b) sum += g.jump_operator(a, b);
            completeness = std::max(completeness, (sum - couplings[a]).cwiseAbs().maxCoeff());
        }
        const auto& w = g.bohr_frequencies();
        for (std::size_t b = 0; b < w.size(); ++b)
            for (std::size_t b2 = 0; b2 < w.size(); ++b2)
                if (std::abs(w[b] + w[b2]) <= g.tolerance())
                    balance = std::max(balance, std::abs(g.rates()[b2] / g.rates()[b] / std::exp(-w[b] / sys.bath.omega_T) - 1));
        for (double horizon : {ExperimentSpec{}.t_max, 1e-6}) {
            const auto rho = gibbs_state(sys);
            for (const auto& s : evolve(rho, sys, horizon, 10).states) stationary = std::max(stationary, trace_distance(s, rho));
        }
    }
    c.expect(completeness <= 1e-12, "jump-operator completeness");
    c.expect(balance <= 1e-12, "detailed balance");
    c.expect(stationary <= 1e-6, "Gibbs stationarity");
    c.note("completeness " + fmt("%.1e", completeness) + ", balance " + fmt("%.1e", balance) + ", Gibbs drift " +
           fmt("%.1e", stationary));
    return c;
}

std::string source_dir() { return GAUGEFORGE_SOURCE_DIR; }

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check criterion6() {
    Check c;
    double trace_err = 0, min_eig = 1, herm = 0;
    int runs = 0;
    for (const char* name : {"simulate_412_plus.json", "simulate_622_bell.json", "simulate_412_bell_separate.json",
                             "simulate_bare_qubit.json"}) {
        const auto j = nlohmann::json::parse(read_text(source_dir() + "/samples/" + name));
        ExperimentSpec spec;
        spec.matrix_text = read_text(source_dir() + "/" + j.at("matrix").get<std::string>());
        spec.initial = j.value("initial", "plusL") == "bell" ? InitialState::Bell : InitialState::PlusL;
        spec.blocks = j.value("blocks", "together") == "separate" ? Blocks::Separate : Blocks::Together;
        spec.t_max = j.value("t_max", spec.t_max);
        spec.samples = j.value("samples", spec.samples);
        for (double g : j.at("gamma").get<std::vector<double>>()) {
            auto sys = make_system(spec, g);
            const auto rho0 = encode_state(logical_initial_state(spec.initial, sys.logical_count()), sys);
            const auto tr = evolve(rho0, sys, spec.t_max, spec.samples);
            trace_err = std::max(trace_err, tr.max_trace_error);
            min_eig = std::min(min_eig, tr.min_eigenvalue);
            herm = std::max(herm, tr.max_hermiticity_error);
            ++runs;
        }
    }
    c.expect(trace_err <= 1e-9 && min_eig >= -1e-9 && herm <= 1e-12, "trace, positivity and Hermiticity");

    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    double round_trip = 0;
    std::vector<NoisySystem> systems = {system_for(presets::k412, Blocks::Together, 1.0),
                                        system_for(presets::k622, Blocks::Together, 1.0),
                                        system_for(presets::k412, Blocks::Separate, 1.0)};
    for (const auto& sys : systems) {
        const auto dl = static_cast<Eigen::Index>(std::size_t{1} << sys.logical_count());
        for (int t = 0; t < 5; ++t) {
            Eigen::MatrixXcd g(dl, dl);
            for (Eigen::Index a = 0; a < dl; ++a)
                for (Eigen::Index b = 0; b < dl; ++b) g(a, b) = {nd(rng), nd(rng)};
            Eigen::MatrixXcd rl = g * g.adjoint();
            rl /= rl.trace();
            round_trip = std::max(round_trip, (decode_logical(encode_state(rl, sys), sys) - rl).cwiseAbs().maxCoeff());
        }
    }
    c.expect(round_trip <= 1e-10, "encode/decode round trip");

    BathSpec quiet;
    quiet.chi = 0;
    auto sys = system_for(presets::k622, Blocks::Together, 1.0, quiet);
    const auto rho0 = encode_state(logical_initial_state(InitialState::Bell, 2), sys);
    double drift = 0;
    for (const auto& s : evolve(rho0, sys, 1e-6, 5).states) drift = std::max(drift, (s - rho0).cwiseAbs().maxCoeff());
    c.expect(drift <= 1e-12, "zero coupling is the identity");
    c.note(std::to_string(runs) + " sample runs: trace error " + fmt("%.1e", trace_err) + ", min eigenvalue " +
           fmt("%.1e", min_eig) + "; round trip " + fmt("%.1e", round_trip) + "; chi=0 drift " + fmt("%.1e", drift));
    return c;
}

Check criterion7() {
    Check c;
    ExperimentSpec plus;
    plus.matrix_text = std::string(presets::k412);
    double prev = INFINITY;
    std::string trail;
    for (double g : {0.8, 1.0, 1.2, 1.5}) {
        const double d = run_experiment(plus, g).back().trace_distance;
        c.expect(d < prev, "trace distance decreases at gamma " + fmt("%.1f", g));
        prev = d;
        trail += (trail.empty() ? "" : " ") + fmt("%.4f", d);
    }
    c.note("412 final trace distance at gamma 0.8/1.0/1.2/1.5: " + trail);
    for (auto [m, blocks, label] : {std::tuple{presets::k622, Blocks::Together, "622 together"},
                                    std::tuple{presets::k412, Blocks::Separate, "two 412 blocks"}}) {
        ExperimentSpec bell;
        bell.matrix_text = std::string(m);
        bell.initial = InitialState::Bell;
        bell.blocks = blocks;
        const double low = *run_experiment(bell, 0.2).back().eof;
        const double high = *run_experiment(bell, 1.2).back().eof;
        c.expect(high > low, std::string(label) + " EoF at gamma 1.2 beats gamma 0.2");
        c.note(std::string(label) + " EoF " + fmt("%.4f", high) + " (gamma 1.2) vs " + fmt("%.4f", low) + " (gamma 0.2)");
    }
    return c;
}

Check criterion8() {
    Check c;
    auto six = build_code(presets::k622);
    const auto lab = six.labeling();
    auto hand = six;
    hand.logical_pairs = {{pauli_from_string("X[2,3] X[3,3]", lab), pauli_from_string("Z[3,1] Z[3,3]", lab)},
                          {pauli_from_string("X[1,2] X[2,2]", lab), pauli_from_string("Z[1,1] Z[1,2]", lab)}};
    IsingProblem p;
    p.h = {0.5, -0.3};
    p.couplings = {{{0, 1}, 1.0}};
    for (const auto* code : {&six, &hand}) {
        BlockLayout layout({*code});
        const auto enc = encode_ising(p, layout, {{0, 0}, {0, 1}});
        c.expect(enc.stats.max_weight() <= 2, "intra-block Ising terms are two-local");
    }
    BlockLayout hand_layout({hand});
    const auto xx = encode_operator(hand_layout, {{0, 0}, {0, 1}}, {{0, 'X'}, {1, 'X'}});
    c.expect(xx.weight <= 2, "intra-block XX coupling is two-local");
    BlockLayout apart({build_code(presets::k412), build_code(presets::k412)});
    const auto a = encode_ising(p, apart, {{0, 0}, {1, 0}});
    const auto b = encode_ising(p, apart, {{0, 0}, {1, 0}});
    c.expect(a.stats.count(4) == 1 && a.stats.count(2) == 2, "cross-block coupling is four-local");
    c.expect(a.stats.by_weight == b.stats.by_weight, "deterministic counts");
    c.note("separate blocks: " + std::to_string(a.stats.count(2)) + " weight-2, " + std::to_string(a.stats.count(4)) +
           " weight-4");
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
        {"four-qubit spectrum", criterion1},       {"six-qubit separation and sectors", criterion2},
        {"sixteen-qubit code", criterion3},        {"extraction property suite", criterion4},
        {"Davies generator identities", criterion5}, {"dynamics sanity", criterion6},
        {"qualitative suppression", criterion7},   {"locality accounting", criterion8}};
    const double limits[] = {1, 60, 60, 30, 600, 600, 600, 60};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.ok = false;
            c.note(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > limits[i]) c.expect(false, "runtime limit " + fmt("%.0f s", limits[i]));
        if (!c.ok) ++failures;
        std::printf("criterion %zu %s  %s (%.2f s)", i + 1, c.ok ? "PASS" : "FAIL", criteria[i].first, secs);
        for (const auto& n : c.notes) std::printf("; %s", n.c_str());
        std::printf("\n");
        std::fflush(stdout);
    }
    return failures;
}
