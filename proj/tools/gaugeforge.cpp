#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gaugeforge/codes.hpp"
#include "gaugeforge/encoding.hpp"
#include "gaugeforge/error.hpp"
#include "gaugeforge/extraction.hpp"
#include "gaugeforge/opensys.hpp"
#include "gaugeforge/spectra.hpp"

using namespace gaugeforge;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kComputeFailure = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

// 64-bit FNV-1a
std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Rounding noise around zero prints as 0.
double clean(double v) { return std::abs(v) < 1e-12 ? 0.0 : v; }

std::string num(double v) {
    v = clean(v);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json json_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

void emit(const json& report, const std::string& out) {
    const std::string text = report.dump(2) + "\n";
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file(out, text);
}

std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GAUGEFORGE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v < 1) throw std::invalid_argument("");
            n = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw InputError(std::string("GAUGEFORGE_THREADS must be a positive integer, got '") + env + "'");
        }
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs f(i) for i < jobs on up to worker_count threads; rethrows the first error.
template <class F>
void parallel_for(std::size_t jobs, F f) {
    const std::size_t workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < jobs;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

std::vector<std::string> strings(const std::vector<PauliOp>& ops, const Labeling& lab) {
    std::vector<std::string> out;
    for (const auto& p : ops) out.push_back(to_string(p, lab));
    return out;
}

// ------------------------------------------------------------------- configs

struct MatrixInput {
    std::string path;
    bool all_pairs = false;
    std::string text;
    std::string hash;

    SubsystemCode load() {
        if (path.empty()) throw InputError("--matrix is required");
        text = read_file(path);
        hash = content_hash(text);
        return build_code(text, all_pairs ? GeneratorSet::AllPairs : GeneratorSet::NearestNeighbor);
    }
};

struct InfoConfig {
    MatrixInput matrix;
    std::string out;
    json resolved() const { return {{"matrix", matrix.path}, {"all_pairs", matrix.all_pairs}}; }
};

struct SpectrumConfig {
    MatrixInput matrix;
    std::string weights = "uniform:1";
    std::string sector_table;
    std::string basis;
    bool check_full = false;
    std::string out;
    json resolved() const {
        return {{"matrix", matrix.path}, {"all_pairs", matrix.all_pairs}, {"weights", weights},
                {"sector_table", sector_table}, {"basis", basis}, {"check_full", check_full}};
    }
};

struct SimulateConfig {
    MatrixInput matrix;
    std::string initial = "plusL";
    std::string blocks = "together";
    std::vector<double> gammas = {0.2, 0.6, 1.0, 1.2};
    double t_max = ExperimentSpec{}.t_max;
    std::size_t samples = ExperimentSpec{}.samples;
    std::string bath = "chi=3.18e-4,omega_c=2.513274123e10,omega_T=2.2e9";
    std::string metrics = "logical";
    std::string out;
    std::string report;
    json resolved() const {
        return {{"matrix", matrix.path}, {"all_pairs", matrix.all_pairs}, {"initial", initial}, {"blocks", blocks},
                {"gamma", gammas},       {"t_max", t_max},                {"samples", samples}, {"bath", bath},
                {"metrics", metrics},    {"out", out}};
    }
};

struct EncodeConfig {
    std::string problem;
    std::string out;
    json resolved() const { return {{"problem", problem}}; }
};

// Config files use the long flag names with '-' replaced by '_'.
template <class T>
void take(const json& j, const char* key, T& v) {
    if (!j.contains(key)) return;
    try {
        v = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("config key '") + key + "': " + e.what());
    }
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    try {
        json j = json::parse(read_file(path));
        if (!j.is_object()) throw InputError("config must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw InputError("config " + path + ": " + e.what());
    }
}

void apply_config(const json& j, MatrixInput& m) {
    take(j, "matrix", m.path);
    take(j, "all_pairs", m.all_pairs);
}

// ------------------------------------------------------------------ parsing

WeightSpec parse_weights(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw InputError("weights must be uniform:L, xz:L,E or file:PATH");
    const std::string kind = s.substr(0, colon), arg = s.substr(colon + 1);
    auto number = [&](const std::string& t) {
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw InputError("bad number '" + t + "' in weights");
        }
    };
    if (kind == "uniform") return WeightSpec::uniform(number(arg));
    if (kind == "xz") {
        const auto comma = arg.find(',');
        if (comma == std::string::npos) throw InputError("xz weights need two values");
        return WeightSpec::xz(number(arg.substr(0, comma)), number(arg.substr(comma + 1)));
    }
    if (kind == "file") {
        json j;
        try {
            j = json::parse(read_file(arg));
        } catch (const json::parse_error& e) {
            throw InputError("weights file: " + std::string(e.what()));
        }
        if (j.is_object() && j.contains("weights")) j = j["weights"];
        if (!j.is_array()) throw InputError("weights file must hold an array of numbers");
        std::vector<double> w;
        for (const auto& v : j) {
            if (!v.is_number()) throw InputError("weights file must hold an array of numbers");
            w.push_back(v.get<double>());
        }
        return WeightSpec::explicit_list(std::move(w));
    }
    throw InputError("unknown weight kind '" + kind + "'");
}

BathSpec parse_bath(const std::string& s) {
    BathSpec b;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("bath entries look like key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        double v = 0;
        try {
            std::size_t used = 0;
            v = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw InputError("bad bath value in '" + item + "'");
        }
        if (key == "chi")
            b.chi = v;
        else if (key == "omega_c")
            b.omega_c = v;
        else if (key == "omega_T")
            b.omega_T = v;
        else
            throw InputError("unknown bath key '" + key + "'");
    }
    b.validate();
    return b;
}

ReducedBasis load_basis(const std::string& path, const SubsystemCode& code) {
    json j;
    try {
        j = json::parse(read_file(path));
        const auto lab = code.labeling();
        ReducedBasis rb;
        rb.n = code.n;
        for (const auto& s : j.at("x_stabilizers")) rb.x_stabilizers.push_back(pauli_from_string(s.get<std::string>(), lab));
        for (const auto& s : j.at("z_stabilizers")) rb.z_stabilizers.push_back(pauli_from_string(s.get<std::string>(), lab));
        for (const auto& p : j.at("aux_pairs"))
            rb.aux_pairs.push_back({pauli_from_string(p.at("x").get<std::string>(), lab),
                                    pauli_from_string(p.at("z").get<std::string>(), lab)});
        return rb;
    } catch (const json::exception& e) {
        throw InputError("basis file " + path + ": " + e.what());
    }
}

// ----------------------------------------------------------------- commands

json verification_json(const VerificationReport& v) {
    return {{"ok", v.ok()},
            {"counts", v.counts},
            {"commutation", v.commutation},
            {"decomposition", v.decomposition},
            {"membership", v.membership},
            {"violations", v.violations}};
}

int cmd_info(InfoConfig cfg) {
    auto code = cfg.matrix.load();
    const auto lab = code.labeling();
    json logicals = json::array();
    for (const auto& p : code.logical_pairs) logicals.push_back({to_string(p.x, lab), to_string(p.z, lab)});
    json r = {{"n", code.n},
              {"k", code.k},
              {"d", code.d ? json(*code.d) : json(nullptr)},
              {"rows", code.matrix.rows()},
              {"cols", code.matrix.cols()},
              {"gauge_generators", strings(code.gauge_ops(), lab)},
              {"stabilizers", strings(code.stabilizers(), lab)},
              {"logicals", logicals},
              {"input_hash", cfg.matrix.hash},
              {"config", cfg.resolved()}};
    emit(r, cfg.out);
    return kOk;
}

int cmd_reduce(InfoConfig cfg) {
    auto code = cfg.matrix.load();
    const auto lab = code.labeling();
    const auto rb = extract_reduced_basis(code.matrix);
    const auto v = verify_reduced_basis(code, rb);
    json pairs = json::array();
    for (const auto& p : rb.aux_pairs) pairs.push_back({{"x", to_string(p.x, lab)}, {"z", to_string(p.z, lab)}});
    json prov = json::array();
    for (const auto& p : rb.provenance)
        prov.push_back({{"role", p.role},
                        {"index", p.index},
                        {"stage", stage_name(p.stage)},
                        {"source", p.source},
                        {"corrections", p.corrections}});
    json r = {{"n", code.n},
              {"k", code.k},
              {"x_stabilizers", strings(rb.x_stabilizers, lab)},
              {"z_stabilizers", strings(rb.z_stabilizers, lab)},
              {"aux_pairs", pairs},
              {"provenance", prov},
              {"verification", verification_json(v)},
              {"input_hash", cfg.matrix.hash},
              {"config", cfg.resolved()}};
    emit(r, cfg.out);
    if (!v.ok()) throw VerificationFailed("reduced basis failed verification: " + v.violations.front());
    return kOk;
}

std::string sector_bits(std::uint64_t sector, std::size_t count) {
    std::string s;
    for (std::size_t i = 0; i < count; ++i) s += ((sector >> i) & 1) ? '1' : '0';
    return s;
}

int cmd_spectrum(SpectrumConfig cfg) {
    auto code = cfg.matrix.load();
    const WeightSpec w = parse_weights(cfg.weights);
    ReducedBasis rb;
    if (cfg.basis.empty()) {
        rb = extract_reduced_basis(code.matrix);
    } else {
        rb = load_basis(cfg.basis, code);
    }
    const auto v = verify_reduced_basis(code, rb);
    if (!v.ok()) throw VerificationFailed("reduced basis failed verification: " + v.violations.front());
    const auto rep = energy_separation(code, rb, w);
    json r = {{"n", code.n},
              {"k", code.k},
              {"generator_count", code.gauge.size()},
              {"weights", w.resolve(code)},
              {"code_sector", rep.code_sector},
              {"stabilizer_count", rep.stabilizer_count},
              {"aux_pair_count", rb.aux_pairs.size()},
              {"e0_code", rep.e0_code},
              {"separation", rep.separation},
              {"gauge_gap", json_number(rep.gauge_gap)},
              {"suppresses", rep.suppresses},
              {"closest_sector", rep.closest_sector},
              {"closest_sector_bits", sector_bits(rep.closest_sector, rep.stabilizer_count)},
              {"sector_count", rep.sectors.size()},
              {"input_hash", cfg.matrix.hash},
              {"config", cfg.resolved()}};
    if (cfg.check_full) {
        const double full = full_ground_energy(build_full_hamiltonian(code, w));
        double lowest = rep.sectors.front().ground;
        for (const auto& s : rep.sectors) lowest = std::min(lowest, s.ground);
        r["full_ground_energy"] = full;
        r["sector_minimum"] = lowest;
        r["full_sector_difference"] = std::abs(full - lowest);
    }
    if (!cfg.sector_table.empty()) {
        std::string csv = "sector,ground,first_excited,degeneracy\n";
        for (const auto& s : rep.sectors)
            csv += sector_bits(s.sector, rep.stabilizer_count) + "," + num(s.ground) + "," +
                   (s.first_excited ? num(*s.first_excited) : std::string()) + "," + std::to_string(s.degeneracy) + "\n";
        write_file(cfg.sector_table, csv);
    }
    emit(r, cfg.out);
    return kOk;
}

int cmd_simulate(SimulateConfig cfg) {
    auto code = cfg.matrix.load();
    (void)code;
    ExperimentSpec spec;
    spec.matrix_text = cfg.matrix.text;
    spec.generator_set = cfg.matrix.all_pairs ? GeneratorSet::AllPairs : GeneratorSet::NearestNeighbor;
    if (cfg.initial == "plusL")
        spec.initial = InitialState::PlusL;
    else if (cfg.initial == "bell")
        spec.initial = InitialState::Bell;
    else
        throw InputError("--initial must be plusL or bell");
    if (cfg.blocks == "together")
        spec.blocks = Blocks::Together;
    else if (cfg.blocks == "separate")
        spec.blocks = Blocks::Separate;
    else
        throw InputError("--blocks must be together or separate");
    if (cfg.metrics == "logical")
        spec.metrics = MetricSpace::Logical;
    else if (cfg.metrics == "physical")
        spec.metrics = MetricSpace::Physical;
    else
        throw InputError("--metrics must be logical or physical");
    if (cfg.gammas.empty()) throw InputError("--gamma needs at least one value");
    for (double g : cfg.gammas)
        if (!std::isfinite(g) || g < 0) throw InputError("gamma values must be finite and nonnegative");
    if (!(cfg.t_max > 0) || !std::isfinite(cfg.t_max)) throw InputError("--t-max must be positive");
    if (cfg.samples == 0) throw InputError("--samples must be positive");
    spec.t_max = cfg.t_max;
    spec.samples = cfg.samples;
    spec.bath = parse_bath(cfg.bath);

    std::vector<double> gammas = cfg.gammas;
    std::sort(gammas.begin(), gammas.end());
    gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
    std::vector<std::vector<SamplePoint>> runs(gammas.size());
    parallel_for(gammas.size(), [&](std::size_t i) { runs[i] = run_experiment(spec, gammas[i]); });

    const bool bell = spec.initial == InitialState::Bell;
    std::string csv = bell ? "gamma,t,trace_distance,purity,eof\n" : "gamma,t,trace_distance,purity\n";
    json finals = json::array();
    for (const auto& run : runs) {
        for (const auto& p : run) {
            csv += num(p.gamma) + "," + num(p.t) + "," + num(p.trace_distance) + "," + num(p.purity);
            if (bell) csv += "," + num(p.eof.value_or(0.0));
            csv += "\n";
        }
        const auto& last = run.back();
        finals.push_back({{"gamma", last.gamma},
                          {"t", last.t},
                          {"trace_distance", last.trace_distance},
                          {"purity", last.purity},
                          {"eof", last.eof ? json(*last.eof) : json(nullptr)},
                          {"code_population", last.code_population}});
    }
    if (cfg.out.empty() || cfg.out == "-") {
        std::cout << csv;
    } else {
        write_file(cfg.out, csv);
    }
    if (!cfg.report.empty()) {
        json r = {{"final", finals}, {"input_hash", cfg.matrix.hash}, {"config", cfg.resolved()}};
        emit(r, cfg.report);
    }
    return kOk;
}

int cmd_encode_count(EncodeConfig cfg) {
    if (cfg.problem.empty()) throw InputError("--problem is required");
    const std::string text = read_file(cfg.problem);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("problem file: " + std::string(e.what()));
    }
    std::vector<SubsystemCode> blocks;
    IsingProblem p;
    Assignment asg;
    try {
        for (const auto& b : j.at("blocks")) {
            auto code = build_code(b.at("matrix").get<std::string>());
            if (b.contains("logicals")) {
                const auto lab = code.labeling();
                std::vector<LogicalPair> pairs;
                for (const auto& l : b.at("logicals"))
                    pairs.push_back({pauli_from_string(l.at(0).get<std::string>(), lab),
                                     pauli_from_string(l.at(1).get<std::string>(), lab)});
                if (pairs.size() != code.k) throw InputError("block needs exactly k logical pairs");
                code.logical_pairs = std::move(pairs);
            }
            blocks.push_back(std::move(code));
        }
        p.h = j.value("h", std::vector<double>{});
        p.transverse = j.value("transverse", std::vector<double>{});
        if (j.contains("J"))
            for (const auto& t : j.at("J")) {
                if (!t.is_array() || t.size() != 3) throw InputError("J entries look like [i, j, value]");
                p.couplings.push_back({{t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>()}, t.at(2).get<double>()});
            }
        for (const auto& a : j.at("assignment")) asg.push_back({a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>()});
    } catch (const json::exception& e) {
        throw InputError("problem file: " + std::string(e.what()));
    }
    BlockLayout layout(std::move(blocks));
    const auto enc = encode_ising(p, layout, asg);
    const auto lab = layout.labeling();
    json terms = json::array();
    for (const auto& t : enc.terms)
        terms.push_back({{"label", t.label}, {"coefficient", t.coefficient}, {"operator", to_string(t.op, lab)}, {"weight", t.weight}});
    json counts = json::object();
    for (const auto& [w, c] : enc.stats.by_weight) counts[std::to_string(w)] = c;
    json r = {{"qubits", layout.qubit_count()},
              {"terms", terms},
              {"weight_counts", counts},
              {"max_weight", enc.stats.max_weight()},
              {"input_hash", content_hash(text)},
              {"config", cfg.resolved()}};
    emit(r, cfg.out);
    return kOk;
}

std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Bacon-Shor codes, two-local suppression Hamiltonians and their noisy dynamics"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON config; command-line flags take precedence");

    InfoConfig info, reduce;
    SpectrumConfig spectrum;
    SimulateConfig simulate;
    EncodeConfig encode;

    json config;
    try {
        config = load_config(find_config_path(argc, argv));
        for (auto* c : {&info, &reduce}) {
            apply_config(config, c->matrix);
            take(config, "out", c->out);
        }
        apply_config(config, spectrum.matrix);
        take(config, "weights", spectrum.weights);
        take(config, "sector_table", spectrum.sector_table);
        take(config, "basis", spectrum.basis);
        take(config, "check_full", spectrum.check_full);
        take(config, "out", spectrum.out);
        apply_config(config, simulate.matrix);
        take(config, "initial", simulate.initial);
        take(config, "blocks", simulate.blocks);
        take(config, "gamma", simulate.gammas);
        take(config, "t_max", simulate.t_max);
        take(config, "samples", simulate.samples);
        take(config, "bath", simulate.bath);
        take(config, "metrics", simulate.metrics);
        take(config, "out", simulate.out);
        take(config, "report", simulate.report);
        take(config, "problem", encode.problem);
        take(config, "out", encode.out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    auto* code_cmd = app.add_subcommand("code", "Code construction");
    code_cmd->require_subcommand(1);
    code_cmd->fallthrough();
    auto* info_cmd = code_cmd->add_subcommand("info", "Parameters, gauge generators, stabilizers and logicals");
    auto* reduce_cmd = code_cmd->add_subcommand("reduce", "Stabilizers and auxiliary pairs from the reduction");
    for (auto [cmd, cfg] : {std::pair{info_cmd, &info}, std::pair{reduce_cmd, &reduce}}) {
        cmd->add_option("--matrix", cfg->matrix.path, "Code matrix file");
        cmd->add_flag("--all-pairs", cfg->matrix.all_pairs, "Use every pair in a row or column as a generator");
        cmd->add_option("--out", cfg->out, "Report file (default stdout)");
    }

    auto* spec_cmd = app.add_subcommand("spectrum", "Energy separation of the suppression Hamiltonian");
    spec_cmd->add_option("--matrix", spectrum.matrix.path, "Code matrix file");
    spec_cmd->add_flag("--all-pairs", spectrum.matrix.all_pairs, "Use every pair in a row or column as a generator");
    spec_cmd->add_option("--weights", spectrum.weights, "uniform:L | xz:L,E | file:W.json");
    spec_cmd->add_option("--sector-table", spectrum.sector_table, "Write one CSV line per stabilizer sector");
    spec_cmd->add_option("--basis", spectrum.basis, "Reduced basis JSON from 'code reduce'");
    spec_cmd->add_flag("--check-full", spectrum.check_full, "Also compute the full-space ground energy");
    spec_cmd->add_option("--out", spectrum.out, "Report file (default stdout)");

    auto* sim_cmd = app.add_subcommand("simulate", "Open-system evolution under an Ohmic bath");
    sim_cmd->add_option("--matrix", simulate.matrix.path, "Code matrix file");
    sim_cmd->add_flag("--all-pairs", simulate.matrix.all_pairs, "Use every pair in a row or column as a generator");
    sim_cmd->add_option("--initial", simulate.initial, "plusL or bell");
    sim_cmd->add_option("--blocks", simulate.blocks, "together or separate");
    sim_cmd->add_option("--gamma", simulate.gammas, "Penalty weights in units of the bath temperature")->delimiter(',');
    sim_cmd->add_option("--t-max", simulate.t_max, "Horizon in seconds");
    sim_cmd->add_option("--samples", simulate.samples, "Number of sample intervals");
    sim_cmd->add_option("--bath", simulate.bath, "chi=..,omega_c=..,omega_T=..");
    sim_cmd->add_option("--metrics", simulate.metrics, "logical or physical");
    sim_cmd->add_option("--out", simulate.out, "Trajectory CSV (default stdout)");
    sim_cmd->add_option("--report", simulate.report, "JSON summary with the resolved config");

    auto* enc_cmd = app.add_subcommand("encode-count", "Locality of an encoded Ising problem");
    enc_cmd->add_option("--problem", encode.problem, "Problem JSON");
    enc_cmd->add_option("--out", encode.out, "Report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (*info_cmd) return cmd_info(info);
        if (*reduce_cmd) return cmd_reduce(reduce);
        if (*spec_cmd) return cmd_spectrum(spectrum);
        if (*sim_cmd) return cmd_simulate(simulate);
        if (*enc_cmd) return cmd_encode_count(encode);
    } catch (const VerificationFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kComputeFailure;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const SizeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const EncodingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {  // dimension and weight errors
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kComputeFailure;
    }
    return kInputError;
}
