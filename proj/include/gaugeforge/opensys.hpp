#pragma once

// Ohmic spin-boson noise on every physical qubit, treated as a Davies
// (secular, weak-coupling) master equation in the eigenbasis of the
// suppression Hamiltonian. Units: hbar = 1, energies and rates in rad/s,
// time in seconds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gaugeforge/codes.hpp"
#include "gaugeforge/encoding.hpp"
#include "gaugeforge/error.hpp"
#include "gaugeforge/pauli.hpp"
#include "gaugeforge/spectra.hpp"

namespace gaugeforge {

using cplx = std::complex<double>;

struct BathSpec {
    double chi = 3.18e-4;
    double omega_c = 8 * std::numbers::pi * 1e9;
    double omega_T = 2.2e9;

    void validate() const {
        if (!(chi >= 0) || !(omega_c > 0) || !(omega_T > 0) || !std::isfinite(chi) || !std::isfinite(omega_c) ||
            !std::isfinite(omega_T))
            throw DimensionError("bath parameters must be finite, chi >= 0, omega_c > 0 and omega_T > 0");
    }
};

// Fourier transform of the bath correlation function. Positive frequencies
// lower the system energy.
inline double bath_correlation(double omega, const BathSpec& b) {
    const double pre = 2 * std::numbers::pi * b.chi;
    if (omega == 0.0) return pre * b.omega_T;
    const double x = omega / b.omega_T;
    // omega / (1 - e^{-x}) = omega_T * x / -expm1(-x)
    return pre * b.omega_T * (x / -std::expm1(-x)) * std::exp(-std::abs(omega) / b.omega_c);
}

// ---------------------------------------------------------------- dense Paulis

inline cplx ipow(int p) {
    switch (((p % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

// P * M, using P|t> = c (-1)^{z.t} |t xor x>.
inline Eigen::MatrixXcd apply_pauli_left(const PauliOp& p, const Eigen::MatrixXcd& m) {
    const cplx c = ipow(p.phase + std::popcount(p.x & p.z));
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (Eigen::Index t = 0; t < m.rows(); ++t) {
        const auto tt = static_cast<std::uint64_t>(t);
        const cplx f = (std::popcount(p.z & tt) % 2) ? -c : c;
        out.row(static_cast<Eigen::Index>(tt ^ p.x)) = f * m.row(t);
    }
    return out;
}

inline Eigen::MatrixXcd pauli_matrix(const PauliOp& p) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << p.n);
    return apply_pauli_left(p, Eigen::MatrixXcd::Identity(dim, dim));
}

// tr(rho P)
inline cplx pauli_expectation(const Eigen::MatrixXcd& rho, const PauliOp& p) {
    const cplx c = ipow(p.phase + std::popcount(p.x & p.z));
    cplx acc = 0;
    for (Eigen::Index t = 0; t < rho.rows(); ++t) {
        const auto tt = static_cast<std::uint64_t>(t);
        const cplx v = rho(t, static_cast<Eigen::Index>(tt ^ p.x));
        acc += (std::popcount(p.z & tt) % 2) ? -v : v;
    }
    return c * acc;
}

inline Eigen::MatrixXd real_pauli_matrix(const PauliOp& p) {
    const int e = (p.phase + std::popcount(p.x & p.z)) % 4;
    if (e % 2) throw ConsistencyError("operator is not real");
    Eigen::MatrixXcd m = pauli_matrix(p);
    return m.real();
}

// ------------------------------------------------------------ Davies generator

class DaviesGenerator {
  public:
    // couplings: real system operators, each attached to its own bath.
    DaviesGenerator(const Eigen::MatrixXd& h, const std::vector<Eigen::MatrixXd>& couplings, const BathSpec& bath)
        : bath_(bath) {
        bath.validate();
        if (h.rows() > 1024) throw SizeError("Davies generator limited to dimension 1024");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success) throw ConvergenceError("eigendecomposition of the system Hamiltonian failed");
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        const auto d = energies_.size();
        const double norm = std::max(energies_.cwiseAbs().maxCoeff(), 0.0);
        tol_ = 1e-9 * std::max(1.0, norm);

        // Levels: runs of eigenvalues closer than tol.
        level_.assign(static_cast<std::size_t>(d), 0);
        for (Eigen::Index i = 0; i < d; ++i) {
            if (i > 0 && energies_[i] - energies_[i - 1] > tol_) level_energy_.push_back(energies_[i]);
            if (i == 0) level_energy_.push_back(energies_[0]);
            level_[static_cast<std::size_t>(i)] = level_energy_.size() - 1;
        }
        const std::size_t nl = level_energy_.size();

        // Bohr frequencies omega = E_b - E_a for level pairs (a, b), binned.
        std::vector<std::pair<double, std::size_t>> diffs;
        for (std::size_t a = 0; a < nl; ++a)
            for (std::size_t b = 0; b < nl; ++b) diffs.push_back({level_energy_[b] - level_energy_[a], a * nl + b});
        std::sort(diffs.begin(), diffs.end());
        bin_of_.assign(nl * nl, 0);
        for (std::size_t i = 0; i < diffs.size(); ++i) {
            if (i == 0 || diffs[i].first - diffs[i - 1].first > tol_) bins_.push_back(diffs[i].first);
            bin_of_[diffs[i].second] = bins_.size() - 1;
        }
        // Snap the zero bin to exactly zero.
        for (auto& w : bins_)
            if (std::abs(w) <= tol_) w = 0.0;
        for (double w : bins_) rates_.push_back(bath_correlation(w, bath_));

        for (const auto& a : couplings) {
            if (a.rows() != d || a.cols() != d) throw DimensionError("coupling operator has the wrong dimension");
            coupling_eig_.push_back(vectors_.transpose() * a * vectors_);
        }

        // K = sum_c sum_w gamma(w) A_c(w)^T A_c(w), block diagonal by level.
        K_ = Eigen::MatrixXd::Zero(d, d);
        for (const auto& A : coupling_eig_)
            for (Eigen::Index j = 0; j < d; ++j)
                for (Eigen::Index l = 0; l < d; ++l) {
                    if (level(j) != level(l)) continue;
                    double acc = 0;
                    for (Eigen::Index i = 0; i < d; ++i) acc += rate_between(i, j) * A(i, j) * A(i, l);
                    K_(j, l) += acc;
                }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ks(K_, Eigen::EigenvaluesOnly);
        max_rate_ = std::max(0.0, ks.eigenvalues().maxCoeff());
    }

    std::size_t dimension() const { return static_cast<std::size_t>(energies_.size()); }
    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
    const std::vector<double>& bohr_frequencies() const { return bins_; }
    const std::vector<double>& rates() const { return rates_; }
    double max_total_rate() const { return max_rate_; }
    double tolerance() const { return tol_; }
    std::size_t coupling_count() const { return coupling_eig_.size(); }
    const BathSpec& bath() const { return bath_; }

    // A_c(omega_bin) in the computational basis.
    Eigen::MatrixXd jump_operator(std::size_t c, std::size_t bin) const {
        const auto d = energies_.size();
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                if (bin_index(i, j) == bin) m(i, j) = coupling_eig_[c](i, j);
        return vectors_ * m * vectors_.transpose();
    }

    // Bin of the frequency E_j - E_i (the jump takes j to i).
    std::size_t bin_index(Eigen::Index i, Eigen::Index j) const {
        return bin_of_[level(i) * level_energy_.size() + level(j)];
    }

    // Coherence class of the eigenbasis entry rho_{ik}: the bin of E_i - E_k.
    std::size_t coherence_class(Eigen::Index i, Eigen::Index k) const { return bin_index(k, i); }

    // Generator restricted to the entries rho_{ik} of one coherence class.
    struct ClassBlock {
        std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
        Eigen::MatrixXd generator;
    };

    ClassBlock class_block(std::size_t cls) const {
        ClassBlock blk;
        const auto d = energies_.size();
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index k = 0; k < d; ++k)
                if (coherence_class(i, k) == cls) blk.entries.push_back({i, k});
        const auto m = static_cast<Eigen::Index>(blk.entries.size());
        blk.generator = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index p = 0; p < m; ++p) {
            const auto [i, k] = blk.entries[static_cast<std::size_t>(p)];
            for (Eigen::Index q = 0; q < m; ++q) {
                const auto [j, l] = blk.entries[static_cast<std::size_t>(q)];
                double v = 0;
                const std::size_t bij = bin_index(i, j);
                if (bij == bin_index(k, l)) {
                    double s = 0;
                    for (const auto& A : coupling_eig_) s += A(i, j) * A(k, l);
                    v += rates_[bij] * s;
                }
                if (k == l) v -= 0.5 * K_(i, j);
                if (i == j) v -= 0.5 * K_(l, k);
                blk.generator(p, q) = v;
            }
        }
        return blk;
    }

  private:
    std::size_t level(Eigen::Index i) const { return level_[static_cast<std::size_t>(i)]; }
    double rate_between(Eigen::Index i, Eigen::Index j) const { return rates_[bin_index(i, j)]; }

    BathSpec bath_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
    double tol_ = 0;
    std::vector<std::size_t> level_;
    std::vector<double> level_energy_;
    std::vector<std::size_t> bin_of_;
    std::vector<double> bins_;
    std::vector<double> rates_;
    std::vector<Eigen::MatrixXd> coupling_eig_;
    Eigen::MatrixXd K_;
    double max_rate_ = 0;
};

// X_k, XZ_k (same dissipator as Y_k, but real) and Z_k for every qubit.
inline std::vector<Eigen::MatrixXd> single_qubit_couplings(std::size_t n) {
    std::vector<Eigen::MatrixXd> out;
    for (std::size_t q = 0; q < n; ++q) {
        out.push_back(real_pauli_matrix(PauliOp::single(n, q, 'X')));
        out.push_back(real_pauli_matrix(PauliOp::x_type(n, gf2::bit(q)) * PauliOp::z_type(n, gf2::bit(q))));
        out.push_back(real_pauli_matrix(PauliOp::single(n, q, 'Z')));
    }
    return out;
}

inline Eigen::MatrixXd dense_hamiltonian(const SubsystemCode& code, const WeightSpec& w) {
    return build_full_hamiltonian(code, w).dense();
}

// --------------------------------------------------------------- propagation

// Fixed-step RK4 propagator over one sample interval, per coherence class.
class ClassPropagator {
  public:
    ClassPropagator(const DaviesGenerator& g, double interval) : g_(&g), interval_(interval) {
        if (!(interval >= 0)) throw IntegrationError("sample interval must be nonnegative");
        const double rate = g.max_total_rate();
        if (rate > 0 && interval > 0) {
            steps_ = static_cast<std::uint64_t>(std::ceil(interval * rate / 1e-3));
            step_ = interval / static_cast<double>(steps_);
        }
    }

    std::uint64_t steps() const { return steps_; }
    double step() const { return step_; }

    // Applies one interval to an operator given in the eigenbasis.
    void apply(Eigen::MatrixXd& m) const {
        const auto d = m.rows();
        std::vector<char> seen(static_cast<std::size_t>(d * d), 0);
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index k = 0; k < d; ++k) {
                if (m(i, k) == 0.0) continue;
                const std::size_t cls = g_->coherence_class(i, k);
                if (seen[static_cast<std::size_t>(i * d + k)]) continue;
                const auto& blk = block(cls);
                Eigen::VectorXd v(static_cast<Eigen::Index>(blk.entries.size()));
                for (std::size_t p = 0; p < blk.entries.size(); ++p) {
                    const auto [a, b] = blk.entries[p];
                    v[static_cast<Eigen::Index>(p)] = m(a, b);
                    seen[static_cast<std::size_t>(a * d + b)] = 1;
                }
                const Eigen::VectorXd w = blk.step_power * v;
                for (std::size_t p = 0; p < blk.entries.size(); ++p) {
                    const auto [a, b] = blk.entries[p];
                    out(a, b) = w[static_cast<Eigen::Index>(p)];
                }
            }
        m = out;
    }

  private:
    struct Block {
        std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
        Eigen::MatrixXd step_power;
    };

    const Block& block(std::size_t cls) const {
        auto it = cache_.find(cls);
        if (it != cache_.end()) return it->second;
        auto cb = g_->class_block(cls);
        const auto m = static_cast<Eigen::Index>(cb.entries.size());
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(m, m);
        if (steps_ > 0) {
            const Eigen::MatrixXd hg = step_ * cb.generator;
            // I + hG (I + hG/2 (I + hG/3 (I + hG/4)))
            Eigen::MatrixXd S = Eigen::MatrixXd::Identity(m, m) + hg / 4;
            S = Eigen::MatrixXd::Identity(m, m) + hg * S / 3;
            S = Eigen::MatrixXd::Identity(m, m) + hg * S / 2;
            S = Eigen::MatrixXd::Identity(m, m) + hg * S;
            for (std::uint64_t e = steps_; e > 0; e >>= 1) {
                if (e & 1) P = P * S;
                if (e > 1) S = S * S;
            }
        }
        return cache_.emplace(cls, Block{std::move(cb.entries), std::move(P)}).first->second;
    }

    const DaviesGenerator* g_;
    double interval_;
    std::uint64_t steps_ = 0;
    double step_ = 0;
    mutable std::map<std::size_t, Block> cache_;
};

// ------------------------------------------------------------ encoded system

// Code blocks with independent baths. Block 0 occupies the lowest qubits.
struct NoisySystem {
    BlockLayout layout;
    Assignment assignment;  // logical qubit -> (block, slot); covers every logical qubit
    std::vector<WeightSpec> weights;
    BathSpec bath;
    std::vector<DaviesGenerator> generators;

    NoisySystem(BlockLayout l, Assignment a, std::vector<WeightSpec> w, BathSpec b)
        : layout(std::move(l)), assignment(std::move(a)), weights(std::move(w)), bath(b) {
        if (weights.size() != layout.block_count()) throw DimensionError("one weight spec per block is required");
        std::size_t total_k = 0;
        for (std::size_t i = 0; i < layout.block_count(); ++i) total_k += layout.block(i).k;
        if (assignment.size() != total_k) throw DimensionError("assignment must cover every logical qubit");
        if (layout.qubit_count() > 10) throw SizeError("noisy systems are limited to 10 physical qubits");
        for (std::size_t i = 0; i < layout.block_count(); ++i) {
            const auto& code = layout.block(i);
            generators.emplace_back(dense_hamiltonian(code, weights[i]), single_qubit_couplings(code.n), bath);
        }
    }

    std::size_t logical_count() const { return assignment.size(); }
    std::size_t dimension() const { return std::size_t{1} << layout.qubit_count(); }

    PauliOp logical_word(const std::vector<char>& letters) const {
        PauliOp p = PauliOp::identity(layout.qubit_count());
        for (std::size_t j = 0; j < letters.size(); ++j) {
            if (letters[j] == 'I') continue;
            const auto& s = assignment[j];
            p = p * layout.embed(s.block, logical_pauli(layout.block(s.block), s.slot, letters[j]));
        }
        return p;
    }

    std::vector<PauliOp> stabilizers() const {
        std::vector<PauliOp> out;
        for (std::size_t b = 0; b < layout.block_count(); ++b)
            for (const auto& s : layout.block(b).stabilizers()) out.push_back(layout.embed(b, s));
        return out;
    }

    Eigen::MatrixXd hamiltonian() const {
        const auto dim = static_cast<Eigen::Index>(dimension());
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        std::vector<PauliTerm> terms;
        for (std::size_t b = 0; b < layout.block_count(); ++b) {
            const auto& code = layout.block(b);
            const auto w = weights[b].resolve(code);
            for (std::size_t g = 0; g < code.gauge.size(); ++g)
                if (w[g] != 0.0) terms.push_back({-w[g], layout.embed(b, code.gauge[g].op)});
        }
        return PauliSumOperator(layout.qubit_count(), std::move(terms)).dense();
    }

    // Eigenbasis of the whole system: Kronecker product of block bases.
    Eigen::MatrixXd eigenbasis() const {
        Eigen::MatrixXd v = Eigen::MatrixXd::Identity(1, 1);
        for (const auto& g : generators) {
            const Eigen::MatrixXd& b = g.eigenvectors();
            Eigen::MatrixXd next(v.rows() * b.rows(), v.cols() * b.cols());
            for (Eigen::Index i = 0; i < b.rows(); ++i)
                for (Eigen::Index j = 0; j < b.cols(); ++j) next.block(i * v.rows(), j * v.cols(), v.rows(), v.cols()) = b(i, j) * v;
            v = next;
        }
        return v;
    }
};

// All 4^k words over I, X, Y, Z; word w has letter (w >> 2j) & 3 on qubit j.
inline std::vector<char> word_letters(std::size_t w, std::size_t k) {
    static constexpr char L[4] = {'I', 'X', 'Y', 'Z'};
    std::vector<char> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = L[(w >> (2 * j)) & 3];
    return out;
}

inline PauliOp bare_word(const std::vector<char>& letters) {
    PauliOp p = PauliOp::identity(letters.size());
    for (std::size_t j = 0; j < letters.size(); ++j)
        if (letters[j] != 'I') p = p * PauliOp::single(letters.size(), j, letters[j]);
    return p;
}

// Projector onto the lowest-energy states of H inside the all +1 stabilizer space.
inline Eigen::MatrixXcd code_ground_projector(const NoisySystem& sys) {
    const auto dim = static_cast<Eigen::Index>(sys.dimension());
    Eigen::MatrixXcd ps = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& s : sys.stabilizers()) ps = 0.5 * (ps + apply_pauli_left(s, ps));
    const Eigen::MatrixXd h = sys.hamiltonian();
    const double shift = 2 * std::max(1.0, h.cwiseAbs().rowwise().sum().maxCoeff()) + 1;
    const Eigen::MatrixXd hs = h + shift * (Eigen::MatrixXd::Identity(dim, dim) - ps.real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hs);
    const double e0 = es.eigenvalues()[0];
    const double tol = 1e-9 * shift;
    Eigen::Index count = 0;
    while (count < dim && es.eigenvalues()[count] - e0 <= tol) ++count;
    const auto expected = static_cast<Eigen::Index>(std::size_t{1} << sys.logical_count());
    if (count != expected)
        throw EncodingError("code-sector ground space has dimension " + std::to_string(count) + ", expected " +
                            std::to_string(expected));
    const Eigen::MatrixXd g = es.eigenvectors().leftCols(count);
    return (g * g.transpose()).cast<cplx>();
}

inline Eigen::MatrixXcd encode_state(const Eigen::MatrixXcd& rho_l, const NoisySystem& sys) {
    const std::size_t k = sys.logical_count();
    const auto dl = static_cast<Eigen::Index>(std::size_t{1} << k);
    if (rho_l.rows() != dl || rho_l.cols() != dl) throw DimensionError("logical state has the wrong dimension");
    const Eigen::MatrixXcd pg = code_ground_projector(sys);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(pg.rows(), pg.cols());
    for (std::size_t w = 0; w < (std::size_t{1} << (2 * k)); ++w) {
        const auto letters = word_letters(w, k);
        const cplx c = pauli_expectation(rho_l, bare_word(letters));
        if (std::abs(c) == 0.0) continue;
        rho += c * apply_pauli_left(sys.logical_word(letters), pg);
    }
    rho /= static_cast<double>(dl);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    if (std::abs(tr - 1) > 1e-9) throw EncodingError("encoded state has trace " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) throw EncodingError("encoded state is not positive semidefinite");
    return rho;
}

inline Eigen::MatrixXcd decode_logical(const Eigen::MatrixXcd& rho, const NoisySystem& sys) {
    const std::size_t k = sys.logical_count();
    const auto dl = static_cast<Eigen::Index>(std::size_t{1} << k);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dl, dl);
    for (std::size_t w = 0; w < (std::size_t{1} << (2 * k)); ++w) {
        const auto letters = word_letters(w, k);
        const cplx c = pauli_expectation(rho, sys.logical_word(letters));
        out += c * pauli_matrix(bare_word(letters));
    }
    return out / static_cast<double>(dl);
}

// tr(rho Pi_S) with Pi_S the projector onto all stabilizers +1.
inline double code_space_population(const Eigen::MatrixXcd& rho, const NoisySystem& sys) {
    Eigen::MatrixXcd ps = Eigen::MatrixXcd::Identity(rho.rows(), rho.cols());
    for (const auto& s : sys.stabilizers()) ps = 0.5 * (ps + apply_pauli_left(s, ps));
    return (rho * ps).trace().real();
}

// -------------------------------------------------------------------- metrics

inline void require_same_shape(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw DimensionError("density matrices have mismatched dimensions");
}

inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    require_same_shape(a, b);
    Eigen::MatrixXcd d = a - b;
    d = 0.5 * (d + d.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double purity(const Eigen::MatrixXcd& rho) { return (rho * rho).trace().real(); }

inline double binary_entropy(double p) {
    if (p <= 0 || p >= 1) return 0.0;
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

// Eigenvalues clipped at zero, then renormalized.
inline Eigen::MatrixXcd clip_to_state(const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    if (ev.sum() <= 0) throw DimensionError("state has no positive part");
    ev /= ev.sum();
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

inline double concurrence(const Eigen::MatrixXcd& rho_in) {
    if (rho_in.rows() != 4 || rho_in.cols() != 4) throw DimensionError("concurrence needs a two-qubit state");
    const Eigen::MatrixXcd rho = clip_to_state(rho_in);
    const Eigen::MatrixXcd yy = pauli_matrix(bare_word({'Y', 'Y'}));
    const Eigen::MatrixXcd tilde = yy * rho.conjugate() * yy;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const Eigen::MatrixXcd sq =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    Eigen::MatrixXcd r = sq * tilde * sq;
    r = 0.5 * (r + r.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rs(r, Eigen::EigenvaluesOnly);
    std::vector<double> l;
    for (Eigen::Index i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(0.0, rs.eigenvalues()[i])));
    std::sort(l.rbegin(), l.rend());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

inline double entanglement_of_formation(const Eigen::MatrixXcd& rho) {
    const double c = std::min(1.0, concurrence(rho));
    return binary_entropy(0.5 * (1 + std::sqrt(std::max(0.0, 1 - c * c))));
}

// Keeps the listed qubits (bit j of the index is qubit j), in order.
inline Eigen::MatrixXcd partial_trace_keep(const Eigen::MatrixXcd& rho, std::size_t n, const std::vector<std::size_t>& keep) {
    const auto dk = static_cast<Eigen::Index>(std::size_t{1} << keep.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    std::uint64_t kmask = 0;
    for (std::size_t q : keep) kmask |= gf2::bit(q);
    auto project = [&](std::uint64_t s) {
        std::uint64_t v = 0;
        for (std::size_t j = 0; j < keep.size(); ++j)
            if ((s >> keep[j]) & 1) v |= gf2::bit(j);
        return static_cast<Eigen::Index>(v);
    };
    const std::uint64_t dim = std::uint64_t{1} << n;
    for (std::uint64_t r = 0; r < dim; ++r)
        for (std::uint64_t c = 0; c < dim; ++c)
            if ((r & ~kmask) == (c & ~kmask)) out(project(r), project(c)) += rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return out;
}

// ------------------------------------------------------------------ evolution

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> states;
    double max_trace_error = 0;
    double min_eigenvalue = 1;
    double max_hermiticity_error = 0;
    std::uint64_t steps_per_interval = 0;
};

inline void check_density_matrix(const Eigen::MatrixXcd& rho, double tol) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw DimensionError("initial state is not Hermitian");
    if (std::abs(rho.trace().real() - 1) > tol) throw DimensionError("initial state does not have unit trace");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw DimensionError("initial state is not positive semidefinite");
}

// Applies each block's one-interval map on its tensor factor. m is in the
// system eigenbasis; block b is the factor with stride prod_{b'<b} d_b'.
inline void apply_blocks(const std::vector<ClassPropagator>& props, const std::vector<std::size_t>& dims, Eigen::MatrixXd& m) {
    const auto D = m.rows();
    Eigen::Index stride = 1;
    for (std::size_t b = 0; b < props.size(); ++b) {
        const auto d = static_cast<Eigen::Index>(dims[b]);
        if (props.size() == 1) {
            props[b].apply(m);
            return;
        }
        // Enumerate row/col "rest" indices with this block's digit zero.
        std::vector<Eigen::Index> rest;
        for (Eigen::Index s = 0; s < D; ++s)
            if ((s / stride) % d == 0) rest.push_back(s);
        Eigen::MatrixXd sub(d, d);
        for (Eigen::Index r0 : rest)
            for (Eigen::Index c0 : rest) {
                bool any = false;
                for (Eigen::Index i = 0; i < d; ++i)
                    for (Eigen::Index k = 0; k < d; ++k) {
                        sub(i, k) = m(r0 + i * stride, c0 + k * stride);
                        any = any || sub(i, k) != 0.0;
                    }
                if (!any) continue;
                props[b].apply(sub);
                for (Eigen::Index i = 0; i < d; ++i)
                    for (Eigen::Index k = 0; k < d; ++k) m(r0 + i * stride, c0 + k * stride) = sub(i, k);
            }
        stride *= d;
    }
}

// Samples rho(t) at t = 0, dt, ..., samples * dt.
inline Trajectory evolve(const Eigen::MatrixXcd& rho0, const NoisySystem& sys, double t_max, std::size_t samples) {
    if (rho0.rows() != static_cast<Eigen::Index>(sys.dimension())) throw DimensionError("state has the wrong dimension");
    if (samples == 0) throw DimensionError("at least one sample interval is required");
    if (!(t_max >= 0) || !std::isfinite(t_max)) throw DimensionError("horizon must be finite and nonnegative");
    check_density_matrix(rho0, 1e-10);
    const double dt = t_max / static_cast<double>(samples);
    std::vector<ClassPropagator> props;
    std::vector<std::size_t> dims;
    for (const auto& g : sys.generators) {
        props.emplace_back(g, dt);
        dims.push_back(g.dimension());
    }
    const Eigen::MatrixXd V = sys.eigenbasis();
    Eigen::MatrixXcd e = V.transpose().cast<cplx>() * rho0 * V.cast<cplx>();
    // Drop rounding noise so that untouched coherence classes stay empty.
    const double floor = 1e-15 * std::max(1.0, e.cwiseAbs().maxCoeff());
    Eigen::MatrixXd re = e.real().unaryExpr([&](double x) { return std::abs(x) < floor ? 0.0 : x; });
    Eigen::MatrixXd im = e.imag().unaryExpr([&](double x) { return std::abs(x) < floor ? 0.0 : x; });

    Trajectory tr;
    tr.steps_per_interval = props.empty() ? 0 : props.front().steps();
    for (const auto& p : props) tr.steps_per_interval = std::max(tr.steps_per_interval, p.steps());
    for (std::size_t s = 0; s <= samples; ++s) {
        if (s > 0) {
            apply_blocks(props, dims, re);
            apply_blocks(props, dims, im);
        }
        Eigen::MatrixXcd rho(re.rows(), re.cols());
        rho.real() = V * re * V.transpose();
        rho.imag() = V * im * V.transpose();
        const double terr = std::abs(rho.trace().real() - 1);
        const double herr = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
        const double mine = es.eigenvalues().minCoeff();
        tr.max_trace_error = std::max(tr.max_trace_error, terr);
        tr.max_hermiticity_error = std::max(tr.max_hermiticity_error, herr);
        tr.min_eigenvalue = std::min(tr.min_eigenvalue, mine);
        if (terr > 1e-6 || mine < -1e-6)
            throw IntegrationError("state left the density-matrix set at t = " + std::to_string(s * dt) +
                                   " (trace error " + std::to_string(terr) + ", min eigenvalue " + std::to_string(mine) +
                                   "); use a smaller step");
        tr.times.push_back(static_cast<double>(s) * dt);
        tr.states.push_back(std::move(rho));
    }
    return tr;
}

inline Eigen::MatrixXcd gibbs_state(const NoisySystem& sys) {
    const Eigen::MatrixXd h = sys.hamiltonian();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double e0 = es.eigenvalues().minCoeff();
    Eigen::VectorXd p = (-(es.eigenvalues().array() - e0) / sys.bath.omega_T).exp();
    p /= p.sum();
    return (es.eigenvectors() * p.asDiagonal() * es.eigenvectors().transpose()).cast<cplx>();
}

// ----------------------------------------------------------------- experiments

enum class InitialState { PlusL, Bell };
enum class Blocks { Together, Separate };
enum class MetricSpace { Logical, Physical };

struct ExperimentSpec {
    std::string matrix_text;
    InitialState initial = InitialState::PlusL;
    Blocks blocks = Blocks::Together;
    std::vector<double> gammas = {0.2, 0.6, 1.0, 1.2};
    double t_max = 2e-8;
    std::size_t samples = 20;
    BathSpec bath;
    MetricSpace metrics = MetricSpace::Logical;
    GeneratorSet generator_set = GeneratorSet::NearestNeighbor;
};

struct SamplePoint {
    double gamma = 0;
    double t = 0;
    double trace_distance = 0;
    double purity = 0;
    std::optional<double> eof;
    double code_population = 1;
};

inline Eigen::MatrixXcd logical_initial_state(InitialState s, std::size_t k) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << k);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    if (s == InitialState::PlusL) {
        psi.setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
    } else {
        if (k < 2) throw DimensionError("a Bell state needs two logical qubits");
        psi[0] = psi[3] = 1 / std::sqrt(2.0);
    }
    return psi * psi.adjoint();
}

inline NoisySystem make_system(const ExperimentSpec& spec, double gamma) {
    const auto code = build_code(spec.matrix_text, spec.generator_set);
    std::vector<SubsystemCode> blocks{code};
    if (spec.blocks == Blocks::Separate) blocks.push_back(code);
    Assignment asg;
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t s = 0; s < code.k; ++s) asg.push_back({b, s});
    std::vector<WeightSpec> w(blocks.size(), WeightSpec::uniform(gamma * spec.bath.omega_T));
    return NoisySystem(BlockLayout(std::move(blocks)), std::move(asg), std::move(w), spec.bath);
}

inline std::vector<SamplePoint> run_experiment(const ExperimentSpec& spec, double gamma) {
    const NoisySystem sys = make_system(spec, gamma);
    const std::size_t k = sys.logical_count();
    const Eigen::MatrixXcd rho_l = logical_initial_state(spec.initial, k);
    const Eigen::MatrixXcd rho0 = encode_state(rho_l, sys);
    const auto traj = evolve(rho0, sys, spec.t_max, spec.samples);
    const bool bell = spec.initial == InitialState::Bell;
    std::vector<SamplePoint> out;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& rho = traj.states[i];
        SamplePoint p;
        p.gamma = gamma;
        p.t = traj.times[i];
        p.code_population = code_space_population(rho, sys);
        const Eigen::MatrixXcd dec = decode_logical(rho, sys);
        if (spec.metrics == MetricSpace::Logical) {
            p.trace_distance = trace_distance(dec, rho_l);
            p.purity = purity(dec);
        } else {
            p.trace_distance = trace_distance(rho, rho0);
            p.purity = purity(rho);
        }
        if (bell) p.eof = entanglement_of_formation(k == 2 ? dec : partial_trace_keep(dec, k, {0, 1}));
        out.push_back(p);
    }
    return out;
}

}  // namespace gaugeforge
