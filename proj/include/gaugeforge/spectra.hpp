#pragma once

// Spectrum of the suppression Hamiltonian H = -sum_G w_G G over the gauge
// generators: per stabilizer sector in the auxiliary-qubit basis, and in the
// full 2^n space as a cross-check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaugeforge/codes.hpp"
#include "gaugeforge/error.hpp"
#include "gaugeforge/extraction.hpp"
#include "gaugeforge/pauli.hpp"

namespace gaugeforge {

struct WeightSpec {
    enum class Kind { Uniform, XZ, Explicit };
    Kind kind = Kind::Uniform;
    double x_weight = 1.0;
    double z_weight = 1.0;
    std::vector<double> list;

    static WeightSpec uniform(double w) { return {Kind::Uniform, w, w, {}}; }
    static WeightSpec xz(double x, double z) { return {Kind::XZ, x, z, {}}; }
    // One weight per gauge generator, in the code's generator order.
    static WeightSpec explicit_list(std::vector<double> w) { return {Kind::Explicit, 0.0, 0.0, std::move(w)}; }

    std::vector<double> resolve(const SubsystemCode& code) const {
        std::vector<double> out;
        if (kind == Kind::Explicit) {
            if (list.size() != code.gauge.size())
                throw WeightError("expected " + std::to_string(code.gauge.size()) + " weights, got " +
                                  std::to_string(list.size()));
            out = list;
        } else {
            for (const auto& g : code.gauge) out.push_back(g.x_type ? x_weight : z_weight);
        }
        bool any = false;
        for (double w : out) {
            if (!std::isfinite(w)) throw WeightError("weights must be finite");
            any = any || w != 0.0;
        }
        if (!any && !out.empty()) throw WeightError("at least one weight must be nonzero");
        return out;
    }
};

// Gauge generator rewritten as sign * prod(stabilizers) * X-word * Z-word on
// the auxiliary qubits.
struct GeneratorImage {
    std::size_t generator = 0;
    int sign = 1;
    std::uint64_t stabilizers = 0;  // bit i: stabilizer i (X-type first)
    std::uint64_t aux_x = 0;
    std::uint64_t aux_z = 0;
};

inline std::vector<GeneratorImage> decompose_generators(const SubsystemCode& code, const ReducedBasis& rb) {
    const auto basis = rb.ordered_basis();
    const std::size_t ns = rb.x_stabilizers.size() + rb.z_stabilizers.size();
    const std::size_t a = rb.aux_pairs.size();
    if (ns > 64 || a > 64) throw SizeError("too many stabilizers or auxiliary pairs");
    std::vector<GeneratorImage> out;
    for (std::size_t g = 0; g < code.gauge.size(); ++g) {
        const auto dec = express_in_basis(code.gauge[g].op, basis);
        GeneratorImage im{g, dec.sign, 0, 0, 0};
        for (std::size_t i = 0; i < ns; ++i)
            if (dec.exponents[i]) im.stabilizers |= gf2::bit(i);
        for (std::size_t j = 0; j < a; ++j) {
            if (dec.exponents[ns + j]) im.aux_x |= gf2::bit(j);
            if (dec.exponents[ns + a + j]) im.aux_z |= gf2::bit(j);
        }
        out.push_back(im);
    }
    return out;
}

// Sector index: bit i set means stabilizer i takes the value -1.
inline int stabilizer_value(std::uint64_t sector, std::size_t i) { return gf2::test(sector, i) ? -1 : 1; }

struct SectorTerm {
    double coefficient = 0.0;
    std::uint64_t aux_x = 0;
    std::uint64_t aux_z = 0;
};

struct SectorHamiltonian {
    std::uint64_t sector = 0;
    std::vector<int> values;  // stabilizer eigenvalues, X-type then Z-type
    std::size_t aux_count = 0;
    std::vector<SectorTerm> terms;
    Eigen::MatrixXd matrix;
};

inline constexpr std::size_t kDenseLimit = 4096;

inline std::vector<SectorTerm> sector_terms(const std::vector<GeneratorImage>& images, const std::vector<double>& w,
                                            std::uint64_t sector) {
    std::vector<SectorTerm> terms;
    for (const auto& im : images) {
        if (w.at(im.generator) == 0.0) continue;
        const int scalar = im.sign * ((std::popcount(im.stabilizers & sector) % 2) ? -1 : 1);
        terms.push_back({-w[im.generator] * scalar, im.aux_x, im.aux_z});
    }
    return terms;
}

inline Eigen::MatrixXd sector_matrix(const std::vector<SectorTerm>& terms, std::size_t aux_count) {
    if (aux_count > 12) throw SizeError("sector dimension exceeds the dense limit of " + std::to_string(kDenseLimit));
    const std::size_t dim = std::size_t{1} << aux_count;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& t : terms)
        for (std::size_t s = 0; s < dim; ++s) {
            const double v = (std::popcount(t.aux_z & s) % 2) ? -t.coefficient : t.coefficient;
            m(static_cast<Eigen::Index>(s ^ t.aux_x), static_cast<Eigen::Index>(s)) += v;
        }
    return m;
}

inline SectorHamiltonian build_sector_hamiltonian(const std::vector<GeneratorImage>& images, const ReducedBasis& rb,
                                                  const std::vector<double>& weights, std::uint64_t sector) {
    SectorHamiltonian sh;
    sh.sector = sector;
    const std::size_t ns = rb.x_stabilizers.size() + rb.z_stabilizers.size();
    for (std::size_t i = 0; i < ns; ++i) sh.values.push_back(stabilizer_value(sector, i));
    sh.aux_count = rb.aux_pairs.size();
    sh.terms = sector_terms(images, weights, sector);
    sh.matrix = sector_matrix(sh.terms, sh.aux_count);
    return sh;
}

inline SectorHamiltonian build_sector_hamiltonian(const SubsystemCode& code, const ReducedBasis& rb, const WeightSpec& w,
                                                  std::uint64_t sector) {
    return build_sector_hamiltonian(decompose_generators(code, rb), rb, w.resolve(code), sector);
}

inline std::vector<double> dense_spectrum(const Eigen::MatrixXd& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ConsistencyError("dense_spectrum: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline std::vector<double> sector_spectrum(const SectorHamiltonian& sh) { return dense_spectrum(sh.matrix); }

struct SectorSummary {
    std::uint64_t sector = 0;
    double ground = 0.0;
    std::optional<double> first_excited;
    std::size_t degeneracy = 1;
};

struct SeparationReport {
    std::uint64_t code_sector = 0;
    std::size_t stabilizer_count = 0;
    double e0_code = 0.0;
    double separation = 0.0;
    std::optional<double> gauge_gap;  // first excited minus ground inside the code sector
    bool suppresses = false;          // false when some other sector reaches the code-sector ground energy
    std::uint64_t closest_sector = 0;
    std::vector<SectorSummary> sectors;
};

inline SectorSummary summarize(std::uint64_t sector, const std::vector<double>& ev) {
    SectorSummary s;
    s.sector = sector;
    s.ground = ev.front();
    const double tol = 1e-9 * std::max(1.0, std::abs(ev.back()) + std::abs(ev.front()));
    s.degeneracy = 0;
    for (double e : ev) {
        if (e - s.ground <= tol)
            ++s.degeneracy;
        else {
            s.first_excited = e;
            break;
        }
    }
    return s;
}

inline SeparationReport energy_separation(const SubsystemCode& code, const ReducedBasis& rb, const WeightSpec& w,
                                          std::uint64_t code_sector = 0) {
    const std::size_t ns = rb.x_stabilizers.size() + rb.z_stabilizers.size();
    if (ns > 16) throw SizeError("energy_separation: more than 16 stabilizers");
    if (rb.aux_pairs.size() > 12) throw SizeError("energy_separation: more than 12 auxiliary pairs");
    const auto images = decompose_generators(code, rb);
    const auto weights = w.resolve(code);
    SeparationReport rep;
    rep.code_sector = code_sector;
    rep.stabilizer_count = ns;
    const std::uint64_t count = std::uint64_t{1} << ns;
    if (code_sector >= count) throw DimensionError("code sector index out of range");
    for (std::uint64_t s = 0; s < count; ++s)
        rep.sectors.push_back(summarize(s, dense_spectrum(sector_matrix(sector_terms(images, weights, s), rb.aux_pairs.size()))));
    const auto& code_summary = rep.sectors[code_sector];
    rep.e0_code = code_summary.ground;
    if (code_summary.first_excited) rep.gauge_gap = *code_summary.first_excited - code_summary.ground;
    rep.separation = std::numeric_limits<double>::infinity();
    for (const auto& s : rep.sectors) {
        if (s.sector == code_sector) continue;
        if (s.ground - rep.e0_code < rep.separation) {
            rep.separation = s.ground - rep.e0_code;
            rep.closest_sector = s.sector;
        }
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(rep.e0_code));
    rep.suppresses = count > 1 && rep.separation > tol;
    if (count == 1) rep.separation = 0.0;
    return rep;
}

// Weighted Pauli sum acting on 2^n amplitudes; qubit q is bit q of the index.
struct PauliTerm {
    double coefficient = 0.0;
    PauliOp op;
};

class PauliSumOperator {
  public:
    PauliSumOperator(std::size_t n, std::vector<PauliTerm> terms) : n_(n), terms_(std::move(terms)) {
        if (n_ > 20) throw SizeError("full-space operator limited to 20 qubits");
        for (const auto& t : terms_) {
            if (t.op.n != n_) throw DimensionError("term acts on the wrong number of qubits");
            const int e = (t.op.phase + std::popcount(t.op.x & t.op.z)) % 4;
            if (e % 2) throw ConsistencyError("term is not a real operator");
            signs_.push_back(e == 0 ? 1.0 : -1.0);
        }
    }

    std::size_t qubits() const { return n_; }
    std::size_t dimension() const { return std::size_t{1} << n_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }

    void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
        const std::size_t dim = dimension();
        out.setZero(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const auto& t = terms_[k];
            const double c = t.coefficient * signs_[k];
            for (std::size_t s = 0; s < dim; ++s) {
                const double v = (std::popcount(t.op.z & s) % 2) ? -c : c;
                out[static_cast<Eigen::Index>(s ^ t.op.x)] += v * in[static_cast<Eigen::Index>(s)];
            }
        }
    }

    Eigen::MatrixXd dense() const {
        if (n_ > 12) throw SizeError("dense full-space matrix limited to 12 qubits");
        const auto dim = static_cast<Eigen::Index>(dimension());
        Eigen::MatrixXd m(dim, dim);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim), col;
        for (Eigen::Index j = 0; j < dim; ++j) {
            e[j] = 1.0;
            apply(e, col);
            m.col(j) = col;
            e[j] = 0.0;
        }
        return m;
    }

  private:
    std::size_t n_;
    std::vector<PauliTerm> terms_;
    std::vector<double> signs_;
};

inline PauliSumOperator build_full_hamiltonian(const SubsystemCode& code, const WeightSpec& w) {
    const auto weights = w.resolve(code);
    std::vector<PauliTerm> terms;
    for (std::size_t g = 0; g < code.gauge.size(); ++g)
        if (weights[g] != 0.0) terms.push_back({-weights[g], code.gauge[g].op});
    return PauliSumOperator(code.n, std::move(terms));
}

struct LanczosOptions {
    double tolerance = 1e-8;
    std::size_t krylov_dim = 80;
    std::size_t max_restarts = 200;
    std::uint64_t seed = 0x5eed;
};

struct LanczosResult {
    double value = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;
    std::size_t matvecs = 0;
};

// Lowest eigenpair of a real symmetric operator. Krylov blocks with full
// reorthogonalization, restarted from the current Ritz vector.
template <class Op>
LanczosResult lowest_eigenpair(const Op& op, const LanczosOptions& opt = {}) {
    const auto dim = static_cast<Eigen::Index>(op.dimension());
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = normal(rng);
    x.normalize();

    LanczosResult res;
    const Eigen::Index m_max = std::min<Eigen::Index>(static_cast<Eigen::Index>(opt.krylov_dim), dim);
    Eigen::MatrixXd V(dim, m_max);
    Eigen::VectorXd w(dim), hx(dim);
    for (std::size_t restart = 0; restart <= opt.max_restarts; ++restart) {
        std::vector<double> alpha, beta;
        V.col(0) = x;
        Eigen::Index m = 0;
        for (; m < m_max; ++m) {
            op.apply(V.col(m), w);
            ++res.matvecs;
            alpha.push_back(V.col(m).dot(w));
            for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(m + 1) * (V.leftCols(m + 1).transpose() * w);
            const double b = w.norm();
            if (m + 1 == m_max || b <= 1e-14 * std::max(1.0, std::abs(alpha.back()))) {
                ++m;
                break;
            }
            beta.push_back(b);
            V.col(m + 1) = w / b;
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            T(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const double theta = es.eigenvalues()[0];
        x = V.leftCols(m) * es.eigenvectors().col(0);
        x.normalize();
        op.apply(x, hx);
        ++res.matvecs;
        res.value = theta;
        res.residual = (hx - theta * x).norm();
        if (res.residual <= opt.tolerance * std::max(1.0, std::abs(theta))) {
            res.vector = x;
            return res;
        }
    }
    throw ConvergenceError("Lanczos did not converge; residual " + std::to_string(res.residual));
}

inline double full_ground_energy(const PauliSumOperator& op, const LanczosOptions& opt = {}) {
    if (op.dimension() <= 64) return dense_spectrum(op.dense()).front();
    return lowest_eigenpair(op, opt).value;
}

// Closed forms for the two small codes, ascending.
inline std::vector<double> analytic_412(double l1, double l2, double e1, double e2, int x, int z) {
    const double r = std::hypot(l1 + x * l2, e1 + z * e2);
    return {-r, r};
}

inline std::vector<double> analytic_622(double lambda, double eta, int x, int z) {
    const double sp = (x + z) / 2.0;
    std::vector<double> ev;
    if (sp != 0.0) {
        const double r = std::sqrt(8 * lambda * lambda + eta * eta);
        ev = {-eta * sp - r, -eta * sp + r, 2 * eta * sp, 0.0};
    } else {
        const double r = 2 * std::sqrt(2 * lambda * lambda + eta * eta);
        ev = {-r, r, 0.0, 0.0};
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline std::string sector_bits(std::uint64_t sector, std::size_t count) { return gf2::to_bitstring(sector, count); }

}  // namespace gaugeforge
