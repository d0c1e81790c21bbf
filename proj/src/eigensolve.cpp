#include "thermalab/spectral.hpp"

#include <cstring>
#include <stdexcept>

#include "thermalab/errors.hpp"
#include "eigensolve_internal.hpp"

#ifdef THERMALAB_HAVE_LAPACKE
#include <complex>
#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>
#endif

namespace thermalab {
namespace detail {

namespace {
constexpr Eigen::Index kLapackThreshold = 128;
}

void eigensolve_sym(Eigen::MatrixXd& a, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs) {
    const Eigen::Index n = a.rows();
#ifdef THERMALAB_HAVE_LAPACKE
    if (n >= kLapackThreshold) {
        evals.resize(n);
        evecs.resize(n, n);
        std::vector<lapack_int> isuppz(2 * std::max<Eigen::Index>(1, n));
        lapack_int m = 0;
        lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L',
                                         static_cast<lapack_int>(n), a.data(),
                                         static_cast<lapack_int>(n), 0, 0, 0, 0, 0.0, &m,
                                         evals.data(), evecs.data(),
                                         static_cast<lapack_int>(n), isuppz.data());
        if (info != 0 || m != n) throw std::runtime_error("dsyevr failed");
        a.resize(0, 0);
        return;
    }
#endif
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolve failed");
    evals = solver.eigenvalues();
    evecs = solver.eigenvectors();
    a.resize(0, 0);
}

void eigensolve_herm(Eigen::MatrixXcd& a, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs) {
    const Eigen::Index n = a.rows();
#ifdef THERMALAB_HAVE_LAPACKE
    if (n >= kLapackThreshold) {
        evals.resize(n);
        evecs.resize(n, n);
        std::vector<lapack_int> isuppz(2 * std::max<Eigen::Index>(1, n));
        lapack_int m = 0;
        lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'L',
                                         static_cast<lapack_int>(n), a.data(),
                                         static_cast<lapack_int>(n), 0, 0, 0, 0, 0.0, &m,
                                         evals.data(), evecs.data(),
                                         static_cast<lapack_int>(n), isuppz.data());
        if (info != 0 || m != n) throw std::runtime_error("zheevr failed");
        a.resize(0, 0);
        return;
    }
#endif
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian eigensolve failed");
    evals = solver.eigenvalues();
    evecs = solver.eigenvectors();
    a.resize(0, 0);
}

Eigen::VectorXd eigenvalues_sym(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
#ifdef THERMALAB_HAVE_LAPACKE
    if (n >= kLapackThreshold) {
        Eigen::VectorXd evals(n);
        lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L',
                                        static_cast<lapack_int>(n), a.data(),
                                        static_cast<lapack_int>(n), evals.data());
        if (info != 0) throw std::runtime_error("dsyev failed");
        return evals;
    }
#endif
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

Eigen::VectorXd eigenvalues_herm(Eigen::MatrixXcd a) {
    const Eigen::Index n = a.rows();
#ifdef THERMALAB_HAVE_LAPACKE
    if (n >= kLapackThreshold) {
        Eigen::VectorXd evals(n);
        lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'L',
                                        static_cast<lapack_int>(n), a.data(),
                                        static_cast<lapack_int>(n), evals.data());
        if (info != 0) throw std::runtime_error("zheev failed");
        return evals;
    }
#endif
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Spin-flip parity sectors

bool spin_flip_symmetric(const LocalHamiltonian& h, double tol) {
    if (h.local_dim() != 2) return false;
    const MatrixXcd x1 = (MatrixXcd(2, 2) << 0, 1, 1, 0).finished();
    for (const auto& term : h.terms()) {
        MatrixXcd flip;
        if (term.support.size() == 1) {
            flip = x1;
        } else {
            flip = MatrixXcd::Zero(4, 4);
            flip(0, 3) = flip(1, 2) = flip(2, 1) = flip(3, 0) = 1.0;
        }
        if (((flip * term.matrix - term.matrix * flip).cwiseAbs().maxCoeff()) > tol)
            return false;
    }
    return true;
}

namespace {

bool terms_are_real(const LocalHamiltonian& h, double tol = 1e-14) {
    for (const auto& term : h.terms())
        if (term.matrix.imag().cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

// Local (row-major over the support sites, site order ascending = most
// significant first) digits of basis state s on `sites` for qubits.
inline std::uint64_t local_bits(std::uint64_t s, const std::vector<int>& shifts) {
    std::uint64_t out = 0;
    for (int shift : shifts) out = (out << 1) | ((s >> shift) & 1u);
    return out;
}

inline std::uint64_t replace_bits(std::uint64_t s, const std::vector<int>& shifts,
                                  std::uint64_t bits) {
    int k = static_cast<int>(shifts.size());
    for (int i = 0; i < k; ++i) {
        std::uint64_t bit = (bits >> (k - 1 - i)) & 1u;
        s = (s & ~(std::uint64_t(1) << shifts[i])) | (bit << shifts[i]);
    }
    return s;
}

// Fills the parity-sector matrix. Rows/cols indexed by orbit representatives;
// H^{±}[a,b] = H[s_a, s_b] ± H[s_a, flip(s_b)].
template <typename Mat, typename Scalar>
void fill_sector(Mat& hs, int sign, const LocalHamiltonian& h,
                 const std::vector<std::uint64_t>& reps,
                 const std::vector<std::int32_t>& orbit_of, int n_sites) {
    const std::uint64_t mask = (n_sites == 64) ? ~std::uint64_t(0)
                                               : ((std::uint64_t(1) << n_sites) - 1);
    const Eigen::Index m = static_cast<Eigen::Index>(reps.size());
    hs.setZero(m, m);
    for (const auto& term : h.terms()) {
        std::vector<int> shifts;
        for (int v : term.support) shifts.push_back(n_sites - 1 - v);
        const Eigen::Index td = term.matrix.rows();
        for (Eigen::Index b = 0; b < m; ++b) {
            const std::uint64_t s = reps[b];
            const std::uint64_t j = local_bits(s, shifts);
            for (Eigen::Index i = 0; i < td; ++i) {
                Complex amp = term.matrix(i, static_cast<Eigen::Index>(j));
                if (amp == Complex(0, 0)) continue;
                std::uint64_t sp = replace_bits(s, shifts, static_cast<std::uint64_t>(i));
                std::uint64_t flipped = (~sp) & mask;
                double parity = 1.0;
                std::uint64_t rep = sp;
                if (flipped < sp) {
                    rep = flipped;
                    parity = (sign > 0) ? 1.0 : -1.0;
                }
                Eigen::Index a = orbit_of[rep];
                if constexpr (std::is_same_v<Scalar, double>)
                    hs(a, b) += parity * amp.real();
                else
                    hs(a, b) += parity * amp;
            }
        }
    }
}

} // namespace

struct SpectralBuild {
    static void sectored(SpectralDecomposition& sd, const LocalHamiltonian& h) {
        const int n = h.num_sites();
        const Eigen::Index dim = Eigen::Index(1) << n;
        sd.sectored_ = true;
        sd.reps_.reserve(dim / 2);
        sd.orbit_of_.assign(dim, -1);
        const std::uint64_t mask = (std::uint64_t(1) << n) - 1;
        for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim); ++s) {
            std::uint64_t f = (~s) & mask;
            if (s < f) {
                sd.orbit_of_[s] = static_cast<std::int32_t>(sd.reps_.size());
                sd.reps_.push_back(s);
            }
        }

        sd.real_ = terms_are_real(h);
        VectorXd vals[2];
        for (int sec = 0; sec < 2; ++sec) {
            int sign = (sec == 0) ? +1 : -1;
            if (sd.real_) {
                MatrixXd hs;
                fill_sector<MatrixXd, double>(hs, sign, h, sd.reps_, sd.orbit_of_, n);
                detail::eigensolve_sym(hs, vals[sec], sd.sector_vec_[sec]);
            } else {
                MatrixXcd hs;
                fill_sector<MatrixXcd, Complex>(hs, sign, h, sd.reps_, sd.orbit_of_, n);
                detail::eigensolve_herm(hs, vals[sec], sd.sector_cvec_[sec]);
            }
        }

        // Merge the two ascending sector spectra.
        const Eigen::Index m = static_cast<Eigen::Index>(sd.reps_.size());
        sd.energies_.resize(dim);
        sd.source_.resize(dim);
        Eigen::Index i0 = 0, i1 = 0;
        for (Eigen::Index k = 0; k < dim; ++k) {
            bool take0 = (i1 >= m) || (i0 < m && vals[0][i0] <= vals[1][i1]);
            if (take0) {
                sd.energies_[k] = vals[0][i0];
                sd.source_[k] = {0, static_cast<std::int32_t>(i0++)};
            } else {
                sd.energies_[k] = vals[1][i1];
                sd.source_[k] = {1, static_cast<std::int32_t>(i1++)};
            }
        }
    }
};

SpectralDecomposition SpectralDecomposition::compute(const LocalHamiltonian& h,
                                                     Index sector_threshold) {
    SpectralDecomposition sd;
    sd.dims_ = h.dims();
    Index dim = 1;
    for (int d : sd.dims_) dim *= d;

    if (h.local_dim() == 2 && h.num_sites() <= 62 && dim > sector_threshold &&
        spin_flip_symmetric(h)) {
        SpectralBuild::sectored(sd, h);
        return sd;
    }

    auto dense = assemble_dense(h);
    sd.dense_ = dense.eigensystem();
    sd.energies_ = sd.dense_->values();
    sd.real_ = sd.dense_->real_vectors();
    return sd;
}

VectorXd SpectralDecomposition::eigenvalues_only(const LocalHamiltonian& h,
                                                 Index sector_threshold) {
    std::vector<int> dims = h.dims();
    Index dim = 1;
    for (int d : dims) dim *= d;
    if (h.local_dim() == 2 && h.num_sites() <= 62 && dim > sector_threshold &&
        spin_flip_symmetric(h)) {
        const int n = h.num_sites();
        std::vector<std::uint64_t> reps;
        std::vector<std::int32_t> orbit_of(dim, -1);
        const std::uint64_t mask = (std::uint64_t(1) << n) - 1;
        for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim); ++s) {
            std::uint64_t f = (~s) & mask;
            if (s < f) {
                orbit_of[s] = static_cast<std::int32_t>(reps.size());
                reps.push_back(s);
            }
        }
        bool real = terms_are_real(h);
        VectorXd all(dim);
        Index pos = 0;
        for (int sec = 0; sec < 2; ++sec) {
            int sign = (sec == 0) ? +1 : -1;
            VectorXd vals;
            if (real) {
                MatrixXd hs;
                fill_sector<MatrixXd, double>(hs, sign, h, reps, orbit_of, n);
                vals = detail::eigenvalues_sym(std::move(hs));
            } else {
                MatrixXcd hs;
                fill_sector<MatrixXcd, Complex>(hs, sign, h, reps, orbit_of, n);
                vals = detail::eigenvalues_herm(std::move(hs));
            }
            all.segment(pos, vals.size()) = vals;
            pos += vals.size();
        }
        std::sort(all.data(), all.data() + all.size());
        return all;
    }
    auto dense = assemble_dense(h);
    if (dense.matrix().imag().cwiseAbs().maxCoeff() <= 1e-14)
        return detail::eigenvalues_sym(dense.matrix().real());
    return detail::eigenvalues_herm(dense.matrix());
}

void SpectralDecomposition::reconstruct_real(Index k, VectorXd& out) const {
    auto [sec, col] = source_[k];
    const auto& v = sector_vec_[sec].col(col);
    const double inv_sqrt2 = 0.7071067811865475244;
    const double sign = (sec == 0) ? 1.0 : -1.0;
    out.setZero(dim());
    const std::uint64_t mask = (std::uint64_t(1) << dims_.size()) - 1;
    for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(reps_.size()); ++a) {
        std::uint64_t s = reps_[a];
        std::uint64_t f = (~s) & mask;
        out[static_cast<Index>(s)] = inv_sqrt2 * v[a];
        out[static_cast<Index>(f)] = sign * inv_sqrt2 * v[a];
    }
}

void SpectralDecomposition::eigenvector(Index k, VectorXcd& out) const {
    if (!sectored_) {
        out = dense_->column(k);
        return;
    }
    if (real_) {
        VectorXd tmp;
        reconstruct_real(k, tmp);
        out = tmp.cast<Complex>();
        return;
    }
    auto [sec, col] = source_[k];
    const auto& v = sector_cvec_[sec].col(col);
    const double inv_sqrt2 = 0.7071067811865475244;
    const double sign = (sec == 0) ? 1.0 : -1.0;
    out.setZero(dim());
    const std::uint64_t mask = (std::uint64_t(1) << dims_.size()) - 1;
    for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(reps_.size()); ++a) {
        std::uint64_t s = reps_[a];
        std::uint64_t f = (~s) & mask;
        out[static_cast<Index>(s)] = inv_sqrt2 * v[a];
        out[static_cast<Index>(f)] = sign * inv_sqrt2 * v[a];
    }
}

std::vector<MatrixXcd> SpectralDecomposition::weighted_reduced(
    const std::vector<VectorXd>& weights, const Region& keep) const {
    const Index dk = subspace_dim(dims_, keep);
    Region comp = Region::range(0, static_cast<int>(dims_.size())).minus(keep);
    const Index dc = subspace_dim(dims_, comp);
    auto keep_off = subspace_offsets(dims_, keep);
    auto comp_off = subspace_offsets(dims_, comp);

    std::vector<MatrixXcd> out(weights.size(), MatrixXcd::Zero(dk, dk));
    std::vector<MatrixXd> out_r;
    const bool real = real_vectors();
    if (real) out_r.assign(weights.size(), MatrixXd::Zero(dk, dk));

    VectorXd vr;
    VectorXcd vc;
    MatrixXd mr(dk, dc);
    MatrixXcd mc(dk, dc);
    for (Index k = 0; k < dim(); ++k) {
        bool needed = false;
        for (const auto& w : weights)
            if (w[k] != 0.0) { needed = true; break; }
        if (!needed) continue;

        if (real) {
            if (sectored_) {
                reconstruct_real(k, vr);
            } else {
                vr = dense_->vectors_real().col(k);
            }
            for (Index a = 0; a < dk; ++a)
                for (Index c = 0; c < dc; ++c) mr(a, c) = vr[keep_off[a] + comp_off[c]];
            for (std::size_t q = 0; q < weights.size(); ++q)
                if (weights[q][k] != 0.0)
                    out_r[q].noalias() += weights[q][k] * (mr * mr.transpose());
        } else {
            eigenvector(k, vc);
            for (Index a = 0; a < dk; ++a)
                for (Index c = 0; c < dc; ++c) mc(a, c) = vc[keep_off[a] + comp_off[c]];
            for (std::size_t q = 0; q < weights.size(); ++q)
                if (weights[q][k] != 0.0)
                    out[q].noalias() += weights[q][k] * (mc * mc.adjoint());
        }
    }
    if (real)
        for (std::size_t q = 0; q < weights.size(); ++q) out[q] = out_r[q].cast<Complex>();
    return out;
}

MatrixXcd SpectralDecomposition::weighted_reduced(const VectorXd& weights,
                                                  const Region& keep) const {
    return weighted_reduced(std::vector<VectorXd>{weights}, keep)[0];
}

} // namespace thermalab
