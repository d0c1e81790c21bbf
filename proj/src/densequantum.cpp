#include "thermalab/densequantum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "thermalab/errors.hpp"
#include "eigensolve_internal.hpp"

namespace thermalab {

namespace {
constexpr double kHermTol = 1e-12;
constexpr double kRealTol = 1e-14;
// Populations below this are treated as exact zeros in rho^tau and entropies.
constexpr double kEigenvalueFloor = 1e-14;

bool is_numerically_real(const MatrixXcd& m) {
    return m.imag().cwiseAbs().maxCoeff() <= kRealTol;
}
} // namespace

// ---------------------------------------------------------------------------
// Eigensystem

Eigensystem Eigensystem::compute(const MatrixXcd& m) {
    Eigensystem e;
    if (is_numerically_real(m)) {
        MatrixXd a = m.real();
        detail::eigensolve_sym(a, e.values_, e.vec_r_);
        e.real_ = true;
    } else {
        MatrixXcd a = m;
        detail::eigensolve_herm(a, e.values_, e.vec_c_);
        e.real_ = false;
    }
    return e;
}

Eigensystem Eigensystem::from_real(VectorXd values, MatrixXd vectors) {
    Eigensystem e;
    e.values_ = std::move(values);
    e.vec_r_ = std::move(vectors);
    e.real_ = true;
    return e;
}

Eigensystem Eigensystem::from_complex(VectorXd values, MatrixXcd vectors) {
    Eigensystem e;
    e.values_ = std::move(values);
    e.vec_c_ = std::move(vectors);
    e.real_ = false;
    return e;
}

const MatrixXd& Eigensystem::vectors_real() const {
    if (!real_) throw std::logic_error("eigenvectors are complex");
    return vec_r_;
}

const MatrixXcd& Eigensystem::vectors_complex() const {
    if (real_) throw std::logic_error("eigenvectors are stored as real");
    return vec_c_;
}

VectorXcd Eigensystem::column(Index k) const {
    if (real_) return vec_r_.col(k).cast<Complex>();
    return vec_c_.col(k);
}

MatrixXcd Eigensystem::to_eigenbasis(const MatrixXcd& a) const {
    if (real_) {
        MatrixXd tr = a.real() * vec_r_;
        MatrixXd ti = a.imag() * vec_r_;
        MatrixXcd out(dim(), dim());
        out.real() = vec_r_.transpose() * tr;
        out.imag() = vec_r_.transpose() * ti;
        return out;
    }
    return vec_c_.adjoint() * a * vec_c_;
}

MatrixXcd Eigensystem::from_diagonal(const VectorXd& d) const {
    if (real_) {
        MatrixXd out = vec_r_ * d.asDiagonal() * vec_r_.transpose();
        return out.cast<Complex>();
    }
    return vec_c_ * d.asDiagonal() * vec_c_.adjoint();
}

// ---------------------------------------------------------------------------
// DenseOperator

DenseOperator::DenseOperator(std::vector<int> dims, MatrixXcd matrix)
    : dims_(std::move(dims)), matrix_(std::move(matrix)) {
    Index expected = 1;
    for (int d : dims_) {
        if (d < 1) throw std::invalid_argument("site dimension must be positive");
        expected *= d;
    }
    if (matrix_.rows() != expected || matrix_.cols() != expected)
        throw std::invalid_argument("matrix size does not match the product of site dims");
    hermitian_ = matrix_.size() == 0 ||
                 (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= kHermTol;
}

DenseOperator DenseOperator::identity(std::vector<int> dims) {
    Index d = 1;
    for (int x : dims) d *= x;
    return DenseOperator(std::move(dims), MatrixXcd::Identity(d, d));
}

std::shared_ptr<const Eigensystem> DenseOperator::eigensystem() const {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    if (!eig_) {
        if (!hermitian_)
            throw std::invalid_argument("eigendecomposition requires a Hermitian operator");
        eig_ = std::make_shared<const Eigensystem>(Eigensystem::compute(matrix_));
    }
    return eig_;
}

DenseOperator DenseOperator::operator+(const DenseOperator& other) const {
    if (dims_ != other.dims_) throw std::invalid_argument("dimension mismatch");
    return DenseOperator(dims_, matrix_ + other.matrix_);
}

DenseOperator DenseOperator::operator-(const DenseOperator& other) const {
    if (dims_ != other.dims_) throw std::invalid_argument("dimension mismatch");
    return DenseOperator(dims_, matrix_ - other.matrix_);
}

DenseOperator DenseOperator::scaled(Complex factor) const {
    return DenseOperator(dims_, factor * matrix_);
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const DenseOperator& op) : dims_(op.dims()) {
    if (!op.hermitian()) throw std::invalid_argument("density matrix must be Hermitian");
    basis_ = op.eigensystem();
    VectorXd pops = basis_->values();
    double trace = pops.sum();
    if (std::abs(trace - 1.0) > 1e-12)
        throw std::invalid_argument("density matrix trace deviates from 1 beyond 1e-12");
    if (pops.minCoeff() < -1e-12)
        throw std::invalid_argument("density matrix has an eigenvalue below -1e-12");
    pops = pops.cwiseMax(0.0);
    pops /= pops.sum();
    populations_ = std::move(pops);
}

DensityMatrix::DensityMatrix(std::vector<int> dims, std::shared_ptr<const Eigensystem> basis,
                             VectorXd populations)
    : dims_(std::move(dims)), basis_(std::move(basis)), populations_(std::move(populations)) {
    if (populations_.size() != basis_->dim())
        throw std::invalid_argument("population count does not match basis dimension");
    if (populations_.minCoeff() < -1e-12)
        throw std::invalid_argument("negative population");
    if (std::abs(populations_.sum() - 1.0) > 1e-10)
        throw std::invalid_argument("populations do not sum to 1");
}

VectorXd DensityMatrix::eigenvalues_ascending() const {
    VectorXd v = populations_;
    std::sort(v.data(), v.data() + v.size());
    return v;
}

const MatrixXcd& DensityMatrix::matrix() const {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    if (!matrix_cache_)
        matrix_cache_ = std::make_shared<const MatrixXcd>(basis_->from_diagonal(populations_));
    return *matrix_cache_;
}

DenseOperator DensityMatrix::to_operator() const { return DenseOperator(dims_, matrix()); }

// ---------------------------------------------------------------------------
// Index bookkeeping

Index subspace_dim(const std::vector<int>& dims, const Region& sites) {
    Index d = 1;
    for (int v : sites) d *= dims.at(v);
    return d;
}

std::vector<Index> subspace_offsets(const std::vector<int>& dims, const Region& sites) {
    const int n = static_cast<int>(dims.size());
    std::vector<Index> stride(n, 1);
    for (int v = n - 2; v >= 0; --v) stride[v] = stride[v + 1] * dims[v + 1];

    for (int v : sites)
        if (v < 0 || v >= n) throw std::invalid_argument("site index outside the system");

    const Index dim_s = subspace_dim(dims, sites);
    std::vector<Index> offsets(dim_s, 0);
    std::vector<int> digit(sites.size(), 0);
    const auto& s = sites.sites();
    for (Index k = 0; k < dim_s; ++k) {
        Index off = 0;
        for (std::size_t i = 0; i < s.size(); ++i) off += digit[i] * stride[s[i]];
        offsets[k] = off;
        for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
            if (++digit[i] < dims[s[i]]) break;
            digit[i] = 0;
        }
    }
    return offsets;
}

MatrixXcd embed(const MatrixXcd& op, const Region& support, const std::vector<int>& dims) {
    const Index ds = subspace_dim(dims, support);
    if (op.rows() != ds || op.cols() != ds)
        throw std::invalid_argument("operator size does not match its support");
    Region comp = Region::range(0, static_cast<int>(dims.size())).minus(support);
    auto off_s = subspace_offsets(dims, support);
    auto off_c = subspace_offsets(dims, comp);

    Index dim = 1;
    for (int d : dims) dim *= d;
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    for (Index i = 0; i < ds; ++i)
        for (Index j = 0; j < ds; ++j) {
            const Complex v = op(i, j);
            if (v == Complex(0, 0)) continue;
            for (Index c : off_c) out(off_s[i] + c, off_s[j] + c) = v;
        }
    return out;
}

DenseOperator embed_operator(const MatrixXcd& op, const Region& support,
                             const std::vector<int>& dims) {
    return DenseOperator(dims, embed(op, support, dims));
}

MatrixXcd apply_embedded(const MatrixXcd& op, const Region& support,
                         const std::vector<int>& dims, const MatrixXcd& x) {
    const Index ds = subspace_dim(dims, support);
    Region comp = Region::range(0, static_cast<int>(dims.size())).minus(support);
    auto off_s = subspace_offsets(dims, support);
    auto off_c = subspace_offsets(dims, comp);
    MatrixXcd y = MatrixXcd::Zero(x.rows(), x.cols());
    for (Index i = 0; i < ds; ++i)
        for (Index j = 0; j < ds; ++j) {
            const Complex v = op(i, j);
            if (v == Complex(0, 0)) continue;
            for (Index c : off_c) y.row(off_s[i] + c) += v * x.row(off_s[j] + c);
        }
    return y;
}

MatrixXd apply_embedded_real(const MatrixXd& op, const Region& support,
                             const std::vector<int>& dims, const MatrixXd& x) {
    const Index ds = subspace_dim(dims, support);
    Region comp = Region::range(0, static_cast<int>(dims.size())).minus(support);
    auto off_s = subspace_offsets(dims, support);
    auto off_c = subspace_offsets(dims, comp);
    MatrixXd y = MatrixXd::Zero(x.rows(), x.cols());
    for (Index i = 0; i < ds; ++i)
        for (Index j = 0; j < ds; ++j) {
            const double v = op(i, j);
            if (v == 0.0) continue;
            for (Index c : off_c) y.row(off_s[i] + c) += v * x.row(off_s[j] + c);
        }
    return y;
}

// ---------------------------------------------------------------------------
// Gibbs states and matrix functions

VectorXd gibbs_populations(const VectorXd& energies, double beta, double* log_z) {
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
    VectorXd exponent = -beta * energies.array();
    const double m = exponent.maxCoeff();
    VectorXd q = (exponent.array() - m).exp();
    const double s = q.sum();
    if (log_z) *log_z = m + std::log(s);
    return q / s;
}

DensityMatrix gibbs_state(const DenseOperator& h, double beta) {
    if (!h.hermitian()) throw std::invalid_argument("gibbs_state requires a Hermitian operator");
    auto eig = h.eigensystem();
    double log_z = 0;
    VectorXd pops = gibbs_populations(eig->values(), beta, &log_z);
    DensityMatrix rho(h.dims(), eig, std::move(pops));
    rho.set_log_partition(log_z);
    return rho;
}

DenseOperator fractional_power(const DensityMatrix& rho, double tau) {
    if (tau < 0.0 || tau > 1.0)
        throw std::invalid_argument("fractional power requires tau in [0, 1]");
    const VectorXd& p = rho.populations();
    VectorXd f(p.size());
    for (Index k = 0; k < p.size(); ++k) {
        if (p[k] <= kEigenvalueFloor)
            f[k] = (tau == 0.0) ? 1.0 : 0.0;
        else
            f[k] = std::pow(p[k], tau);
    }
    return DenseOperator(rho.dims(), rho.basis().from_diagonal(f));
}

namespace {

MatrixXcd partial_trace_matrix(const MatrixXcd& m, const std::vector<int>& dims,
                               const Region& keep) {
    for (int v : keep)
        if (v < 0 || v >= static_cast<int>(dims.size()))
            throw std::invalid_argument("keep region is not a subset of the sites");
    Region comp = Region::range(0, static_cast<int>(dims.size())).minus(keep);
    auto off_k = subspace_offsets(dims, keep);
    auto off_c = subspace_offsets(dims, comp);
    const Index dk = static_cast<Index>(off_k.size());
    MatrixXcd out = MatrixXcd::Zero(dk, dk);
    for (Index a = 0; a < dk; ++a)
        for (Index b = 0; b < dk; ++b) {
            Complex acc(0, 0);
            for (Index c : off_c) acc += m(off_k[a] + c, off_k[b] + c);
            out(a, b) = acc;
        }
    return out;
}

std::vector<int> keep_dims(const std::vector<int>& dims, const Region& keep) {
    std::vector<int> out;
    for (int v : keep) out.push_back(dims.at(v));
    return out;
}

} // namespace

DenseOperator partial_trace(const DenseOperator& op, const Region& keep) {
    return DenseOperator(keep_dims(op.dims(), keep),
                         partial_trace_matrix(op.matrix(), op.dims(), keep));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const Region& keep) {
    MatrixXcd reduced = partial_trace_matrix(rho.matrix(), rho.dims(), keep);
    return DensityMatrix(DenseOperator(keep_dims(rho.dims(), keep), std::move(reduced)));
}

// ---------------------------------------------------------------------------
// Norms and entropies

double spectral_norm(const MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= kHermTol) {
        VectorXd ev = is_numerically_real(m) ? detail::eigenvalues_sym(m.real())
                                             : detail::eigenvalues_herm(m);
        return ev.cwiseAbs().maxCoeff();
    }
    Eigen::BDCSVD<MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

double trace_norm(const MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= kHermTol) {
        VectorXd ev = is_numerically_real(m) ? detail::eigenvalues_sym(m.real())
                                             : detail::eigenvalues_herm(m);
        return ev.cwiseAbs().sum();
    }
    Eigen::BDCSVD<MatrixXcd> svd(m);
    return svd.singularValues().sum();
}

double trace_distance(const MatrixXcd& a, const MatrixXcd& b) { return trace_norm(a - b); }

double von_neumann_entropy_bits(const DensityMatrix& rho) {
    double s = 0;
    for (Index k = 0; k < rho.populations().size(); ++k) {
        const double p = rho.populations()[k];
        if (p > kEigenvalueFloor) s -= p * std::log2(p);
    }
    return s;
}

double relative_entropy_bits(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw std::invalid_argument("dimension mismatch");
    // -Tr[rho log2 sigma] via sigma's eigenbasis.
    MatrixXcd rho_in_sigma = sigma.basis().to_eigenbasis(rho.matrix());
    double cross = 0;
    for (Index j = 0; j < sigma.populations().size(); ++j) {
        const double sj = sigma.populations()[j];
        const double wj = rho_in_sigma(j, j).real();
        if (sj <= kEigenvalueFloor) {
            if (wj > 1e-12) return std::numeric_limits<double>::infinity();
            continue;
        }
        cross += wj * std::log2(sj);
    }
    return -cross - von_neumann_entropy_bits(rho);
}

double mutual_information_bits(const DensityMatrix& rho, const Region& part_a) {
    Region all = Region::range(0, rho.num_sites());
    Region part_b = all.minus(part_a);
    auto rho_a = partial_trace(rho, part_a);
    auto rho_b = partial_trace(rho, part_b);
    return von_neumann_entropy_bits(rho_a) + von_neumann_entropy_bits(rho_b) -
           von_neumann_entropy_bits(rho);
}

double free_energy(const DensityMatrix& rho, const DenseOperator& h, double beta) {
    if (beta == 0.0) throw std::invalid_argument("free energy is undefined at beta = 0");
    const double energy = (rho.matrix().cwiseProduct(h.matrix().transpose())).sum().real();
    const double entropy_nats = von_neumann_entropy_bits(rho) * kLn2;
    return energy - entropy_nats / beta;
}

} // namespace thermalab
