#pragma once

#include <complex>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thermalab/region.hpp"

namespace thermalab {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;
using VectorXcd = Eigen::VectorXcd;
using VectorXd = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Real-symmetric inputs keep real eigenvector storage; downstream code can
/// exploit that (half the memory, real GEMMs).
class Eigensystem {
public:
    static Eigensystem compute(const MatrixXcd& m);
    static Eigensystem from_real(VectorXd values, MatrixXd vectors);
    static Eigensystem from_complex(VectorXd values, MatrixXcd vectors);

    Index dim() const { return values_.size(); }
    const VectorXd& values() const { return values_; }
    bool real_vectors() const { return real_; }
    const MatrixXd& vectors_real() const;
    const MatrixXcd& vectors_complex() const;
    VectorXcd column(Index k) const;

    /// U^dagger A U.
    MatrixXcd to_eigenbasis(const MatrixXcd& a) const;
    /// U diag(d) U^dagger.
    MatrixXcd from_diagonal(const VectorXd& d) const;

private:
    VectorXd values_;
    bool real_ = true;
    MatrixXd vec_r_;
    MatrixXcd vec_c_;
};

/// Dense operator on a tensor product of local spaces. Site 0 is the leftmost
/// (most significant) tensor factor. Immutable; the eigendecomposition is
/// computed once on demand and shared between copies.
class DenseOperator {
public:
    DenseOperator(std::vector<int> dims, MatrixXcd matrix);
    static DenseOperator identity(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    int num_sites() const { return static_cast<int>(dims_.size()); }
    Index dim() const { return matrix_.rows(); }
    const MatrixXcd& matrix() const { return matrix_; }
    bool hermitian() const { return hermitian_; }

    /// Requires a Hermitian operator.
    std::shared_ptr<const Eigensystem> eigensystem() const;

    DenseOperator operator+(const DenseOperator& other) const;
    DenseOperator operator-(const DenseOperator& other) const;
    DenseOperator scaled(Complex factor) const;

private:
    std::vector<int> dims_;
    MatrixXcd matrix_;
    bool hermitian_ = false;
    std::shared_ptr<std::mutex> cache_mutex_ = std::make_shared<std::mutex>();
    mutable std::shared_ptr<const Eigensystem> eig_;
};

/// Density matrix as populations over an orthonormal basis. Construction from
/// a dense matrix eigendecomposes eagerly; construction from populations in a
/// known basis (the Gibbs path) defers materializing the matrix until asked.
class DensityMatrix {
public:
    explicit DensityMatrix(const DenseOperator& op);
    DensityMatrix(std::vector<int> dims, std::shared_ptr<const Eigensystem> basis,
                  VectorXd populations);

    const std::vector<int>& dims() const { return dims_; }
    int num_sites() const { return static_cast<int>(dims_.size()); }
    Index dim() const { return basis_->dim(); }
    /// Populations aligned with the basis columns (not sorted).
    const VectorXd& populations() const { return populations_; }
    const Eigensystem& basis() const { return *basis_; }
    std::shared_ptr<const Eigensystem> basis_ptr() const { return basis_; }
    VectorXd eigenvalues_ascending() const;

    const MatrixXcd& matrix() const;
    DenseOperator to_operator() const;

    std::optional<double> log_partition() const { return log_partition_; }
    void set_log_partition(double lz) { log_partition_ = lz; }

private:
    std::vector<int> dims_;
    std::shared_ptr<const Eigensystem> basis_;
    VectorXd populations_;
    std::optional<double> log_partition_;
    std::shared_ptr<std::mutex> cache_mutex_ = std::make_shared<std::mutex>();
    mutable std::shared_ptr<const MatrixXcd> matrix_cache_;
};

// ---------------------------------------------------------------------------
// Index bookkeeping for the global site ordering (site 0 most significant).

/// Global index offsets of the sub-basis on `sites`, i.e. offsets[k] is the
/// contribution of local index k (mixed-radix over `sites`) to a full index.
std::vector<Index> subspace_offsets(const std::vector<int>& dims, const Region& sites);

/// dim of the tensor factor on `sites`.
Index subspace_dim(const std::vector<int>& dims, const Region& sites);

/// Embed an operator supported on `support` into the full space.
MatrixXcd embed(const MatrixXcd& op, const Region& support, const std::vector<int>& dims);
DenseOperator embed_operator(const MatrixXcd& op, const Region& support,
                             const std::vector<int>& dims);

/// (op ⊗ 1) * x without materializing the embedding.
MatrixXcd apply_embedded(const MatrixXcd& op, const Region& support,
                         const std::vector<int>& dims, const MatrixXcd& x);
MatrixXd apply_embedded_real(const MatrixXd& op, const Region& support,
                             const std::vector<int>& dims, const MatrixXd& x);

// ---------------------------------------------------------------------------
// Core operations.

/// Gibbs state e^{-beta H}/Z of a Hermitian operator. Populations are computed
/// with the max-shift trick; log Z is stored on the result. beta may be
/// negative or zero.
DensityMatrix gibbs_state(const DenseOperator& h, double beta);

/// Populations and log Z from an energy spectrum (shared with the large-system
/// paths that never materialize the state).
VectorXd gibbs_populations(const VectorXd& energies, double beta, double* log_z = nullptr);

/// rho^tau for tau in [0,1]. Eigenvalues below 1e-14 map to 0 for tau > 0 and
/// to 1 for tau == 0 (so rho^0 is the identity on the full space).
DenseOperator fractional_power(const DensityMatrix& rho, double tau);

DenseOperator partial_trace(const DenseOperator& op, const Region& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const Region& keep);

double spectral_norm(const MatrixXcd& m);
double trace_norm(const MatrixXcd& m);
inline double spectral_norm(const DenseOperator& op) { return spectral_norm(op.matrix()); }
inline double trace_norm(const DenseOperator& op) { return trace_norm(op.matrix()); }
double trace_distance(const MatrixXcd& a, const MatrixXcd& b);

/// Entropies in bits (log base 2); 0 log 0 := 0.
double von_neumann_entropy_bits(const DensityMatrix& rho);
/// +infinity when supp(rho) is not contained in supp(sigma).
double relative_entropy_bits(const DensityMatrix& rho, const DensityMatrix& sigma);
/// S(rho^A) + S(rho^B) - S(rho) for the bipartition (A, complement of A).
double mutual_information_bits(const DensityMatrix& rho, const Region& part_a);
/// Out-of-equilibrium free energy Tr(rho H) - S(rho)/beta with the entropy in
/// natural units (nats), so that F(rho) - F(g) = S(rho||g)_nats / beta.
double free_energy(const DensityMatrix& rho, const DenseOperator& h, double beta);

inline constexpr double kLn2 = 0.6931471805599453094;

} // namespace thermalab
