#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "thermalab/densequantum.hpp"
#include "thermalab/hamiltonian.hpp"

namespace thermalab {

/// True when every term commutes with the global spin flip X^{(x)}...X^{(x)}
/// (qubit chains: Ising, transverse Ising, Heisenberg, XX all qualify).
bool spin_flip_symmetric(const LocalHamiltonian& h, double tol = 1e-12);

/// Full spectrum of a local Hamiltonian with streaming access to eigenvectors.
/// For spin-flip-symmetric qubit systems above a dimension threshold the
/// problem is solved in the two parity sectors (half the dimension each),
/// which keeps the 2^14-site cases inside desk memory; otherwise the dense
/// route is used. Eigenvalues are globally ascending either way.
class SpectralDecomposition {
public:
    static SpectralDecomposition compute(const LocalHamiltonian& h,
                                         Index sector_threshold = 2048);

    Index dim() const { return energies_.size(); }
    const VectorXd& energies() const { return energies_; }
    const std::vector<int>& dims() const { return dims_; }
    bool real_vectors() const { return real_; }

    void eigenvector(Index k, VectorXcd& out) const;

    /// sum_k weights[k] * Tr_complement |k><k| restricted to `keep`, for
    /// several weight vectors in one pass over the eigenvectors. Entries with
    /// weight exactly zero are skipped.
    std::vector<MatrixXcd> weighted_reduced(const std::vector<VectorXd>& weights,
                                            const Region& keep) const;
    MatrixXcd weighted_reduced(const VectorXd& weights, const Region& keep) const;

    /// Eigenvalues only (cheaper; no eigenvector storage).
    static VectorXd eigenvalues_only(const LocalHamiltonian& h,
                                     Index sector_threshold = 2048);

private:
    std::vector<int> dims_;
    VectorXd energies_;
    bool real_ = true;
    bool sectored_ = false;

    // dense route
    std::shared_ptr<const Eigensystem> dense_;

    // sector route (qubits only): orbit representatives s < flip(s)
    std::vector<std::uint64_t> reps_;
    std::vector<std::int32_t> orbit_of_;           // basis state -> orbit index
    MatrixXd sector_vec_[2];                        // even, odd (real case)
    MatrixXcd sector_cvec_[2];                      // complex case
    std::vector<std::pair<std::int8_t, std::int32_t>> source_;  // (sector, column)

    void reconstruct_real(Index k, VectorXd& out) const;
    friend struct SpectralBuild;
};

} // namespace thermalab
