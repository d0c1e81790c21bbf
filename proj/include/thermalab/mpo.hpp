#pragma once

#include <string>
#include <vector>

#include "thermalab/densequantum.hpp"

namespace thermalab {

/// Matrix product operator: one 4-index tensor per site with legs
/// (left bond, physical out, physical in, right bond); boundary bonds have
/// dimension 1. Data is stored row-major in (l, i, j, r) order.
class Mpo {
public:
    struct SiteTensor {
        Index dl = 1, d_out = 1, d_in = 1, dr = 1;
        std::vector<Complex> data;

        SiteTensor() = default;
        SiteTensor(Index dl, Index d_out, Index d_in, Index dr)
            : dl(dl), d_out(d_out), d_in(d_in), dr(dr),
              data(static_cast<std::size_t>(dl * d_out * d_in * dr), Complex(0, 0)) {}

        Complex& at(Index l, Index i, Index j, Index r) {
            return data[static_cast<std::size_t>(((l * d_out + i) * d_in + j) * dr + r)];
        }
        Complex at(Index l, Index i, Index j, Index r) const {
            return data[static_cast<std::size_t>(((l * d_out + i) * d_in + j) * dr + r)];
        }
    };

    explicit Mpo(std::vector<SiteTensor> tensors);
    static Mpo identity(int sites, int local_dim);

    int num_sites() const { return static_cast<int>(tensors_.size()); }
    const std::vector<SiteTensor>& tensors() const { return tensors_; }
    std::vector<SiteTensor>& tensors() { return tensors_; }
    std::vector<int> local_dims() const;
    /// D(0) .. D(n), with D(0) = D(n) = 1.
    std::vector<Index> bond_dims() const;
    Index max_bond() const;

    MatrixXcd contract_dense() const;
    Complex trace() const;
    double frobenius_norm() const;

    /// Formal sum: bond dimensions add.
    Mpo add(const Mpo& other) const;
    Mpo scaled(Complex factor) const;

private:
    std::vector<SiteTensor> tensors_;
};

/// Operator product a * b (bond dimensions multiply).
Mpo mpo_multiply(const Mpo& a, const Mpo& b);
Mpo mpo_adjoint(const Mpo& m);

struct CompressionResult {
    Mpo mpo;
    /// Root sum square of all discarded singular values; after the
    /// orthogonalizing sweep this equals the Frobenius distance to the input.
    double truncation_error = 0.0;
};

/// Two-sweep tensor-train rounding: right-to-left orthogonalization, then a
/// left-to-right truncating SVD keeping at most max_bond singular values and
/// discarding those <= svd_floor (absolute).
CompressionResult mpo_compress(const Mpo& m, Index max_bond, double svd_floor);

/// Rounding with a per-cut relative floor and no bond cap; used to strip the
/// exact-zero directions a structured construction leaves behind.
CompressionResult mpo_round_relative(const Mpo& m, double rel_floor);

/// Single-file serialization: 8-byte magic, little-endian u32 header length,
/// JSON header (format_version, sites, local_dims, bond_dims), then raw
/// complex<double> tensor payloads in (l, i, j, r) row-major order.
void save_mpo(const Mpo& m, const std::string& path);
Mpo load_mpo(const std::string& path);

} // namespace thermalab
