#pragma once

#include <complex>
#include <Eigen/Dense>

namespace thermalab {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

inline MatrixXcd pauli_x() {
    MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline MatrixXcd pauli_y() {
    MatrixXcd m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline MatrixXcd pauli_z() {
    MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline MatrixXcd pauli(char axis) {
    switch (axis) {
        case 'x': return pauli_x();
        case 'y': return pauli_y();
        case 'z': return pauli_z();
        default: throw std::invalid_argument("pauli axis must be x, y or z");
    }
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace thermalab
