#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace pstraj {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

inline constexpr cplx I{0.0, 1.0};

// A stochastic or deterministic solver could not continue.
class SolverFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The requested model/solver combination is not supported.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A brute-force oracle was asked for an instance above its size cap.
class CapExceeded : public ModelError {
public:
    using ModelError::ModelError;
};

} // namespace pstraj
