#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mrfsi {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class Subdomain { fluid, solid };

inline const char* to_string(Subdomain s) { return s == Subdomain::fluid ? "fluid" : "solid"; }

/// Raised when a numerical solve cannot produce a result (singular system,
/// stagnating iteration, exceeded iteration budget).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mrfsi
