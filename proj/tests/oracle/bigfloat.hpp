#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

// Test-only arbitrary-precision reference computations (MPFR via boost).
// Never on the production path: the explicit product is formed in big-float
// arithmetic, singular values come from an unscaled one-sided Jacobi SVD and
// eigenvalues from characteristic-polynomial root finding, both independent
// of the library's stabilized kernels.

namespace oracle {

/// {ln s_n} of Pi^H Pi (ascending), Pi = X_t ... X_1 formed explicitly.
std::vector<double> log_singular_values(const std::vector<Eigen::MatrixXcd>& factors,
                                        unsigned bits = 1200);

/// {ln |lambda_n|} of Pi (ascending).
std::vector<double> log_eigenvalue_moduli(const std::vector<Eigen::MatrixXcd>& factors,
                                          unsigned bits = 1200);

/// ln of the two singular values (descending) of the upper-triangular matrix
/// [[z1, delta], [0, z2]] specified in log-magnitude/phase form.
std::array<double, 2> log_singular_values_2x2_triangle(double log_z1, double phase_z1,
                                                       double log_z2, double phase_z2,
                                                       double log_delta, double phase_delta,
                                                       unsigned bits = 600);

}  // namespace oracle
