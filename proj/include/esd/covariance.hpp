#ifndef ESD_COVARIANCE_HPP
#define ESD_COVARIANCE_HPP

#include <Eigen/Dense>
#include <vector>

#include "esd/basis.hpp"
#include "esd/dataset.hpp"

namespace esd {

// Learned warp into the expanded dimensions: f(s) = psi'(s) eta.
struct ExpansionMap {
    BasisSet basis;
    Eigen::VectorXd eta;  // length r = basis.rows()

    void validate() const;
};

// Everything needed to evaluate C(theta).
struct CovParams {
    Eigen::VectorXd eta;
    double phi = 1.0;          // range; prior support [L,U], L >= 1
    double sigma_nu_sq = 1.0;  // marginal variance

    void validate() const;
};

// f(s) = psi'(s) eta, a d-vector.
Eigen::VectorXd warp(const Location& s, const ExpansionMap& map);

// E(si,sj) = || (si', f(si)')' - (sj', f(sj)')' ||, Euclidean in R^{2d}.
double expanded_distance(const Location& si, const Location& sj, const ExpansionMap& map);

// sigma_nu^2 * exp(-E(si,sj)/phi)
double cov(const Location& si, const Location& sj, const CovParams& params, const BasisSet& basis);

inline constexpr int kCovMatrixCap = 500;
inline constexpr double kCovJitterRel = 1e-8;  // times sigma_nu^2, on the diagonal

// Small dense covariance matrix for subsampled conditionals. Throws if the
// point count exceeds cap (guards the matrix-free contract).
Eigen::MatrixXd cov_matrix(const std::vector<Location>& points, const CovParams& params,
                           const BasisSet& basis, int cap = kCovMatrixCap);

// Pairwise expanded distances (no variance scaling); same cap as cov_matrix.
Eigen::MatrixXd expanded_distance_matrix(const std::vector<Location>& points,
                                         const ExpansionMap& map, int cap = kCovMatrixCap);

// Pairwise L1 distances in the expanded space. Because the spectral
// frequencies are drawn independently per coordinate, the simulated field's
// covariance factorizes over coordinates: exp(-sum_k |d_k| / phi), i.e. an
// exponential kernel in the L1 distance. The Gibbs conditionals that evaluate
// the marginal density of the simulated field must use this distance — with
// the Euclidean one the kernel is smoother than the field it is scoring, the
// quadratic form is biased upward, and the variance chain can ratchet off to
// infinity. Coincides with expanded_distance_matrix along any single
// coordinate axis (in particular for 1-D data with eta = 0).
Eigen::MatrixXd expanded_l1_distance_matrix(const std::vector<Location>& points,
                                            const ExpansionMap& map, int cap = kCovMatrixCap);

}  // namespace esd

#endif
