#ifndef ESD_SPECTRAL_HPP
#define ESD_SPECTRAL_HPP

#include <Eigen/Dense>
#include <vector>

#include "esd/covariance.hpp"
#include "esd/rng.hpp"

namespace esd {

// One field realization's randomness: K frequency vectors in R^{2d} and K
// phases. A single draw is shared across all locations of a realization.
struct SpectralDraw {
    Eigen::MatrixXd omegas;  // K x 2d, row i = (omega_1i', omega_2i')'
    Eigen::VectorXd kappas;  // K phases, strictly inside (-pi, pi)

    int K() const { return static_cast<int>(omegas.rows()); }
    int dim() const { return static_cast<int>(omegas.cols()) / 2; }
};

// Each omega coordinate independently Cauchy(0, 1/phi); kappa ~ U(-pi,pi).
// Generation is sequential from the stream: reproducible given the seed.
SpectralDraw draw_spectral(int K, int d, double phi, RngStream& rng);

// Cosine superposition evaluated at every point with the shared draw:
//   nu~(s) = sigma_nu * sqrt(2/K) * sum_i cos(f(s)'w1_i + s'w2_i + kappa_i)
// O(K n) time, no n x n allocation. Parallel over points; output is
// identical to sequential evaluation.
Eigen::VectorXd simulate_field(const SpectralDraw& draw, const std::vector<Location>& points,
                               const ExpansionMap& map, double sigma_nu);

// Method-of-moments covariance per expanded-distance bin across replicate
// fields (rows of `fields` are replicates, columns index points).
struct Covariogram {
    std::vector<double> bin_lo, bin_hi;
    std::vector<double> covariance;  // undefined where empty
    std::vector<long> pair_count;
    std::vector<bool> empty;
};

Covariogram empirical_covariogram(const Eigen::MatrixXd& fields,
                                  const std::vector<Location>& points, const ExpansionMap& map,
                                  const std::vector<double>& bin_edges);

}  // namespace esd

#endif
