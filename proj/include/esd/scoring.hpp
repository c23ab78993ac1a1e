#ifndef ESD_SCORING_HPP
#define ESD_SCORING_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "esd/covariance.hpp"
#include "esd/dataset.hpp"

namespace esd {

// Root mean squared prediction error over a subset (default: all).
double rmspe(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred,
             const std::vector<int>* subset = nullptr);

// Shortest contiguous sorted window containing ceil(level*N) samples.
std::pair<double, double> hpd_interval(const Eigen::VectorXd& samples, double level);

// Effective sample size via initial-monotone-sequence truncation.
double effective_sample_size(const Eigen::VectorXd& samples);

struct ScalarSummary {
    std::string name;
    double mean = 0, sd = 0, hpd_lo = 0, hpd_hi = 0, ess = 0;
};

struct OracleParams {
    CovParams cov;                // eta, phi, sigma_nu_sq
    double sigma_eps_sq = 0.0;
    double delta_sq = 0.0;        // fine-scale variance added to the kernel
    double sigma_beta_sq = 0.0;   // 0 disables the regression component
};

// Exact Gaussian conditional mean/variance at all prediction locations via
// dense factorization; small-instance cross-check only (m <= 500).
struct OracleResult {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
};

OracleResult dense_gp_oracle(const Dataset& data, const OracleParams& params,
                             const BasisSet& basis);

}  // namespace esd

#endif
