#ifndef ESD_SIMDATA_HPP
#define ESD_SIMDATA_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "esd/dataset.hpp"
#include "esd/rng.hpp"

namespace esd {

struct SimSpec {
    int case_id = 1;             // 1..5
    int n = 1000;                // locations (1-D grid i/n)
    double snr = 5.0;            // {2,3,5,10} in the study grid
    double missing_pct = 0.05;   // {0.05, 0.10, 0.20}
    double phi_zeta = 0.3;
    std::uint64_t seed = 0;

    void validate() const;
};

// 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5
double friedman_f0(const Eigen::Matrix<double, 5, 1>& x);

// One draw of the stationary term: N(0, R) with R_ij = sigma_zeta_sq *
// exp(-phi_zeta * ||i-j||) over locations i/n on (0,1]. Dense Cholesky,
// generator-side only (n <= 5000).
Eigen::VectorXd gen_zeta(int n, double sigma_zeta_sq, double phi_zeta, RngStream& rng);

// Friedman-case synthetic dataset: case weights on f0 vs zeta, noise set by
// SNR, missing-at-random holdout, design matrix excludes x2.
Dataset gen_case(const SimSpec& spec, RngStream& rng);

// The sigma_eps^2 that gen_case would use for this Y and SNR.
double noise_variance_for_snr(const Eigen::VectorXd& Y, double snr);

struct CsvSchema {
    std::vector<std::string> coord_columns;  // 1 or 2 names
    std::string value_column;
    double holdout_fraction = 0.0;
    std::uint64_t holdout_seed = 0;
};

// Spatial CSV ingestion (header row required). Prediction locations default
// to the observed locations; the holdout fraction carves a validation set.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Dataset bundle: a directory with locations.csv, z.csv, x.csv, mask.csv,
// meta (key=value), and truth.csv when known.
void save_bundle(const Dataset& data, const std::string& dir,
                 const std::map<std::string, std::string>& meta = {});
Dataset load_bundle(const std::string& dir);
std::map<std::string, std::string> load_bundle_meta(const std::string& dir);

}  // namespace esd

#endif
