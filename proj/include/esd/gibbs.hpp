#ifndef ESD_GIBBS_HPP
#define ESD_GIBBS_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "esd/basis.hpp"
#include "esd/covariance.hpp"
#include "esd/dataset.hpp"
#include "esd/rng.hpp"
#include "esd/spectral.hpp"

namespace esd {

struct Hyperparams {
    // IG shapes/scales for sigma_nu^2, sigma_beta^2, sigma_eta^2, delta^2, sigma_eps^2
    double alpha1 = 0.01, beta1 = 0.01;
    double alpha2 = 0.01, beta2 = 0.01;
    double alpha3 = 0.01, beta3 = 0.01;
    double alpha4 = 0.01, beta4 = 0.01;
    double alpha5 = 0.01, beta5 = 0.01;
    double phi_L = 1.0;
    double phi_U = 0.0;  // <= phi_L means: derive from max pairwise distance
    int K = 2000;
    int m_sub = 500;
    int phi_grid = 50;
    double mh_step = 0.05;
    bool adapt_mh = true;  // pre-burn-in only; frozen afterward
    int B = 5000;
    int burn_in = 1000;
    int thin = 1;
    std::uint64_t seed = 0;

    // Hold a block fixed at the given value (skips its update).
    std::optional<double> fix_phi, fix_sigma_nu_sq, fix_sigma_beta_sq, fix_sigma_eta_sq,
        fix_delta_sq, fix_sigma_eps_sq;
    bool fix_eta_zero = false;

    void validate() const;
};

// All Gibbs unknowns at one iteration.
struct ModelState {
    Eigen::VectorXd beta;      // p
    Eigen::VectorXd nu;        // m
    Eigen::VectorXd nu_tilde;  // m
    Eigen::VectorXd eta;       // r
    double sigma_nu_sq = 1.0;
    double sigma_beta_sq = 1.0;
    double sigma_eta_sq = 1.0;
    double delta_sq = 1.0;
    double sigma_eps_sq = 1.0;
    double phi = 1.0;
};

struct ChainOutput {
    Eigen::MatrixXd beta_samples;  // S x p
    Eigen::MatrixXd eta_samples;   // S x r
    Eigen::VectorXd sigma_nu_sq, sigma_beta_sq, sigma_eta_sq, phi, delta_sq, sigma_eps_sq;
    Eigen::MatrixXd phi_grid_log;  // S x G, per-retained-iteration grid log posterior
    Eigen::VectorXd y_sum, y_sumsq;  // per-location accumulators of X'beta + nu
    int retained = 0;
    double eta_accept_rate = 0.0;
    double mh_step_final = 0.0;
    double seconds = 0.0;
    int iterations = 0;
    std::size_t peak_tracked_entries = 0;
    std::size_t allowed_entries = 0;
};

struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
};

// --- full-conditional building blocks ---

// One draw from IG(alpha + n_eff/2, beta + quad/2).
double ig_update(double alpha, double beta, int n_eff, double quad, RngStream& rng);

// Appendix-style Gaussian conditional for the regression coefficients.
Eigen::VectorXd sample_beta(const Eigen::MatrixXd& X_obs, const Eigen::VectorXd& Z,
                            const Eigen::VectorXd& nu_obs, double sigma_eps_sq,
                            double sigma_beta_sq, RngStream& rng);

// Elementwise draw of the process at all m locations. obs_of_loc[j] is the
// data row observing location j, or -1. resid = Z - X beta.
Eigen::VectorXd sample_nu(const Eigen::VectorXd& nu_tilde, const Eigen::VectorXd& resid,
                          const std::vector<int>& obs_of_loc, double delta_sq,
                          double sigma_eps_sq, RngStream& rng);

struct EtaMhResult {
    Eigen::VectorXd eta;
    Eigen::VectorXd nu_tilde;  // field under the returned eta
    bool accepted = false;
};

// One symmetric random-walk step on eta. field_of_eta must evaluate the
// spectral field under a proposed eta with the iteration's draw held fixed.
EtaMhResult sample_eta_mh(const Eigen::VectorXd& eta, const Eigen::VectorXd& nu_tilde,
                          const Eigen::VectorXd& nu, double sigma_eta_sq, double delta_sq,
                          double step,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& field_of_eta,
                          RngStream& rng);

// Variance of the spectral process from the subsampled quad form
// nu_sub' (R + noise_ratio I)^-1 nu_sub with R = exp(-E/phi).
// noise_ratio = 0 reproduces the bare correlation-matrix quad.
double sample_sigma_nu2(const Eigen::VectorXd& nu_sub, const Eigen::MatrixXd& E_sub, double phi,
                        double noise_ratio, double alpha, double beta, RngStream& rng);

// Griddy-Gibbs range update: Gaussian log density of nu_sub under
// N(0, sigma_nu_sq exp(-E/phi) + nugget I) on a G-point grid over [L,U].
double sample_phi(const Eigen::VectorXd& nu_sub, const Eigen::MatrixXd& E_sub,
                  double sigma_nu_sq, double nugget, double L, double U, int G, RngStream& rng,
                  Eigen::VectorXd* grid_log = nullptr);

// --- the chain ---

class GibbsChain {
public:
    GibbsChain(Dataset data, BasisSet basis, Hyperparams hyper);

    // Executes the remaining iterations (all of them on a fresh chain).
    ChainOutput run();

    // Advances the chain up to (not past) iteration iter_stop; summary
    // fields in output() stay current after every call.
    void run_until(int iter_stop);

    void save_checkpoint(const std::string& path) const;
    void load_checkpoint(const std::string& path);

    const ChainOutput& output() const { return out_; }
    const ModelState& state() const { return state_; }
    const std::vector<int>& subsample() const { return sub_idx_; }
    int next_iteration() const { return iter_next_; }

private:
    void init_state();
    void step(int iter);
    void retain();
    Eigen::VectorXd field_under(const Eigen::VectorXd& eta, double sigma_nu) const;
    void track(std::size_t entries, const char* what);

    Dataset data_;
    BasisSet basis_;
    Hyperparams hyper_;
    RngStream rng_;
    ModelState state_;
    SpectralDraw draw_;
    std::vector<int> sub_idx_;     // fixed subsample, indices into locations
    std::vector<int> obs_of_loc_;  // m entries, -1 if unobserved
    std::vector<Location> sub_pts_;
    int iter_next_ = 0;
    long accept_count_ = 0, mh_tries_ = 0;
    long adapt_accept_ = 0, adapt_tries_ = 0;
    double mh_step_cur_ = 0.0;
    Eigen::VectorXd grid_log_last_;
    ChainOutput out_;
    std::size_t peak_entries_ = 0;
    std::size_t allowed_entries_ = 0;
};

ChainOutput run_chain(const Dataset& data, const BasisSet& basis, const Hyperparams& hyper);

// Per-location posterior mean and variance of Y over retained samples.
Prediction predict_posterior(const ChainOutput& chain, const Dataset& data);

}  // namespace esd

#endif
