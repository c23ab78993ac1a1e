#include "esd/gibbs.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace esd {

void Hyperparams::validate() const {
    const double pos[] = {alpha1, beta1, alpha2, beta2, alpha3, beta3,
                          alpha4, beta4, alpha5, beta5, mh_step};
    for (double v : pos)
        if (!(v > 0.0)) throw std::invalid_argument("Hyperparams: shapes/scales/step must be > 0");
    if (!(phi_L >= 1.0)) throw std::invalid_argument("Hyperparams: phi_L must be >= 1");
    if (K < 1) throw std::invalid_argument("Hyperparams: K must be >= 1");
    if (m_sub < 0) throw std::invalid_argument("Hyperparams: m_sub must be >= 0");
    if (phi_grid < 1) throw std::invalid_argument("Hyperparams: phi_grid must be >= 1");
    if (B < 1) throw std::invalid_argument("Hyperparams: B must be >= 1");
    if (burn_in < 0 || burn_in >= B) throw std::invalid_argument("Hyperparams: need 0 <= burn_in < B");
    if (thin < 1) throw std::invalid_argument("Hyperparams: thin must be >= 1");
}

double ig_update(double alpha, double beta, int n_eff, double quad, RngStream& rng) {
    if (quad < 0.0) throw std::invalid_argument("ig_update: quad must be >= 0");
    const double shape = alpha + 0.5 * n_eff;
    const double scale = beta + 0.5 * quad;
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("ig_update: nonpositive shape or scale");
    return rng.inv_gamma(shape, scale);
}

Eigen::VectorXd sample_beta(const Eigen::MatrixXd& X_obs, const Eigen::VectorXd& Z,
                            const Eigen::VectorXd& nu_obs, double sigma_eps_sq,
                            double sigma_beta_sq, RngStream& rng) {
    if (!(sigma_eps_sq > 0.0) || !(sigma_beta_sq > 0.0))
        throw std::invalid_argument("sample_beta: variances must be > 0");
    const int p = static_cast<int>(X_obs.cols());
    Eigen::MatrixXd prec = X_obs.transpose() * X_obs / sigma_eps_sq;
    prec.diagonal().array() += 1.0 / sigma_beta_sq;
    Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("sample_beta: posterior precision not PD");
    const Eigen::VectorXd rhs = X_obs.transpose() * (Z - nu_obs) / sigma_eps_sq;
    const Eigen::VectorXd mean = llt.solve(rhs);
    Eigen::VectorXd z(p);
    for (int i = 0; i < p; ++i) z(i) = rng.normal();
    // beta = mean + L^-T z has covariance prec^-1
    return mean + llt.matrixU().solve(z);
}

Eigen::VectorXd sample_nu(const Eigen::VectorXd& nu_tilde, const Eigen::VectorXd& resid,
                          const std::vector<int>& obs_of_loc, double delta_sq,
                          double sigma_eps_sq, RngStream& rng) {
    const int m = static_cast<int>(nu_tilde.size());
    if (static_cast<int>(obs_of_loc.size()) != m)
        throw std::invalid_argument("sample_nu: obs_of_loc length != m");
    const double v = 1.0 / (1.0 / delta_sq + 1.0 / sigma_eps_sq);
    const double sd_obs = std::sqrt(v);
    const double sd_un = std::sqrt(delta_sq);
    Eigen::VectorXd nu(m);
    for (int j = 0; j < m; ++j) {
        const int row = obs_of_loc[static_cast<std::size_t>(j)];
        if (row < 0) {
            nu(j) = nu_tilde(j) + sd_un * rng.normal();
        } else {
            const double mean = v * (resid(row) / sigma_eps_sq + nu_tilde(j) / delta_sq);
            nu(j) = mean + sd_obs * rng.normal();
        }
    }
    return nu;
}

EtaMhResult sample_eta_mh(const Eigen::VectorXd& eta, const Eigen::VectorXd& nu_tilde,
                          const Eigen::VectorXd& nu, double sigma_eta_sq, double delta_sq,
                          double step,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& field_of_eta,
                          RngStream& rng) {
    const int r = static_cast<int>(eta.size());
    Eigen::VectorXd prop(r);
    for (int i = 0; i < r; ++i) prop(i) = eta(i) + step * rng.normal();
    const Eigen::VectorXd field_prop = field_of_eta(prop);
    const double log_cur =
        -eta.squaredNorm() / (2.0 * sigma_eta_sq) - (nu - nu_tilde).squaredNorm() / (2.0 * delta_sq);
    const double log_prop = -prop.squaredNorm() / (2.0 * sigma_eta_sq) -
                            (nu - field_prop).squaredNorm() / (2.0 * delta_sq);
    const double u = rng.uniform01();
    if (std::log(u) < log_prop - log_cur) {
        return {prop, field_prop, true};
    }
    return {eta, nu_tilde, false};
}

namespace {

// Cholesky of sigma_sq * exp(-E/phi) + nugget I with relative jitter.
Eigen::LLT<Eigen::MatrixXd> kernel_llt(const Eigen::MatrixXd& E_sub, double phi, double sigma_sq,
                                       double nugget) {
    Eigen::MatrixXd M = (-E_sub / phi).array().exp().matrix() * sigma_sq;
    M.diagonal().array() += nugget + kCovJitterRel * sigma_sq;
    return Eigen::LLT<Eigen::MatrixXd>(M);
}

}  // namespace

double sample_sigma_nu2(const Eigen::VectorXd& nu_sub, const Eigen::MatrixXd& E_sub, double phi,
                        double noise_ratio, double alpha, double beta, RngStream& rng) {
    const int msub = static_cast<int>(nu_sub.size());
    if (msub == 0) return rng.inv_gamma(alpha, beta);
    if (E_sub.rows() != msub || E_sub.cols() != msub)
        throw std::invalid_argument("sample_sigma_nu2: E_sub size mismatch");
    auto llt = kernel_llt(E_sub, phi, 1.0, noise_ratio);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("sample_sigma_nu2: correlation matrix not PD after jitter");
    const double quad = llt.matrixL().solve(nu_sub).squaredNorm();
    return ig_update(alpha, beta, msub, quad, rng);
}

double sample_phi(const Eigen::VectorXd& nu_sub, const Eigen::MatrixXd& E_sub, double sigma_nu_sq,
                  double nugget, double L, double U, int G, RngStream& rng,
                  Eigen::VectorXd* grid_log) {
    if (!(U > L)) throw std::invalid_argument("sample_phi: need U > L");
    if (G < 1) throw std::invalid_argument("sample_phi: need G >= 1");
    const int msub = static_cast<int>(nu_sub.size());
    const double width = (U - L) / G;
    Eigen::VectorXd logp(G);
    for (int g = 0; g < G; ++g) {
        const double phi_g = L + (g + 0.5) * width;
        if (msub == 0) {
            logp(g) = 0.0;  // flat: prior only
            continue;
        }
        auto llt = kernel_llt(E_sub, phi_g, sigma_nu_sq, nugget);
        if (llt.info() != Eigen::Success) {
            logp(g) = -std::numeric_limits<double>::infinity();
            continue;
        }
        double logdet = 0.0;
        for (int i = 0; i < msub; ++i) logdet += std::log(llt.matrixL()(i, i));
        logp(g) = -logdet - 0.5 * llt.matrixL().solve(nu_sub).squaredNorm();
    }
    if (grid_log) *grid_log = logp;
    if (G == 1) return L + 0.5 * width;

    const double mx = logp.maxCoeff();
    if (!std::isfinite(mx)) throw std::runtime_error("sample_phi: all grid densities are zero");
    Eigen::VectorXd w = (logp.array() - mx).exp();
    const double tot = w.sum();
    const double u = rng.uniform01() * tot;
    double csum = 0.0;
    int cell = G - 1;
    for (int g = 0; g < G; ++g) {
        csum += w(g);
        if (u <= csum) {
            cell = g;
            break;
        }
    }
    // uniform jitter within the selected cell
    return L + (cell + rng.uniform01()) * width;
}

// ---------------------------------------------------------------------------

GibbsChain::GibbsChain(Dataset data, BasisSet basis, Hyperparams hyper)
    : data_(std::move(data)), basis_(std::move(basis)), hyper_(hyper), rng_(hyper.seed) {
    data_.validate();
    basis_.validate();
    hyper_.validate();
    if (hyper_.phi_U <= hyper_.phi_L) {
        // default U: diameter of the location bounding box, floor phi_L + 1
        double lo[2] = {std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity()};
        double hi[2] = {-lo[0], -lo[1]};
        for (const auto& s : data_.locations)
            for (int k = 0; k < s.dim(); ++k) {
                lo[k] = std::min(lo[k], s[k]);
                hi[k] = std::max(hi[k], s[k]);
            }
        double diag = 0.0;
        for (int k = 0; k < data_.dim(); ++k) diag += (hi[k] - lo[k]) * (hi[k] - lo[k]);
        hyper_.phi_U = std::max(hyper_.phi_L + 1.0, std::sqrt(diag));
    }
    allowed_entries_ = std::max<std::size_t>(
        {static_cast<std::size_t>(data_.m()) * static_cast<std::size_t>(std::max(1, data_.p())),
         static_cast<std::size_t>(hyper_.m_sub) * static_cast<std::size_t>(hyper_.m_sub),
         static_cast<std::size_t>(hyper_.K) * 2u * static_cast<std::size_t>(data_.dim())});
    init_state();
}

void GibbsChain::track(std::size_t entries, const char* what) {
    peak_entries_ = std::max(peak_entries_, entries);
    if (entries > allowed_entries_) {
        std::ostringstream os;
        os << "matrix-free contract violated: " << what << " holds " << entries
           << " entries, budget " << allowed_entries_;
        throw std::runtime_error(os.str());
    }
}

void GibbsChain::init_state() {
    const int m = data_.m(), n = data_.n(), p = data_.p(), r = basis_.rows();

    obs_of_loc_.assign(static_cast<std::size_t>(m), -1);
    for (int row = 0; row < n; ++row)
        obs_of_loc_[static_cast<std::size_t>(data_.observed_idx[static_cast<std::size_t>(row)])] = row;

    // fixed-per-chain subsample, uniform without replacement
    const int msub = std::min(hyper_.m_sub, m);
    std::vector<int> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < msub; ++i) {
        const int j = i + static_cast<int>(rng_.uniform01() * (m - i));
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(std::min(j, m - 1))]);
    }
    sub_idx_.assign(all.begin(), all.begin() + msub);
    std::sort(sub_idx_.begin(), sub_idx_.end());
    sub_pts_.clear();
    for (int idx : sub_idx_) sub_pts_.push_back(data_.locations[static_cast<std::size_t>(idx)]);

    // ridge least squares start, then residual-variance based scales so the
    // chain starts in the data-tracking regime rather than the
    // regression-only one
    Eigen::MatrixXd prec = data_.X.transpose() * data_.X;
    prec.diagonal().array() += 1.0;
    state_.beta = prec.ldlt().solve(data_.X.transpose() * data_.Z);
    const Eigen::VectorXd res = data_.Z - data_.X * state_.beta;
    const double res_var =
        n > 1 ? (res.array() - res.mean()).square().sum() / (n - 1) : 1.0;
    const double scale0 = std::max(res_var, 1e-8);

    state_.nu = Eigen::VectorXd::Zero(m);
    state_.nu_tilde = Eigen::VectorXd::Zero(m);
    state_.eta = Eigen::VectorXd::Zero(r);
    state_.sigma_nu_sq = hyper_.fix_sigma_nu_sq.value_or(scale0);
    state_.sigma_beta_sq = hyper_.fix_sigma_beta_sq.value_or(1.0);
    state_.sigma_eta_sq = hyper_.fix_sigma_eta_sq.value_or(1.0);
    state_.delta_sq = hyper_.fix_delta_sq.value_or(scale0);
    state_.sigma_eps_sq = hyper_.fix_sigma_eps_sq.value_or(0.5 * scale0);
    state_.phi = hyper_.fix_phi.value_or(0.5 * (hyper_.phi_L + hyper_.phi_U));
    mh_step_cur_ = hyper_.mh_step;

    const int S = hyper_.B > hyper_.burn_in
                      ? (hyper_.B - hyper_.burn_in + hyper_.thin - 1) / hyper_.thin
                      : 0;
    out_ = ChainOutput{};
    out_.beta_samples.resize(S, p);
    out_.eta_samples.resize(S, r);
    out_.sigma_nu_sq.resize(S);
    out_.sigma_beta_sq.resize(S);
    out_.sigma_eta_sq.resize(S);
    out_.phi.resize(S);
    out_.delta_sq.resize(S);
    out_.sigma_eps_sq.resize(S);
    out_.phi_grid_log.setZero(S, hyper_.phi_grid);
    out_.y_sum = Eigen::VectorXd::Zero(m);
    out_.y_sumsq = Eigen::VectorXd::Zero(m);
    out_.allowed_entries = allowed_entries_;
    iter_next_ = 0;
}

Eigen::VectorXd GibbsChain::field_under(const Eigen::VectorXd& eta, double sigma_nu) const {
    return simulate_field(draw_, data_.locations, ExpansionMap{basis_, eta}, sigma_nu);
}

void GibbsChain::step(int iter) {
    const int m = data_.m(), n = data_.n(), p = data_.p(), r = basis_.rows();
    const char* where = "";
    try {
        // beta
        where = "sample_beta";
        Eigen::VectorXd nu_obs(n);
        for (int row = 0; row < n; ++row)
            nu_obs(row) = state_.nu(data_.observed_idx[static_cast<std::size_t>(row)]);
        state_.beta = sample_beta(data_.X, data_.Z, nu_obs, state_.sigma_eps_sq,
                                  state_.sigma_beta_sq, rng_);

        // spectral refresh, shared across the rest of the iteration
        where = "spectral_refresh";
        draw_ = draw_spectral(hyper_.K, data_.dim(), state_.phi, rng_);
        track(static_cast<std::size_t>(draw_.omegas.size()), "spectral draw");
        state_.nu_tilde = field_under(state_.eta, std::sqrt(state_.sigma_nu_sq));
        track(static_cast<std::size_t>(m), "nu_tilde");

        // nu, elementwise
        where = "sample_nu";
        const Eigen::VectorXd resid = data_.Z - data_.X * state_.beta;
        state_.nu = sample_nu(state_.nu_tilde, resid, obs_of_loc_, state_.delta_sq,
                              state_.sigma_eps_sq, rng_);

        // eta via random-walk MH against the fixed draw
        where = "sample_eta_mh";
        if (!hyper_.fix_eta_zero) {
            const double sig = std::sqrt(state_.sigma_nu_sq);
            auto res = sample_eta_mh(
                state_.eta, state_.nu_tilde, state_.nu, state_.sigma_eta_sq, state_.delta_sq,
                mh_step_cur_,
                [&](const Eigen::VectorXd& e) { return field_under(e, sig); }, rng_);
            state_.eta = res.eta;
            state_.nu_tilde = res.nu_tilde;
            ++mh_tries_;
            if (res.accepted) ++accept_count_;
            if (hyper_.adapt_mh && iter < hyper_.burn_in) {
                ++adapt_tries_;
                if (res.accepted) ++adapt_accept_;
                if (adapt_tries_ == 100) {
                    const double rate = static_cast<double>(adapt_accept_) / adapt_tries_;
                    if (rate < 0.20) mh_step_cur_ *= 0.7;
                    if (rate > 0.40) mh_step_cur_ *= 1.4;
                    adapt_tries_ = adapt_accept_ = 0;
                }
            }
        }

        // subsampled covariance pieces
        const int msub = static_cast<int>(sub_idx_.size());
        Eigen::MatrixXd E_sub;
        Eigen::VectorXd nu_sub(msub);
        if (msub > 0) {
            where = "expanded_distance_matrix";
            // L1 distance: the density being evaluated is that of the
            // spectrally simulated field (see expanded_l1_distance_matrix).
            E_sub = expanded_l1_distance_matrix(sub_pts_, ExpansionMap{basis_, state_.eta},
                                               std::max(msub, kCovMatrixCap));
            track(static_cast<std::size_t>(E_sub.size()), "subsample distance matrix");
            for (int i = 0; i < msub; ++i) nu_sub(i) = state_.nu(sub_idx_[static_cast<std::size_t>(i)]);
        }

        where = "sample_sigma_nu2";
        if (!hyper_.fix_sigma_nu_sq)
            state_.sigma_nu_sq =
                sample_sigma_nu2(nu_sub, E_sub, state_.phi, state_.delta_sq / state_.sigma_nu_sq,
                                 hyper_.alpha1, hyper_.beta1, rng_);

        where = "sample_sigma_beta2";
        if (!hyper_.fix_sigma_beta_sq)
            state_.sigma_beta_sq =
                ig_update(hyper_.alpha2, hyper_.beta2, p, state_.beta.squaredNorm(), rng_);

        where = "sample_sigma_eta2";
        if (!hyper_.fix_sigma_eta_sq)
            state_.sigma_eta_sq =
                ig_update(hyper_.alpha3, hyper_.beta3, r, state_.eta.squaredNorm(), rng_);

        where = "sample_phi";
        if (!hyper_.fix_phi) {
            state_.phi = sample_phi(nu_sub, E_sub, state_.sigma_nu_sq, state_.delta_sq,
                                    hyper_.phi_L, hyper_.phi_U, hyper_.phi_grid, rng_,
                                    &grid_log_last_);
        }

        where = "sample_delta2";
        if (!hyper_.fix_delta_sq)
            state_.delta_sq = ig_update(hyper_.alpha4, hyper_.beta4, m,
                                        (state_.nu - state_.nu_tilde).squaredNorm(), rng_);

        where = "sample_sigma_eps2";
        if (!hyper_.fix_sigma_eps_sq) {
            Eigen::VectorXd nu_obs2(n);
            for (int row = 0; row < n; ++row)
                nu_obs2(row) = state_.nu(data_.observed_idx[static_cast<std::size_t>(row)]);
            const double quad = (data_.Z - data_.X * state_.beta - nu_obs2).squaredNorm();
            state_.sigma_eps_sq = ig_update(hyper_.alpha5, hyper_.beta5, n, quad, rng_);
        }
    } catch (const std::exception& ex) {
        std::ostringstream os;
        os << "iteration " << iter << ": " << where << ": " << ex.what();
        throw std::runtime_error(os.str());
    }
}

void GibbsChain::retain() {
    const int s = out_.retained;
    out_.beta_samples.row(s) = state_.beta.transpose();
    out_.eta_samples.row(s) = state_.eta.transpose();
    out_.sigma_nu_sq(s) = state_.sigma_nu_sq;
    out_.sigma_beta_sq(s) = state_.sigma_beta_sq;
    out_.sigma_eta_sq(s) = state_.sigma_eta_sq;
    out_.phi(s) = state_.phi;
    out_.delta_sq(s) = state_.delta_sq;
    out_.sigma_eps_sq(s) = state_.sigma_eps_sq;
    if (grid_log_last_.size() == out_.phi_grid_log.cols())
        out_.phi_grid_log.row(s) = grid_log_last_.transpose();
    const Eigen::VectorXd y = data_.X_pred * state_.beta + state_.nu;
    out_.y_sum += y;
    out_.y_sumsq += y.cwiseProduct(y);
    ++out_.retained;
}

void GibbsChain::run_until(int iter_stop) {
    const int stop = std::min(iter_stop, hyper_.B);
    const auto t0 = std::chrono::steady_clock::now();
    for (int iter = iter_next_; iter < stop; ++iter) {
        step(iter);
        if (iter >= hyper_.burn_in && (iter - hyper_.burn_in) % hyper_.thin == 0) retain();
        iter_next_ = iter + 1;
    }
    out_.iterations = iter_next_;
    out_.eta_accept_rate = mh_tries_ > 0 ? static_cast<double>(accept_count_) / mh_tries_ : 0.0;
    out_.mh_step_final = mh_step_cur_;
    out_.peak_tracked_entries = peak_entries_;
    out_.seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ChainOutput GibbsChain::run() {
    run_until(hyper_.B);
    return out_;
}

ChainOutput run_chain(const Dataset& data, const BasisSet& basis, const Hyperparams& hyper) {
    GibbsChain chain(data, basis, hyper);
    return chain.run();
}

Prediction predict_posterior(const ChainOutput& chain, const Dataset& data) {
    if (chain.retained < 1) throw std::invalid_argument("predict_posterior: empty chain");
    const int m = data.m();
    if (chain.y_sum.size() != m) throw std::invalid_argument("predict_posterior: size mismatch");
    Prediction pred;
    pred.mean = chain.y_sum / chain.retained;
    pred.variance = Eigen::VectorXd::Zero(m);
    if (chain.retained > 1) {
        for (int j = 0; j < m; ++j) {
            double v = (chain.y_sumsq(j) - chain.y_sum(j) * chain.y_sum(j) / chain.retained) /
                       (chain.retained - 1);
            pred.variance(j) = std::max(v, 0.0);
        }
    }
    return pred;
}

// --- checkpointing -------------------------------------------------------

namespace {

void write_vec(std::ostream& os, const char* name, const Eigen::VectorXd& v) {
    os << name << ' ' << v.size();
    for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << v(i);
    os << '\n';
}

Eigen::VectorXd read_vec(std::istream& is, const std::string& name) {
    std::string tag;
    Eigen::Index len;
    is >> tag >> len;
    if (tag != name) throw std::runtime_error("checkpoint: expected " + name + ", got " + tag);
    Eigen::VectorXd v(len);
    for (Eigen::Index i = 0; i < len; ++i) is >> v(i);
    return v;
}

void write_mat(std::ostream& os, const char* name, const Eigen::MatrixXd& v) {
    os << name << ' ' << v.rows() << ' ' << v.cols();
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < v.cols(); ++j) os << ' ' << v(i, j);
    os << '\n';
}

Eigen::MatrixXd read_mat(std::istream& is, const std::string& name) {
    std::string tag;
    Eigen::Index rows, cols;
    is >> tag >> rows >> cols;
    if (tag != name) throw std::runtime_error("checkpoint: expected " + name + ", got " + tag);
    Eigen::MatrixXd v(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) is >> v(i, j);
    return v;
}

}  // namespace

void GibbsChain::save_checkpoint(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
    os << std::setprecision(17);
    os << "esd-checkpoint 1\n";
    os << "iter_next " << iter_next_ << '\n';
    os << "rng " << rng_.serialize() << '\n';
    write_vec(os, "beta", state_.beta);
    write_vec(os, "nu", state_.nu);
    write_vec(os, "nu_tilde", state_.nu_tilde);
    write_vec(os, "eta", state_.eta);
    os << "scalars " << state_.sigma_nu_sq << ' ' << state_.sigma_beta_sq << ' '
       << state_.sigma_eta_sq << ' ' << state_.delta_sq << ' ' << state_.sigma_eps_sq << ' '
       << state_.phi << '\n';
    os << "sub " << sub_idx_.size();
    for (int i : sub_idx_) os << ' ' << i;
    os << '\n';
    os << "mh " << accept_count_ << ' ' << mh_tries_ << ' ' << adapt_accept_ << ' '
       << adapt_tries_ << ' ' << mh_step_cur_ << '\n';
    os << "retained " << out_.retained << '\n';
    write_mat(os, "beta_samples", out_.beta_samples);
    write_mat(os, "eta_samples", out_.eta_samples);
    write_vec(os, "s_nu", out_.sigma_nu_sq);
    write_vec(os, "s_beta", out_.sigma_beta_sq);
    write_vec(os, "s_eta", out_.sigma_eta_sq);
    write_vec(os, "phi", out_.phi);
    write_vec(os, "delta", out_.delta_sq);
    write_vec(os, "s_eps", out_.sigma_eps_sq);
    write_mat(os, "phi_grid_log", out_.phi_grid_log);
    write_vec(os, "y_sum", out_.y_sum);
    write_vec(os, "y_sumsq", out_.y_sumsq);
    if (!os) throw std::runtime_error("save_checkpoint: write failed: " + path);
}

void GibbsChain::load_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string magic;
    int version;
    is >> magic >> version;
    if (magic != "esd-checkpoint" || version != 1)
        throw std::runtime_error("load_checkpoint: unrecognized format");
    std::string tag;
    is >> tag >> iter_next_;
    if (tag != "iter_next") throw std::runtime_error("load_checkpoint: bad file");
    is >> tag;
    std::string rng_state;
    std::getline(is, rng_state);
    rng_.deserialize(rng_state);
    state_.beta = read_vec(is, "beta");
    state_.nu = read_vec(is, "nu");
    state_.nu_tilde = read_vec(is, "nu_tilde");
    state_.eta = read_vec(is, "eta");
    is >> tag >> state_.sigma_nu_sq >> state_.sigma_beta_sq >> state_.sigma_eta_sq >>
        state_.delta_sq >> state_.sigma_eps_sq >> state_.phi;
    std::size_t nsub;
    is >> tag >> nsub;
    sub_idx_.resize(nsub);
    for (auto& i : sub_idx_) is >> i;
    sub_pts_.clear();
    for (int idx : sub_idx_) sub_pts_.push_back(data_.locations[static_cast<std::size_t>(idx)]);
    is >> tag >> accept_count_ >> mh_tries_ >> adapt_accept_ >> adapt_tries_ >> mh_step_cur_;
    is >> tag >> out_.retained;
    out_.beta_samples = read_mat(is, "beta_samples");
    out_.eta_samples = read_mat(is, "eta_samples");
    out_.sigma_nu_sq = read_vec(is, "s_nu");
    out_.sigma_beta_sq = read_vec(is, "s_beta");
    out_.sigma_eta_sq = read_vec(is, "s_eta");
    out_.phi = read_vec(is, "phi");
    out_.delta_sq = read_vec(is, "delta");
    out_.sigma_eps_sq = read_vec(is, "s_eps");
    out_.phi_grid_log = read_mat(is, "phi_grid_log");
    out_.y_sum = read_vec(is, "y_sum");
    out_.y_sumsq = read_vec(is, "y_sumsq");
    if (is.fail()) throw std::runtime_error("load_checkpoint: truncated file");
}

}  // namespace esd
