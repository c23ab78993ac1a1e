#include "esd/scoring.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace esd {

double rmspe(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred,
             const std::vector<int>* subset) {
    if (truth.size() != pred.size()) throw std::invalid_argument("rmspe: length mismatch");
    const int m = static_cast<int>(truth.size());
    double acc = 0.0;
    int count = 0;
    if (subset) {
        if (subset->empty()) throw std::invalid_argument("rmspe: empty subset");
        for (int idx : *subset) {
            if (idx < 0 || idx >= m) throw std::invalid_argument("rmspe: subset index out of range");
            const double d = truth(idx) - pred(idx);
            acc += d * d;
            ++count;
        }
    } else {
        if (m == 0) throw std::invalid_argument("rmspe: empty vectors");
        acc = (truth - pred).squaredNorm();
        count = m;
    }
    return std::sqrt(acc / count);
}

std::pair<double, double> hpd_interval(const Eigen::VectorXd& samples, double level) {
    const int N = static_cast<int>(samples.size());
    if (N < 20) throw std::invalid_argument("hpd_interval: need at least 20 samples");
    if (!(level > 0.0) || !(level < 1.0))
        throw std::invalid_argument("hpd_interval: level must be in (0,1)");
    std::vector<double> s(samples.data(), samples.data() + N);
    std::sort(s.begin(), s.end());
    const int k = static_cast<int>(std::ceil(level * N));
    double best_lo = s.front(), best_hi = s[static_cast<std::size_t>(k - 1)];
    double best_w = best_hi - best_lo;
    for (int i = 1; i + k <= N; ++i) {
        const double w = s[static_cast<std::size_t>(i + k - 1)] - s[static_cast<std::size_t>(i)];
        if (w < best_w) {
            best_w = w;
            best_lo = s[static_cast<std::size_t>(i)];
            best_hi = s[static_cast<std::size_t>(i + k - 1)];
        }
    }
    return {best_lo, best_hi};
}

double effective_sample_size(const Eigen::VectorXd& samples) {
    const int N = static_cast<int>(samples.size());
    if (N < 4) throw std::invalid_argument("effective_sample_size: need at least 4 samples");
    const double mu = samples.mean();
    const Eigen::ArrayXd c = samples.array() - mu;
    const double g0 = (c * c).sum() / N;
    if (!(g0 > 0.0)) return static_cast<double>(N);  // constant chain

    auto gamma_at = [&](int t) {
        double acc = 0.0;
        for (int i = 0; i + t < N; ++i) acc += c(i) * c(i + t);
        return acc / N;
    };

    // initial monotone sequence over paired autocovariances
    double var_est = -g0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (int t = 0; t + 1 < N; t += 2) {
        double pair = gamma_at(t) + gamma_at(t + 1);
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        var_est += 2.0 * pair;
        prev_pair = pair;
    }
    if (!(var_est > 0.0)) return static_cast<double>(N);
    return std::min(static_cast<double>(N), N * g0 / var_est);
}

OracleResult dense_gp_oracle(const Dataset& data, const OracleParams& params,
                             const BasisSet& basis) {
    data.validate();
    const int m = data.m();
    const int n = data.n();
    if (m > 500) throw std::invalid_argument("dense_gp_oracle: m exceeds the 500-point cap");
    if (n < 1) throw std::invalid_argument("dense_gp_oracle: no observations");
    if (params.delta_sq < 0.0 || params.sigma_beta_sq < 0.0 || !(params.sigma_eps_sq >= 0.0))
        throw std::invalid_argument("dense_gp_oracle: negative variance");

    // prior covariance of Y: sigma_beta^2 X X' + C + delta^2 I
    Eigen::MatrixXd Kfull = cov_matrix(data.locations, params.cov, basis, 500);
    Kfull.diagonal().array() += params.delta_sq;
    if (params.sigma_beta_sq > 0.0)
        Kfull += params.sigma_beta_sq * data.X_pred * data.X_pred.transpose();

    Eigen::MatrixXd S(n, n);   // cov(Z)
    Eigen::MatrixXd C_pz(m, n);  // cov(Y, Z)
    for (int a = 0; a < n; ++a) {
        const int ia = data.observed_idx[static_cast<std::size_t>(a)];
        for (int b = 0; b < n; ++b)
            S(a, b) = Kfull(ia, data.observed_idx[static_cast<std::size_t>(b)]);
        C_pz.col(a) = Kfull.col(ia);
    }
    S.diagonal().array() += params.sigma_eps_sq;

    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("dense_gp_oracle: observation covariance not PD");

    OracleResult res;
    res.mean = C_pz * llt.solve(data.Z);
    res.variance.resize(m);
    const Eigen::MatrixXd W = llt.matrixL().solve(C_pz.transpose());  // n x m
    for (int j = 0; j < m; ++j)
        res.variance(j) = std::max(Kfull(j, j) - W.col(j).squaredNorm(), 0.0);
    return res;
}

}  // namespace esd
