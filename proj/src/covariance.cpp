#include "esd/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace esd {

void ExpansionMap::validate() const {
    basis.validate();
    if (eta.size() != basis.rows())
        throw std::invalid_argument("ExpansionMap: eta length must equal basis rows");
}

void CovParams::validate() const {
    if (!(phi > 0.0)) throw std::invalid_argument("CovParams: phi must be > 0");
    if (!(sigma_nu_sq > 0.0)) throw std::invalid_argument("CovParams: sigma_nu_sq must be > 0");
}

Eigen::VectorXd warp(const Location& s, const ExpansionMap& map) {
    return eval_basis(s, map.basis).transpose() * map.eta;
}

double expanded_distance(const Location& si, const Location& sj, const ExpansionMap& map) {
    if (si.dim() != sj.dim()) throw std::invalid_argument("expanded_distance: dimension mismatch");
    const Eigen::VectorXd fi = warp(si, map);
    const Eigen::VectorXd fj = warp(sj, map);
    double s = 0.0;
    for (int k = 0; k < si.dim(); ++k) {
        const double d = si[k] - sj[k];
        s += d * d;
    }
    s += (fi - fj).squaredNorm();
    return std::sqrt(s);
}

double cov(const Location& si, const Location& sj, const CovParams& params, const BasisSet& basis) {
    params.validate();
    const ExpansionMap map{basis, params.eta};
    return params.sigma_nu_sq * std::exp(-expanded_distance(si, sj, map) / params.phi);
}

Eigen::MatrixXd expanded_distance_matrix(const std::vector<Location>& points,
                                         const ExpansionMap& map, int cap) {
    const int n = static_cast<int>(points.size());
    if (n > cap) throw std::invalid_argument("expanded_distance_matrix: point count exceeds cap");
    // warps once per point, not per pair
    std::vector<Eigen::VectorXd> f(points.size());
    for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = warp(points[static_cast<std::size_t>(i)], map);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < points[static_cast<std::size_t>(i)].dim(); ++k) {
                const double d = points[static_cast<std::size_t>(i)][k] - points[static_cast<std::size_t>(j)][k];
                s += d * d;
            }
            s += (f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)]).squaredNorm();
            E(i, j) = E(j, i) = std::sqrt(s);
        }
    }
    return E;
}

Eigen::MatrixXd expanded_l1_distance_matrix(const std::vector<Location>& points,
                                            const ExpansionMap& map, int cap) {
    const int n = static_cast<int>(points.size());
    if (n > cap) throw std::invalid_argument("expanded_l1_distance_matrix: point count exceeds cap");
    std::vector<Eigen::VectorXd> f(points.size());
    for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = warp(points[static_cast<std::size_t>(i)], map);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < points[static_cast<std::size_t>(i)].dim(); ++k)
                s += std::abs(points[static_cast<std::size_t>(i)][k] - points[static_cast<std::size_t>(j)][k]);
            s += (f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)]).cwiseAbs().sum();
            E(i, j) = E(j, i) = s;
        }
    }
    return E;
}

Eigen::MatrixXd cov_matrix(const std::vector<Location>& points, const CovParams& params,
                           const BasisSet& basis, int cap) {
    params.validate();
    const int n = static_cast<int>(points.size());
    if (n > cap) throw std::invalid_argument("cov_matrix: point count exceeds cap");
    const ExpansionMap map{basis, params.eta};
    Eigen::MatrixXd C = expanded_distance_matrix(points, map, cap);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            C(i, j) = params.sigma_nu_sq * std::exp(-C(i, j) / params.phi);
    C.diagonal().array() += kCovJitterRel * params.sigma_nu_sq;
    return C;
}

}  // namespace esd
