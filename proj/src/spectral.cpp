#include "esd/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace esd {

SpectralDraw draw_spectral(int K, int d, double phi, RngStream& rng) {
    if (K < 1) throw std::invalid_argument("draw_spectral: K must be >= 1");
    if (d != 1 && d != 2) throw std::invalid_argument("draw_spectral: d must be 1 or 2");
    if (!(phi > 0.0)) throw std::invalid_argument("draw_spectral: phi must be > 0");
    SpectralDraw draw;
    draw.omegas.resize(K, 2 * d);
    draw.kappas.resize(K);
    const double scale = 1.0 / phi;
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < 2 * d; ++j) draw.omegas(i, j) = rng.cauchy(scale);
    for (int i = 0; i < K; ++i) draw.kappas(i) = rng.uniform_phase();
    return draw;
}

Eigen::VectorXd simulate_field(const SpectralDraw& draw, const std::vector<Location>& points,
                               const ExpansionMap& map, double sigma_nu) {
    const int K = draw.K();
    const int d = draw.dim();
    if (!points.empty() && points.front().dim() != d)
        throw std::invalid_argument("simulate_field: draw width does not match point dimension");
    const int n = static_cast<int>(points.size());
    const double amp = sigma_nu * std::sqrt(2.0 / K);
    Eigen::VectorXd field(n);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < n; ++p) {
        const Location& s = points[static_cast<std::size_t>(p)];
        const Eigen::VectorXd f = warp(s, map);
        double acc = 0.0;
        if (d == 1) {
            const double fs = f(0), s0 = s[0];
            for (int i = 0; i < K; ++i)
                acc += std::cos(fs * draw.omegas(i, 0) + s0 * draw.omegas(i, 1) + draw.kappas(i));
        } else {
            const double f0 = f(0), f1 = f(1), s0 = s[0], s1 = s[1];
            for (int i = 0; i < K; ++i)
                acc += std::cos(f0 * draw.omegas(i, 0) + f1 * draw.omegas(i, 1) +
                                s0 * draw.omegas(i, 2) + s1 * draw.omegas(i, 3) + draw.kappas(i));
        }
        field(p) = amp * acc;
    }
    return field;
}

Covariogram empirical_covariogram(const Eigen::MatrixXd& fields,
                                  const std::vector<Location>& points, const ExpansionMap& map,
                                  const std::vector<double>& bin_edges) {
    const int reps = static_cast<int>(fields.rows());
    const int n = static_cast<int>(fields.cols());
    if (reps < 2) throw std::invalid_argument("empirical_covariogram: need >= 2 replicates");
    if (n != static_cast<int>(points.size()))
        throw std::invalid_argument("empirical_covariogram: field width != point count");
    if (bin_edges.size() < 2)
        throw std::invalid_argument("empirical_covariogram: need >= 1 bin");

    const int nbins = static_cast<int>(bin_edges.size()) - 1;
    Covariogram cg;
    cg.bin_lo.assign(bin_edges.begin(), bin_edges.end() - 1);
    cg.bin_hi.assign(bin_edges.begin() + 1, bin_edges.end());
    cg.covariance.assign(static_cast<std::size_t>(nbins), 0.0);
    cg.pair_count.assign(static_cast<std::size_t>(nbins), 0);
    cg.empty.assign(static_cast<std::size_t>(nbins), true);

    const Eigen::RowVectorXd col_mean = fields.colwise().mean();
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double E = expanded_distance(points[static_cast<std::size_t>(i)],
                                               points[static_cast<std::size_t>(j)], map);
            int b = -1;
            for (int k = 0; k < nbins; ++k)
                if (E >= bin_edges[static_cast<std::size_t>(k)] &&
                    E < bin_edges[static_cast<std::size_t>(k + 1)]) {
                    b = k;
                    break;
                }
            if (b < 0) continue;
            // sample covariance over replicates, divisor reps-1
            double c = 0.0;
            for (int r = 0; r < reps; ++r)
                c += (fields(r, i) - col_mean(i)) * (fields(r, j) - col_mean(j));
            c /= (reps - 1);
            cg.covariance[static_cast<std::size_t>(b)] += c;
            cg.pair_count[static_cast<std::size_t>(b)] += 1;
            cg.empty[static_cast<std::size_t>(b)] = false;
        }
    }
    for (int k = 0; k < nbins; ++k)
        if (!cg.empty[static_cast<std::size_t>(k)])
            cg.covariance[static_cast<std::size_t>(k)] /=
                static_cast<double>(cg.pair_count[static_cast<std::size_t>(k)]);
    return cg;
}

}  // namespace esd
