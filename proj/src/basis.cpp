#include "esd/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace esd {

void BasisSet::validate() const {
    if (knots.empty()) throw std::invalid_argument("BasisSet: at least one knot required");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("BasisSet: bandwidth must be > 0");
    for (std::size_t i = 0; i < knots.size(); ++i)
        for (std::size_t j = i + 1; j < knots.size(); ++j)
            if (distance(knots[i], knots[j]) == 0.0)
                throw std::invalid_argument("BasisSet: knots must be distinct");
}

static double bisquare(double dist, double w) {
    if (dist > w) return 0.0;
    const double u = dist / w;
    const double t = 1.0 - u * u;
    return t * t;
}

Eigen::MatrixXd eval_basis(const Location& s, const BasisSet& basis) {
    const int rb = static_cast<int>(basis.knots.size());
    const int d = s.dim();
    if (!basis.knots.empty() && basis.knots.front().dim() != d)
        throw std::invalid_argument("eval_basis: location/knot dimension mismatch");

    if (basis.kind == BasisKind::OzoneComposite) {
        if (d != 2) throw std::invalid_argument("eval_basis: ozone-composite requires d=2");
        const int r = rb + 3;
        Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(r, 2);
        // column 1: (0_3', zeta(s)')'
        for (int k = 0; k < rb; ++k)
            psi(3 + k, 0) = bisquare(distance(s, basis.knots[static_cast<std::size_t>(k)]),
                                     basis.bandwidth);
        // column 2: (1, s', 0_rb')'
        psi(0, 1) = 1.0;
        psi(1, 1) = s[0];
        psi(2, 1) = s[1];
        return psi;
    }

    Eigen::MatrixXd psi(rb, d);
    for (int k = 0; k < rb; ++k) {
        const double dist = distance(s, basis.knots[static_cast<std::size_t>(k)]);
        double val;
        if (basis.kind == BasisKind::GaussianRbf) {
            val = std::exp(-basis.bandwidth * dist);
        } else {
            val = bisquare(dist, basis.bandwidth);
        }
        for (int j = 0; j < d; ++j) psi(k, j) = val;
    }
    return psi;
}

double default_tau(const std::vector<Location>& points) {
    if (points.size() < 2) throw std::invalid_argument("default_tau: need at least 2 points");
    std::vector<double> dists;
    dists.reserve(points.size() * (points.size() - 1) / 2);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double dij = distance(points[i], points[j]);
            if (dij > 0.0) dists.push_back(dij);
        }
    if (dists.empty()) throw std::invalid_argument("default_tau: all points identical");
    std::sort(dists.begin(), dists.end());
    const std::size_t k = dists.size();
    const double med = (k % 2 == 1) ? dists[k / 2] : 0.5 * (dists[k / 2 - 1] + dists[k / 2]);
    return 1.5 * med;
}

std::vector<Location> knot_grid_1d(const std::vector<Location>& points, int count) {
    if (count < 1) throw std::invalid_argument("knot_grid_1d: count must be >= 1");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : points) {
        if (p.dim() != 1) throw std::invalid_argument("knot_grid_1d: points must be 1-D");
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
    }
    std::vector<Location> knots;
    knots.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        knots.emplace_back(0.5 * (lo + hi));
        return knots;
    }
    const double step = (hi - lo) / (count - 1);
    for (int k = 0; k < count; ++k) knots.emplace_back(lo + k * step);
    return knots;
}

std::vector<Location> knot_grid_2d(const std::vector<Location>& points, int count_x, int count_y) {
    if (count_x < 1 || count_y < 1) throw std::invalid_argument("knot_grid_2d: counts must be >= 1");
    double lox = std::numeric_limits<double>::infinity(), hix = -lox;
    double loy = lox, hiy = -lox;
    for (const auto& p : points) {
        if (p.dim() != 2) throw std::invalid_argument("knot_grid_2d: points must be 2-D");
        lox = std::min(lox, p[0]);
        hix = std::max(hix, p[0]);
        loy = std::min(loy, p[1]);
        hiy = std::max(hiy, p[1]);
    }
    const double sx = count_x > 1 ? (hix - lox) / (count_x - 1) : 0.0;
    const double sy = count_y > 1 ? (hiy - loy) / (count_y - 1) : 0.0;
    std::vector<Location> knots;
    knots.reserve(static_cast<std::size_t>(count_x) * static_cast<std::size_t>(count_y));
    for (int i = 0; i < count_x; ++i)
        for (int j = 0; j < count_y; ++j)
            knots.emplace_back(count_x > 1 ? lox + i * sx : 0.5 * (lox + hix),
                               count_y > 1 ? loy + j * sy : 0.5 * (loy + hiy));
    return knots;
}

}  // namespace esd
