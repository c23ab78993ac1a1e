#ifndef ESD_BASIS_HPP
#define ESD_BASIS_HPP

#include <Eigen/Dense>
#include <vector>

#include "esd/dataset.hpp"

namespace esd {

enum class BasisKind {
    GaussianRbf,     // psi_k(s) = exp(-tau * ||s - c_k||), distance not squared
    Bisquare,        // zeta_k(s) = (1 - (||s-c_k||/w)^2)^2 on ||s-c_k|| <= w
    OzoneComposite,  // d=2; col 1 = (0_3', zeta(s)')', col 2 = (1, s', 0_rb')'
};

struct BasisSet {
    BasisKind kind = BasisKind::GaussianRbf;
    std::vector<Location> knots;  // r_b knots, distinct
    double bandwidth = 1.0;       // tau for gaussian-rbf, aperture w otherwise

    // number of rows of psi(s)
    int rows() const {
        const int rb = static_cast<int>(knots.size());
        return kind == BasisKind::OzoneComposite ? rb + 3 : rb;
    }

    void validate() const;
};

// psi(s), an r x d matrix.
Eigen::MatrixXd eval_basis(const Location& s, const BasisSet& basis);

// 1.5 x median of all pairwise nonzero Euclidean distances.
double default_tau(const std::vector<Location>& points);

// Equally spaced knots over the bounding box of points. For d=1 a 1-D grid
// of count knots; for d=2 a count_x by count_y grid.
std::vector<Location> knot_grid_1d(const std::vector<Location>& points, int count);
std::vector<Location> knot_grid_2d(const std::vector<Location>& points, int count_x, int count_y);

}  // namespace esd

#endif
