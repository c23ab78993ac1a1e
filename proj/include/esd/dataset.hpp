#ifndef ESD_DATASET_HPP
#define ESD_DATASET_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace esd {

// Spatial coordinate in d in {1,2} dimensions.
class Location {
public:
    explicit Location(double x) : coords_{x, 0.0}, dim_(1) { check(); }
    Location(double x, double y) : coords_{x, y}, dim_(2) { check(); }

    int dim() const { return dim_; }
    double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

private:
    void check() const {
        for (int i = 0; i < dim_; ++i)
            if (!std::isfinite(coords_[static_cast<std::size_t>(i)]))
                throw std::invalid_argument("Location: non-finite coordinate");
    }
    std::array<double, 2> coords_;
    int dim_;
};

inline double distance(const Location& a, const Location& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("distance: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Observed data plus the full prediction-location layout. Missingness is
// encoded by exclusion from observed_idx (the incidence matrix as indices).
struct Dataset {
    std::vector<Location> locations;   // m prediction locations
    std::vector<int> observed_idx;     // n indices into locations, injective
    Eigen::VectorXd Z;                 // n responses
    Eigen::MatrixXd X;                 // n x p covariates at observed locations
    Eigen::MatrixXd X_pred;            // m x p covariates at all locations
    Eigen::VectorXd truth;             // optional known Y (size m), empty if unknown

    int m() const { return static_cast<int>(locations.size()); }
    int n() const { return static_cast<int>(observed_idx.size()); }
    int p() const { return static_cast<int>(X.cols()); }
    int dim() const { return locations.empty() ? 0 : locations.front().dim(); }
    bool has_truth() const { return truth.size() == static_cast<Eigen::Index>(locations.size()); }

    void validate() const;
};

}  // namespace esd

#endif
