#include "esd/dataset.hpp"

#include <set>
#include <stdexcept>

namespace esd {

void Dataset::validate() const {
    const int mm = m();
    const int nn = n();
    if (nn > mm) throw std::invalid_argument("Dataset: n must be <= m");
    std::set<int> seen;
    for (int idx : observed_idx) {
        if (idx < 0 || idx >= mm) throw std::invalid_argument("Dataset: observed index out of range");
        if (!seen.insert(idx).second)
            throw std::invalid_argument("Dataset: observed_idx must be injective");
    }
    for (std::size_t i = 1; i < locations.size(); ++i)
        if (locations[i].dim() != locations[0].dim())
            throw std::invalid_argument("Dataset: mixed location dimensions");
    if (Z.size() != nn) throw std::invalid_argument("Dataset: Z length != n");
    if (X.rows() != nn) throw std::invalid_argument("Dataset: X rows != n");
    if (X_pred.rows() != mm) throw std::invalid_argument("Dataset: X_pred rows != m");
    if (X.cols() != X_pred.cols()) throw std::invalid_argument("Dataset: X/X_pred column mismatch");
    if (!Z.allFinite()) throw std::invalid_argument("Dataset: non-finite response");
    if (truth.size() != 0 && truth.size() != mm)
        throw std::invalid_argument("Dataset: truth length != m");
}

}  // namespace esd
