// surfaces.hpp
// ------------
//
// Inventory x time grids. Rows are inventory levels (offset by the lowest
// stored level), columns are time indices, so each time slice is a
// contiguous column.

#ifndef MFIP_SURFACES_HPP
#define MFIP_SURFACES_HPP

#include "mfip/model.hpp"

#include <cassert>

namespace mfip {

template <typename Scalar>
class InventorySurface {
public:
    InventorySurface() = default;
    InventorySurface(int q_lo, int q_hi, int n_times, Scalar fill = Scalar(0))
        : q_lo_(q_lo), data_(Matrix<Scalar>::Constant(q_hi - q_lo + 1, n_times, fill)) {
        assert(q_hi >= q_lo && n_times > 0);
    }

    Scalar& operator()(int q, int j) { return data_(q - q_lo_, j); }
    Scalar operator()(int q, int j) const { return data_(q - q_lo_, j); }

    auto col(int j) { return data_.col(j); }
    auto col(int j) const { return data_.col(j); }

    int q_lo() const { return q_lo_; }
    int q_hi() const { return q_lo_ + int(data_.rows()) - 1; }
    int n_times() const { return int(data_.cols()); }

    const Matrix<Scalar>& matrix() const { return data_; }
    Matrix<Scalar>& matrix() { return data_; }

private:
    int q_lo_{0};
    Matrix<Scalar> data_;
};

/// h_q(t_j) for q in {q_min..q_max}.
template <typename Scalar>
using ValueSurface = InventorySurface<Scalar>;

/// delta*(t_j, q) for the quoting states q in {q_min+1..q_max}.
template <typename Scalar>
using QuoteSurface = InventorySurface<Scalar>;

/// P_{q, t_j} for q in {q_min..q_max}.
template <typename Scalar>
using PopulationFlow = InventorySurface<Scalar>;

/// delta_bar(t_j), j = 0..n_steps.
template <typename Scalar>
using MeanQuotePath = Vector<Scalar>;

template <typename Scalar>
MeanQuotePath<Scalar> constant_path(const TimeGrid<Scalar>& grid, Scalar value) {
    return MeanQuotePath<Scalar>::Constant(grid.size(), value);
}

}  // namespace mfip

#endif  // MFIP_SURFACES_HPP
