#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "bipep/errors.hpp"

namespace bipep {

class TorusGrid;
using GridPtr = std::shared_ptr<const TorusGrid>;

namespace detail {
// FFTW's planner is not thread-safe; plan creation/destruction is serialized.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Uniform periodic grid on [0,2pi)^d with spectral bookkeeping: the
/// wavenumber table for each axis ({-n/2+1, ..., n/2}), the 2/3-rule dealias
/// mask, and FFTW plans shared by every field operation on the grid.
///
/// Grids are immutable after construction and always held through GridPtr.
/// Plan execution goes through the new-array interface on caller-owned
/// buffers, so concurrent use from independent workers is safe.
class TorusGrid {
  public:
    static constexpr double axis_length = 2.0 * std::numbers::pi;

    ~TorusGrid() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_plan_);
        fftw_destroy_plan(backward_plan_);
    }

    TorusGrid(const TorusGrid&) = delete;
    TorusGrid& operator=(const TorusGrid&) = delete;

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    std::size_t size() const { return size_; }

    double spacing() const { return axis_length / n_; }
    /// dx^d, the quadrature weight of one node.
    double cell_volume() const {
        return std::pow(spacing(), static_cast<double>(dim_));
    }
    /// (2pi)^d
    double volume() const {
        return std::pow(axis_length, static_cast<double>(dim_));
    }

    /// Integer wavenumber associated with axis index m (same table per axis).
    int wavenumber(int index) const { return ktab_[static_cast<std::size_t>(index)]; }
    int max_wavenumber() const { return n_ / 2; }
    /// Largest |k| kept by the 2/3 rule.
    int dealias_cutoff() const { return n_ / 3; }

    /// Wavevector of the flattened mode index (axis 0 slowest, row-major).
    std::array<int, 3> wavevector(std::size_t flat) const {
        std::array<int, 3> k{0, 0, 0};
        for (int axis = dim_ - 1; axis >= 0; --axis) {
            k[static_cast<std::size_t>(axis)] = ktab_[flat % static_cast<std::size_t>(n_)];
            flat /= static_cast<std::size_t>(n_);
        }
        return k;
    }

    /// Node coordinates of the flattened node index.
    std::array<double, 3> node(std::size_t flat) const {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        const double dx = spacing();
        for (int axis = dim_ - 1; axis >= 0; --axis) {
            x[static_cast<std::size_t>(axis)] =
                dx * static_cast<double>(flat % static_cast<std::size_t>(n_));
            flat /= static_cast<std::size_t>(n_);
        }
        return x;
    }

    bool dealias_keep(std::size_t flat) const { return mask_[flat] != 0; }
    const std::vector<std::uint8_t>& dealias_mask() const { return mask_; }

    /// Unnormalized DFT (sum of f_j e^{-i k.x_j}); in and out must differ.
    void forward(const std::complex<double>* in, std::complex<double>* out) const {
        fftw_execute_dft(forward_plan_,
                         reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    /// Unnormalized inverse (sum of c_k e^{+i k.x_j}); in and out must differ.
    void backward(const std::complex<double>* in, std::complex<double>* out) const {
        fftw_execute_dft(backward_plan_,
                         reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    bool same_shape(const TorusGrid& other) const {
        return dim_ == other.dim_ && n_ == other.n_;
    }

    static GridPtr create(int dim, int n) {
        if (dim < 1 || dim > 3)
            throw InvalidDimensionError("grid dimension must be 1, 2 or 3, got " +
                                        std::to_string(dim));
        if (n < 8 || n % 2 != 0)
            throw InvalidGridError("points per axis must be even and >= 8, got " +
                                   std::to_string(n));
        return GridPtr(new TorusGrid(dim, n));
    }

  private:
    TorusGrid(int dim, int n) : dim_(dim), n_(n) {
        size_ = 1;
        for (int axis = 0; axis < dim_; ++axis) size_ *= static_cast<std::size_t>(n_);

        ktab_.resize(static_cast<std::size_t>(n_));
        for (int m = 0; m < n_; ++m)
            ktab_[static_cast<std::size_t>(m)] = (m <= n_ / 2) ? m : m - n_;

        mask_.resize(size_);
        for (std::size_t flat = 0; flat < size_; ++flat) {
            const auto k = wavevector(flat);
            bool keep = true;
            for (int axis = 0; axis < dim_; ++axis)
                keep = keep && 3 * std::abs(k[static_cast<std::size_t>(axis)]) <= n_;
            mask_[flat] = keep ? 1 : 0;
        }

        std::vector<std::complex<double>> a(size_), b(size_);
        std::array<int, 3> dims{n_, n_, n_};
        {
            std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
            const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
            forward_plan_ = fftw_plan_dft(dim_, dims.data(),
                                          reinterpret_cast<fftw_complex*>(a.data()),
                                          reinterpret_cast<fftw_complex*>(b.data()),
                                          FFTW_FORWARD, flags);
            backward_plan_ = fftw_plan_dft(dim_, dims.data(),
                                           reinterpret_cast<fftw_complex*>(a.data()),
                                           reinterpret_cast<fftw_complex*>(b.data()),
                                           FFTW_BACKWARD, flags);
        }
        if (forward_plan_ == nullptr || backward_plan_ == nullptr)
            throw InvalidGridError("FFTW plan creation failed");
    }

    int dim_;
    int n_;
    std::size_t size_;
    std::vector<int> ktab_;
    std::vector<std::uint8_t> mask_;
    fftw_plan forward_plan_;
    fftw_plan backward_plan_;
};

inline GridPtr make_grid(int dim, int n) { return TorusGrid::create(dim, n); }

}  // namespace bipep
