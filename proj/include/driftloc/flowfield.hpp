#pragma once

#include <span>
#include <vector>

#include "driftloc/gridworld.hpp"

namespace driftloc {

/// Per-cell horizontal current, in cell widths (u, easting) and cell heights
/// (v, northing) per unit time. Land cells carry zero velocity.
class VectorField {
public:
    VectorField() = default;
    /// Throws DimensionError on size mismatch and ParameterError on non-finite water velocities.
    VectorField(const Workspace& w, std::vector<double> u, std::vector<double> v);

    static VectorField zeros(const Workspace& w);

    std::size_t size() const noexcept { return u_.size(); }
    double u(CellIndex z) const { return u_.at(static_cast<std::size_t>(z.value - 1)); }
    double v(CellIndex z) const { return v_.at(static_cast<std::size_t>(z.value - 1)); }
    std::span<const double> u() const noexcept { return u_; }
    std::span<const double> v() const noexcept { return v_; }

    friend bool operator==(const VectorField&, const VectorField&) = default;

private:
    std::vector<double> u_;
    std::vector<double> v_;
};

/// Time needed to cross one cell.
class EulerStep {
public:
    explicit EulerStep(double dt);
    double dt() const noexcept { return dt_; }

private:
    double dt_;
};

/// 1 / max|F| over water cells, or 1 for a still field.
EulerStep default_time_step(const Workspace& w, const VectorField& f);

/// Continuous grid coordinates: x along columns, y along rows, cell centers on integers.
struct GridPoint {
    double x = 0.0;
    double y = 0.0;
};

GridPoint euler_endpoint(const Workspace& w, const VectorField& f, CellIndex z, EulerStep dt);

/// Water cell of neighbors(z) ∪ {z} nearest to the Euler endpoint; ties go to the smaller index.
CellIndex mapped_cell(const Workspace& w, const VectorField& f, CellIndex z, EulerStep dt);

/// Deterministic image of every water cell, indexed by state id.
class CellMap {
public:
    CellMap() = default;
    explicit CellMap(std::vector<CellIndex> images) : images_(std::move(images)) {}

    std::size_t size() const noexcept { return images_.size(); }
    CellIndex image_of_state(std::size_t state) const { return images_.at(state); }
    CellIndex image(const Workspace& w, CellIndex z) const { return images_.at(w.state_of(z)); }
    std::span<const CellIndex> images() const noexcept { return images_; }

    friend bool operator==(const CellMap&, const CellMap&) = default;

private:
    std::vector<CellIndex> images_;
};

/// OpenMP kernel over water cells.
CellMap build_cell_map(const Workspace& w, const VectorField& f, EulerStep dt);
/// Single-threaded reference for build_cell_map.
CellMap build_cell_map_serial(const Workspace& w, const VectorField& f, EulerStep dt);

}  // namespace driftloc
