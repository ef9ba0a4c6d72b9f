#include "driftloc/flowfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftloc/errors.hpp"

namespace driftloc {

VectorField::VectorField(const Workspace& w, std::vector<double> u, std::vector<double> v)
    : u_(std::move(u)), v_(std::move(v)) {
    if (u_.size() != w.size() || v_.size() != w.size()) {
        throw DimensionError("vector field has " + std::to_string(u_.size()) + "/" + std::to_string(v_.size()) +
                             " samples for a workspace of " + std::to_string(w.size()) + " cells");
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        const CellIndex z{static_cast<std::int32_t>(i + 1)};
        if (w.is_land(z)) {
            u_[i] = 0.0;
            v_[i] = 0.0;
        } else if (!std::isfinite(u_[i]) || !std::isfinite(v_[i])) {
            throw ParameterError("non-finite velocity at cell " + std::to_string(z.value));
        }
    }
}

VectorField VectorField::zeros(const Workspace& w) {
    return VectorField(w, std::vector<double>(w.size(), 0.0), std::vector<double>(w.size(), 0.0));
}

EulerStep::EulerStep(double dt) : dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("time step must be positive and finite");
}

EulerStep default_time_step(const Workspace& w, const VectorField& f) {
    double max_speed = 0.0;
    for (CellIndex z : w.free_cells()) max_speed = std::max(max_speed, std::hypot(f.u(z), f.v(z)));
    return EulerStep(max_speed > 0.0 ? 1.0 / max_speed : 1.0);
}

GridPoint euler_endpoint(const Workspace& w, const VectorField& f, CellIndex z, EulerStep dt) {
    if (w.is_land(z)) throw LandCellError("no flow line from land cell " + std::to_string(z.value));
    const GridPos p = w.position(z);
    return {p.col + dt.dt() * f.u(z), p.row + dt.dt() * f.v(z)};
}

CellIndex mapped_cell(const Workspace& w, const VectorField& f, CellIndex z, EulerStep dt) {
    const GridPoint end = euler_endpoint(w, f, z, dt);
    auto dist2 = [&](CellIndex c) {
        const GridPos p = w.position(c);
        const double dx = end.x - p.col;
        const double dy = end.y - p.row;
        return dx * dx + dy * dy;
    };
    CellIndex best = z;
    double best_d = dist2(z);
    for (CellIndex c : neighbors(w, z)) {
        const double d = dist2(c);
        if (d < best_d || (d == best_d && c < best)) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

namespace {

void check_shape(const Workspace& w, const VectorField& f) {
    if (f.size() != w.size()) {
        throw DimensionError("vector field has " + std::to_string(f.size()) + " samples, workspace has " +
                             std::to_string(w.size()) + " cells");
    }
}

}  // namespace

CellMap build_cell_map(const Workspace& w, const VectorField& f, EulerStep dt) {
    check_shape(w, f);
    const auto cells = w.free_cells();
    const auto n = static_cast<std::ptrdiff_t>(cells.size());
    std::vector<CellIndex> images(cells.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < n; ++s) {
        images[static_cast<std::size_t>(s)] = mapped_cell(w, f, cells[static_cast<std::size_t>(s)], dt);
    }
    return CellMap(std::move(images));
}

CellMap build_cell_map_serial(const Workspace& w, const VectorField& f, EulerStep dt) {
    check_shape(w, f);
    std::vector<CellIndex> images;
    images.reserve(w.free_count());
    for (CellIndex z : w.free_cells()) images.push_back(mapped_cell(w, f, z, dt));
    return CellMap(std::move(images));
}

}  // namespace driftloc
