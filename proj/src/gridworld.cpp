#include "driftloc/gridworld.hpp"

#include <cmath>
#include <string>

#include "driftloc/errors.hpp"

namespace driftloc {

std::optional<Direction> direction_from_offset(Offset off) {
    for (Direction d : kAllDirections) {
        if (offset_of(d) == off) return d;
    }
    return std::nullopt;
}

std::string_view symbol_of(Direction d) {
    switch (d) {
        case Direction::N: return "N";
        case Direction::NE: return "NE";
        case Direction::E: return "E";
        case Direction::SE: return "SE";
        case Direction::S: return "S";
        case Direction::SW: return "SW";
        case Direction::W: return "W";
        case Direction::NW: return "NW";
        case Direction::Idle: return "I";
    }
    return "?";
}

std::optional<Direction> parse_direction(std::string_view symbol) {
    for (Direction d : kAllDirections) {
        if (symbol_of(d) == symbol) return d;
    }
    return std::nullopt;
}

Workspace::Workspace(int rows, int cols, GeoPoint origin, CellSize cell_size, std::vector<std::uint8_t> land_mask)
    : rows_(rows), cols_(cols), origin_(origin), cell_size_(cell_size), land_(std::move(land_mask)) {
    if (rows < 2 || cols < 2) {
        throw DimensionError("workspace needs at least 2 rows and 2 columns, got " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    if (land_.empty()) land_.assign(size(), 0);
    if (land_.size() != size()) {
        throw DimensionError("land mask has " + std::to_string(land_.size()) + " entries, expected " +
                             std::to_string(size()));
    }
    for (auto& flag : land_) flag = flag ? 1 : 0;

    state_.assign(size(), -1);
    for (std::size_t i = 0; i < size(); ++i) {
        if (land_[i]) continue;
        state_[i] = static_cast<std::int32_t>(free_cells_.size());
        free_cells_.push_back(CellIndex{static_cast<std::int32_t>(i + 1)});
    }
    if (free_cells_.empty()) throw DimensionError("workspace has no water cells");
}

void Workspace::check(CellIndex z) const {
    if (!contains(z)) {
        throw IndexOutOfRange("cell index " + std::to_string(z.value) + " outside 1.." + std::to_string(size()));
    }
}

bool Workspace::is_land(CellIndex z) const {
    check(z);
    return land_[static_cast<std::size_t>(z.value - 1)] != 0;
}

CellIndex Workspace::cell_at(GridPos p) const {
    if (!in_bounds(p)) {
        throw IndexOutOfRange("grid position (" + std::to_string(p.row) + ", " + std::to_string(p.col) +
                              ") outside the workspace");
    }
    return CellIndex{p.row * cols_ + p.col + 1};
}

GridPos Workspace::position(CellIndex z) const {
    check(z);
    return {(z.value - 1) / cols_, (z.value - 1) % cols_};
}

GeoPoint Workspace::geo_center(CellIndex z) const {
    const GridPos p = position(z);
    return {origin_.lon + (p.col + 0.5) * cell_size_.dlon, origin_.lat + (p.row + 0.5) * cell_size_.dlat};
}

std::size_t Workspace::state_of(CellIndex z) const {
    check(z);
    const auto s = state_[static_cast<std::size_t>(z.value - 1)];
    if (s < 0) throw LandCellError("cell " + std::to_string(z.value) + " is land");
    return static_cast<std::size_t>(s);
}

CellIndex Workspace::cell_of_state(std::size_t state) const {
    if (state >= free_cells_.size()) {
        throw IndexOutOfRange("state " + std::to_string(state) + " outside 0.." + std::to_string(free_cells_.size()));
    }
    return free_cells_[state];
}

bool Workspace::is_boundary(CellIndex z) const {
    const GridPos p = position(z);
    for (Direction d : kAllDirections) {
        if (d == Direction::Idle) continue;
        const Offset o = offset_of(d);
        const GridPos q{p.row + o.drow, p.col + o.dcol};
        if (!in_bounds(q) || land_[static_cast<std::size_t>(q.row * cols_ + q.col)]) return true;
    }
    return false;
}

std::vector<CellIndex> neighbors(const Workspace& w, CellIndex z) {
    const GridPos p = w.position(z);
    std::vector<CellIndex> out;
    out.reserve(8);
    // Row-major scan from the south keeps the result sorted by index.
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const GridPos q{p.row + dr, p.col + dc};
            if (!w.in_bounds(q)) continue;
            const CellIndex c = w.cell_at(q);
            if (!w.is_land(c)) out.push_back(c);
        }
    }
    return out;
}

Direction direction_between(const Workspace& w, CellIndex z, CellIndex z2) {
    const GridPos a = w.position(z);
    const GridPos b = w.position(z2);
    const auto d = direction_from_offset({b.row - a.row, b.col - a.col});
    if (!d) {
        throw NonAdjacentCells("cells " + std::to_string(z.value) + " and " + std::to_string(z2.value) +
                               " are not Moore-adjacent");
    }
    return *d;
}

double cell_distance(const Workspace& w, CellIndex z, CellIndex z2) {
    const GridPos a = w.position(z);
    const GridPos b = w.position(z2);
    return std::hypot(static_cast<double>(b.row - a.row), static_cast<double>(b.col - a.col));
}

}  // namespace driftloc
