#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace driftloc {

/// 1-based cell index, row-major from the south-west corner of the grid.
struct CellIndex {
    std::int32_t value = 0;

    friend constexpr auto operator<=>(CellIndex, CellIndex) = default;
};

struct GridPos {
    int row = 0;  // 0 is the southernmost row
    int col = 0;  // 0 is the westernmost column

    friend constexpr bool operator==(GridPos, GridPos) = default;
};

struct GeoPoint {
    double lon = 0.0;
    double lat = 0.0;

    friend constexpr bool operator==(GeoPoint, GeoPoint) = default;
};

struct CellSize {
    double dlon = 1.0;
    double dlat = 1.0;

    friend constexpr bool operator==(CellSize, CellSize) = default;
};

/// Compass alphabet of the drifter: eight headings plus the idle symbol.
enum class Direction : std::uint8_t { N, NE, E, SE, S, SW, W, NW, Idle };

inline constexpr std::size_t kDirectionCount = 9;

inline constexpr std::array<Direction, kDirectionCount> kAllDirections = {
    Direction::N, Direction::NE, Direction::E,  Direction::SE,  Direction::S,
    Direction::SW, Direction::W, Direction::NW, Direction::Idle};

struct Offset {
    int drow = 0;
    int dcol = 0;

    friend constexpr bool operator==(Offset, Offset) = default;
};

constexpr Offset offset_of(Direction d) {
    switch (d) {
        case Direction::N: return {1, 0};
        case Direction::NE: return {1, 1};
        case Direction::E: return {0, 1};
        case Direction::SE: return {-1, 1};
        case Direction::S: return {-1, 0};
        case Direction::SW: return {-1, -1};
        case Direction::W: return {0, -1};
        case Direction::NW: return {1, -1};
        case Direction::Idle: return {0, 0};
    }
    return {0, 0};
}

/// Inverse of offset_of; nullopt when the offset is not a single king move.
std::optional<Direction> direction_from_offset(Offset off);

constexpr std::size_t index_of(Direction d) { return static_cast<std::size_t>(d); }

/// Symbols used in serialized observation histories ("I" is idle).
std::string_view symbol_of(Direction d);
std::optional<Direction> parse_direction(std::string_view symbol);

/// Discretized 2-D workspace with a land mask. Immutable after construction.
class Workspace {
public:
    /// `land_mask` is row-major (size rows*cols, nonzero = land); empty means all water.
    Workspace(int rows, int cols, GeoPoint origin = {}, CellSize cell_size = {},
              std::vector<std::uint8_t> land_mask = {});

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_); }
    std::size_t free_count() const noexcept { return free_cells_.size(); }
    GeoPoint origin() const noexcept { return origin_; }
    CellSize cell_size() const noexcept { return cell_size_; }

    bool contains(CellIndex z) const noexcept { return z.value >= 1 && static_cast<std::size_t>(z.value) <= size(); }
    bool in_bounds(GridPos p) const noexcept { return p.row >= 0 && p.row < rows_ && p.col >= 0 && p.col < cols_; }

    /// Throws IndexOutOfRange for invalid cells.
    bool is_land(CellIndex z) const;
    bool is_water(CellIndex z) const { return !is_land(z); }

    CellIndex cell_at(GridPos p) const;
    GridPos position(CellIndex z) const;
    GeoPoint geo_center(CellIndex z) const;

    /// Water cells in increasing index order; position in this list is the state id.
    std::span<const CellIndex> free_cells() const noexcept { return free_cells_; }
    /// Throws LandCellError for land and IndexOutOfRange for invalid cells.
    std::size_t state_of(CellIndex z) const;
    CellIndex cell_of_state(std::size_t state) const;

    /// A water cell is a boundary cell when any of its eight Moore positions
    /// is off-grid or land.
    bool is_boundary(CellIndex z) const;

    const std::vector<std::uint8_t>& land_mask() const noexcept { return land_; }

    friend bool operator==(const Workspace&, const Workspace&) = default;

private:
    void check(CellIndex z) const;

    int rows_;
    int cols_;
    GeoPoint origin_;
    CellSize cell_size_;
    std::vector<std::uint8_t> land_;
    std::vector<CellIndex> free_cells_;
    std::vector<std::int32_t> state_;  // per cell, -1 for land
};

/// Water cells of the Moore neighborhood of z, excluding z, in increasing index order.
std::vector<CellIndex> neighbors(const Workspace& w, CellIndex z);

/// Compass heading of the king move z -> z2; Idle iff z2 == z.
Direction direction_between(const Workspace& w, CellIndex z, CellIndex z2);

/// Euclidean distance between cell centers in cell units.
double cell_distance(const Workspace& w, CellIndex z, CellIndex z2);

}  // namespace driftloc
