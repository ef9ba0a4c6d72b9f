#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "driftloc/errors.hpp"
#include "driftloc/flowfield.hpp"
#include "driftloc/ingest.hpp"
#include "oracles.hpp"

using namespace driftloc;

namespace {

// 3x3 all-water grid with a single velocity at the center cell.
VectorField center_flow(const Workspace& w, double u, double v) {
    std::vector<double> us(9, 0.0), vs(9, 0.0);
    us[4] = u;
    vs[4] = v;
    return VectorField(w, us, vs);
}

// Nearest of the nine candidate cells by exact enumeration, smallest index on ties.
CellIndex brute_nearest(const Workspace& w, CellIndex z, GridPoint e) {
    CellIndex best{};
    double best_d = INFINITY;
    const auto p = w.position(z);
    for (int r = 0; r < w.rows(); ++r) {
        for (int c = 0; c < w.cols(); ++c) {
            if (std::abs(r - p.row) > 1 || std::abs(c - p.col) > 1) continue;
            const CellIndex cand = w.cell_at({r, c});
            if (w.is_land(cand)) continue;
            const double d = (c - e.x) * (c - e.x) + (r - e.y) * (r - e.y);
            if (d < best_d || (d == best_d && cand < best)) {
                best = cand;
                best_d = d;
            }
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("flowfield") {

TEST_CASE("euler endpoint follows the current") {
    Workspace w(3, 3);
    const auto e = euler_endpoint(w, center_flow(w, 1.0, 0.0), CellIndex{5}, EulerStep(1.0));
    CHECK(e.x == 2.0);
    CHECK(e.y == 1.0);
    const auto still = euler_endpoint(w, VectorField::zeros(w), CellIndex{7}, EulerStep(1.0));
    CHECK(still.x == 0.0);
    CHECK(still.y == 2.0);
}

TEST_CASE("euler endpoint scales with dt and speed together") {
    Workspace w(3, 3);
    const auto a = euler_endpoint(w, center_flow(w, 0.3, -0.2), CellIndex{5}, EulerStep(2.0));
    const auto b = euler_endpoint(w, center_flow(w, 0.6, -0.4), CellIndex{5}, EulerStep(1.0));
    CHECK(a.x == doctest::Approx(b.x));
    CHECK(a.y == doctest::Approx(b.y));
}

TEST_CASE("euler endpoint rejects land and bad steps") {
    Workspace w(2, 2, {}, {}, {1, 0, 0, 0});
    CHECK_THROWS_AS(euler_endpoint(w, VectorField::zeros(w), CellIndex{1}, EulerStep(1.0)), LandCellError);
    CHECK_THROWS_AS(EulerStep(0.0), ParameterError);
    CHECK_THROWS_AS(EulerStep(NAN), ParameterError);
}

TEST_CASE("mapped cell examples") {
    Workspace w(3, 3);
    CHECK(mapped_cell(w, VectorField::zeros(w), CellIndex{5}, EulerStep(1.0)) == CellIndex{5});
    CHECK(mapped_cell(w, center_flow(w, 3.0, 0.0), CellIndex{5}, EulerStep(1.0)) == CellIndex{6});
    CHECK(mapped_cell(w, center_flow(w, 0.9, 1.1), CellIndex{5}, EulerStep(1.0)) == CellIndex{9});
}

TEST_CASE("mapped cell ties go to the smaller index") {
    Workspace w(3, 3);
    const EulerStep dt(1.0);
    CHECK(mapped_cell(w, center_flow(w, 0.5, 0.0), CellIndex{5}, dt) == CellIndex{5});
    CHECK(mapped_cell(w, center_flow(w, -0.5, 0.0), CellIndex{5}, dt) == CellIndex{4});
    CHECK(mapped_cell(w, center_flow(w, 0.5, 0.5), CellIndex{5}, dt) == CellIndex{5});
    CHECK(mapped_cell(w, center_flow(w, -0.5, -0.5), CellIndex{5}, dt) == CellIndex{1});
    CHECK(mapped_cell(w, center_flow(w, 0.0, 0.5), CellIndex{5}, dt) == CellIndex{5});
    CHECK(mapped_cell(w, center_flow(w, 0.0, -0.5), CellIndex{5}, dt) == CellIndex{2});
}

TEST_CASE("mapped cell never lands on land") {
    // Endpoint is the land cell 6; cells 3, 5 and 9 are all one unit away.
    Workspace w(3, 3, {}, {}, {0, 0, 0, 0, 0, 1, 0, 0, 0});
    const auto cell = mapped_cell(w, center_flow(w, 1.0, 0.0), CellIndex{5}, EulerStep(1.0));
    CHECK(cell == CellIndex{3});
}

TEST_CASE("default time step crosses one cell at the fastest current") {
    Workspace w(3, 3);
    CHECK(default_time_step(w, center_flow(w, 1.2, 1.6)).dt() == doctest::Approx(0.5));
    CHECK(default_time_step(w, VectorField::zeros(w)).dt() == 1.0);
}

TEST_CASE("vector field validation") {
    Workspace w(2, 2);
    CHECK_THROWS_AS(VectorField(w, {0, 0, 0}, {0, 0, 0, 0}), DimensionError);
    CHECK_THROWS_AS(VectorField(w, {0, NAN, 0, 0}, {0, 0, 0, 0}), ParameterError);
    Workspace other(3, 3);
    CHECK_THROWS_AS(build_cell_map(other, VectorField::zeros(w), EulerStep(1.0)), DimensionError);
    CHECK_THROWS_AS(build_cell_map_serial(other, VectorField::zeros(w), EulerStep(1.0)), DimensionError);
}

TEST_CASE("zero field maps every cell to itself") {
    Workspace w(4, 5, {}, {}, {0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0});
    const auto cm = build_cell_map(w, VectorField::zeros(w), EulerStep(1.0));
    for (std::size_t s = 0; s < w.free_count(); ++s) CHECK(cm.image_of_state(s) == w.cell_of_state(s));
}

TEST_CASE("uniform eastward flow shifts interior cells one column") {
    SyntheticFieldSpec spec;
    spec.kind = SyntheticKind::uniform;
    const auto data = synthesize_field(spec, 4, 6);
    const auto& w = data.workspace;
    const auto cm = build_cell_map(w, data.field, default_time_step(w, data.field));
    for (CellIndex z : w.free_cells()) {
        const auto p = w.position(z);
        const int expect_col = p.col + 1 < w.cols() ? p.col + 1 : p.col;
        CHECK(cm.image(w, z) == w.cell_at({p.row, expect_col}));
    }
}

TEST_CASE("cell map matches exhaustive nearest-cell search and stays local") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        const auto w = oracle::random_workspace(rng, 2 + trial % 6, 2 + trial % 5, 0.25);
        const auto f = oracle::random_field(rng, w);
        const auto dt = default_time_step(w, f);
        const auto cm = build_cell_map(w, f, dt);
        CHECK(cm == build_cell_map_serial(w, f, dt));
        CHECK(cm == build_cell_map(w, f, dt));
        for (CellIndex z : w.free_cells()) {
            const CellIndex img = cm.image(w, z);
            CHECK(img == brute_nearest(w, z, euler_endpoint(w, f, z, dt)));
            CHECK(w.is_water(img));
            CHECK(cell_distance(w, z, img) < 1.5);
        }
    }
}

TEST_CASE("double-gyre cell map turns with the analytic streamlines") {
    const int rows = 21, cols = 29;
    SyntheticFieldSpec spec;
    spec.kind = SyntheticKind::double_gyre;
    const auto data = synthesize_field(spec, rows, cols);
    const auto& w = data.workspace;
    const auto cm = build_cell_map(w, data.field, default_time_step(w, data.field));

    // Rotational part of the stream function, integrated with RK4 in grid units.
    const double pi = std::numbers::pi;
    auto velocity = [&](double x, double y) {
        const double X = 2.0 * x / (cols - 1), Y = y / (rows - 1);
        const double sx = pi * std::cos(pi * X) * std::sin(pi * Y);
        const double sy = pi * std::sin(pi * X) * std::cos(pi * Y);
        return std::pair{-sy, sx};
    };
    auto analytic_turn = [&](double x, double y, double cx, double cy) {
        double turn = 0.0, h = 0.05;
        for (int i = 0; i < 400; ++i) {
            auto [k1x, k1y] = velocity(x, y);
            auto [k2x, k2y] = velocity(x + h / 2 * k1x, y + h / 2 * k1y);
            auto [k3x, k3y] = velocity(x + h / 2 * k2x, y + h / 2 * k2y);
            auto [k4x, k4y] = velocity(x + h * k3x, y + h * k3y);
            const double nx = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
            const double ny = y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
            turn += (x - cx) * (ny - cy) - (y - cy) * (nx - cx);
            x = nx;
            y = ny;
        }
        return turn;
    };
    // Angular momentum of the one-step displacements of the basin around its center.
    auto map_turn = [&](double cx, double cy) {
        double turn = 0.0;
        for (CellIndex z : w.free_cells()) {
            const auto a = w.position(z), b = w.position(cm.image(w, z));
            if (std::hypot(a.col - cx, a.row - cy) > 6.0) continue;
            turn += (a.col - cx) * (b.row - a.row) - (a.row - cy) * (b.col - a.col);
        }
        return turn;
    };

    const double cy = (rows - 1) / 2.0;
    const double west = (cols - 1) / 4.0, east = 3.0 * (cols - 1) / 4.0;
    for (double cx : {west, east}) {
        const double a = analytic_turn(cx, cy + 5, cx, cy);
        const double m = map_turn(cx, cy);
        CHECK(a != 0.0);
        CHECK(m != 0.0);
        CHECK((a > 0) == (m > 0));
    }
    // Western gyre turns clockwise, eastern gyre anticlockwise.
    CHECK(map_turn(west, cy) < 0);
    CHECK(map_turn(east, cy) > 0);
}

}
