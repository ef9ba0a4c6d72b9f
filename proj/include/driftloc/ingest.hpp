#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "driftloc/flowfield.hpp"
#include "driftloc/gridworld.hpp"

namespace driftloc {

/// A workspace and the current field sampled on it, plus the descriptive
/// header labels of the file it came from.
struct GriddedField {
    Workspace workspace;
    VectorField field;
    std::string depth_label = "unknown";
    std::string time_label = "unknown";
};

/// Reads the line-oriented `driftfield 1` format (see docs/field-format.md).
/// Every failure is a ParseError carrying the 1-based line number.
GriddedField load_field(const std::filesystem::path& path);
GriddedField parse_field(std::istream& in);
GriddedField parse_field(std::string_view text);

void save_field(const std::filesystem::path& path, const GriddedField& data);
void write_field(std::ostream& out, const GriddedField& data);

enum class SyntheticKind { uniform, single_gyre, double_gyre, saddle };

std::string_view to_string(SyntheticKind kind);

/// Analytic stand-in for a gridded current slice.
///
/// uniform:     u, v (constant velocity)
/// single_gyre: amplitude (rotation), convergence (inward drift)
/// double_gyre: amplitude, convergence; two counter-rotating basins side by side
/// saddle:      amplitude (strain rate), cx, cy (stagnation point, grid units)
struct SyntheticFieldSpec {
    SyntheticKind kind = SyntheticKind::double_gyre;
    std::map<std::string, double> params;

    double param(const std::string& name) const;
};

/// Parses "kind" or "kind:key=value,key=value". Keys `rows` and `cols` are
/// returned through the optional out-parameters when present.
SyntheticFieldSpec parse_synthetic_spec(std::string_view text, int* rows = nullptr, int* cols = nullptr);
std::string format_synthetic_spec(const SyntheticFieldSpec& spec);

/// Samples the analytic velocity at every cell center of an all-water grid.
/// Throws ParameterError for invalid parameters or grids too small for the kind.
GriddedField synthesize_field(const SyntheticFieldSpec& spec, int rows, int cols);

}  // namespace driftloc
