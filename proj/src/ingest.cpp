#include "driftloc/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "driftloc/errors.hpp"

namespace driftloc {

namespace {

constexpr long long kMaxCells = 50'000'000;

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view tok) {
    T value{};
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return value;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

class FieldParser {
public:
    explicit FieldParser(std::istream& in) : in_(in) {}

    GriddedField run() {
        auto magic = next_line();
        if (!magic || split_ws(*magic).size() != 2 || split_ws(*magic)[0] != "driftfield") {
            fail("expected header 'driftfield 1'");
        }
        if (split_ws(*magic)[1] != "1") fail("unsupported format version '" + std::string(split_ws(*magic)[1]) + "'");

        std::optional<int> rows, cols;
        GeoPoint origin;
        CellSize cell_size;
        bool have_origin = false, have_size = false;
        std::string depth = "unknown", time = "unknown";
        std::set<std::string> seen_keys;

        for (;;) {
            auto line = next_line();
            if (!line) fail("unexpected end of file before 'cells'");
            const auto tok = split_ws(*line);
            const auto key = tok[0];
            if (key != "cells" && !seen_keys.insert(std::string(key)).second) {
                fail("duplicate header key '" + std::string(key) + "'");
            }
            if (key == "cells") {
                if (tok.size() != 1) fail("'cells' takes no arguments");
                break;
            }
            if (key == "rows" || key == "cols") {
                if (tok.size() != 2) fail("'" + std::string(key) + "' expects one integer");
                const auto v = parse_number<int>(tok[1]);
                if (!v || *v < 2) fail("'" + std::string(key) + "' must be an integer >= 2");
                (key == "rows" ? rows : cols) = *v;
            } else if (key == "origin" || key == "cell_size") {
                if (tok.size() != 3) fail("'" + std::string(key) + "' expects two numbers");
                const auto a = parse_number<double>(tok[1]);
                const auto b = parse_number<double>(tok[2]);
                if (!a || !b || !std::isfinite(*a) || !std::isfinite(*b)) fail("'" + std::string(key) + "' values must be finite numbers");
                if (key == "origin") {
                    origin = {*a, *b};
                    have_origin = true;
                } else {
                    if (*a <= 0 || *b <= 0) fail("cell_size must be positive");
                    cell_size = {*a, *b};
                    have_size = true;
                }
            } else if (key == "depth" || key == "time") {
                if (tok.size() != 2) fail("'" + std::string(key) + "' expects a single label");
                (key == "depth" ? depth : time) = std::string(tok[1]);
            } else {
                fail("unknown header key '" + std::string(key) + "'");
            }
        }
        if (!rows || !cols) fail("header is missing 'rows' or 'cols'");
        if (static_cast<long long>(*rows) * *cols > kMaxCells) fail("grid exceeds " + std::to_string(kMaxCells) + " cells");
        if (!have_origin) origin = {};
        if (!have_size) cell_size = {};

        const auto n = static_cast<std::size_t>(*rows) * static_cast<std::size_t>(*cols);
        std::vector<std::uint8_t> land(n, 0);
        std::vector<double> u(n, 0.0), v(n, 0.0);
        std::vector<char> seen(n, 0);
        std::size_t records = 0;

        for (;;) {
            auto line = next_line();
            if (!line) fail("unexpected end of file: missing 'end' after " + std::to_string(records) + " records");
            const auto tok = split_ws(*line);
            if (tok[0] == "end") {
                if (tok.size() != 1) fail("'end' takes no arguments");
                break;
            }
            if (tok.size() != 5) fail("cell record needs 5 fields: row col land u v");
            const auto r = parse_number<int>(tok[0]);
            const auto c = parse_number<int>(tok[1]);
            const auto flag = parse_number<int>(tok[2]);
            const auto uu = parse_number<double>(tok[3]);
            const auto vv = parse_number<double>(tok[4]);
            if (!r || !c || *r < 0 || *c < 0 || *r >= *rows || *c >= *cols) fail("cell position out of range");
            if (!flag || (*flag != 0 && *flag != 1)) fail("land flag must be 0 or 1");
            if (!uu || !vv) fail("velocity is not a number");
            const std::string where = "record (" + std::to_string(*r) + ", " + std::to_string(*c) + ")";
            if (!std::isfinite(*uu) || !std::isfinite(*vv)) fail("non-finite velocity in " + where);
            const auto idx = static_cast<std::size_t>(*r) * static_cast<std::size_t>(*cols) + static_cast<std::size_t>(*c);
            if (seen[idx]) fail("duplicate " + where);
            if (*flag == 1 && (*uu != 0.0 || *vv != 0.0)) fail("land " + where + " must carry u = v = 0");
            seen[idx] = 1;
            land[idx] = static_cast<std::uint8_t>(*flag);
            u[idx] = *uu;
            v[idx] = *vv;
            ++records;
        }
        if (records != n) {
            fail("expected " + std::to_string(n) + " cell records, found " + std::to_string(records));
        }
        if (auto extra = next_line()) fail("content after 'end'");

        try {
            Workspace w(*rows, *cols, origin, cell_size, std::move(land));
            VectorField f(w, std::move(u), std::move(v));
            return {std::move(w), std::move(f), depth, time};
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }

private:
    // Next non-blank, non-comment line; nullopt at end of input.
    std::optional<std::string> next_line() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            const auto tok = split_ws(line);
            if (tok.empty() || tok[0].front() == '#') continue;
            return line;
        }
        return std::nullopt;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, what); }

    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace

GriddedField parse_field(std::istream& in) { return FieldParser(in).run(); }

GriddedField parse_field(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_field(in);
}

GriddedField load_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open field file '" + path.string() + "'");
    return parse_field(in);
}

void write_field(std::ostream& out, const GriddedField& data) {
    const Workspace& w = data.workspace;
    out << "driftfield 1\n"
        << "rows " << w.rows() << "\n"
        << "cols " << w.cols() << "\n"
        << "origin " << format_double(w.origin().lon) << ' ' << format_double(w.origin().lat) << "\n"
        << "cell_size " << format_double(w.cell_size().dlon) << ' ' << format_double(w.cell_size().dlat) << "\n"
        << "depth " << data.depth_label << "\n"
        << "time " << data.time_label << "\n"
        << "cells\n";
    for (int r = 0; r < w.rows(); ++r) {
        for (int c = 0; c < w.cols(); ++c) {
            const CellIndex z = w.cell_at({r, c});
            out << r << ' ' << c << ' ' << (w.is_land(z) ? 1 : 0) << ' ' << format_double(data.field.u(z)) << ' '
                << format_double(data.field.v(z)) << "\n";
        }
    }
    out << "end\n";
}

void save_field(const std::filesystem::path& path, const GriddedField& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write field file '" + path.string() + "'");
    write_field(out, data);
}

std::string_view to_string(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::uniform: return "uniform";
        case SyntheticKind::single_gyre: return "single_gyre";
        case SyntheticKind::double_gyre: return "double_gyre";
        case SyntheticKind::saddle: return "saddle";
    }
    return "?";
}

namespace {

const std::map<std::string, double>& defaults_for(SyntheticKind kind) {
    static const std::map<std::string, double> uniform{{"u", 1.0}, {"v", 0.0}};
    static const std::map<std::string, double> gyre{{"amplitude", 1.0}, {"convergence", 1.5}};
    static const std::map<std::string, double> saddle{{"amplitude", 1.0}};
    switch (kind) {
        case SyntheticKind::uniform: return uniform;
        case SyntheticKind::single_gyre:
        case SyntheticKind::double_gyre: return gyre;
        case SyntheticKind::saddle: return saddle;
    }
    return uniform;
}

}  // namespace

double SyntheticFieldSpec::param(const std::string& name) const {
    if (auto it = params.find(name); it != params.end()) return it->second;
    const auto& d = defaults_for(kind);
    if (auto it = d.find(name); it != d.end()) return it->second;
    throw ParameterError("synthetic field '" + std::string(to_string(kind)) + "' has no parameter '" + name + "'");
}

SyntheticFieldSpec parse_synthetic_spec(std::string_view text, int* rows, int* cols) {
    SyntheticFieldSpec spec;
    const auto colon = text.find(':');
    const auto kind = text.substr(0, colon);
    if (kind == "uniform") spec.kind = SyntheticKind::uniform;
    else if (kind == "single_gyre") spec.kind = SyntheticKind::single_gyre;
    else if (kind == "double_gyre") spec.kind = SyntheticKind::double_gyre;
    else if (kind == "saddle") spec.kind = SyntheticKind::saddle;
    else throw ParameterError("unknown synthetic field kind '" + std::string(kind) + "'");
    if (colon == std::string_view::npos) return spec;

    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParameterError("expected key=value in '" + std::string(item) + "'");
        const std::string key(item.substr(0, eq));
        const auto value = parse_number<double>(item.substr(eq + 1));
        if (!value || !std::isfinite(*value)) throw ParameterError("parameter '" + key + "' is not a finite number");
        if (key == "rows" || key == "cols") {
            int* target = key == "rows" ? rows : cols;
            if (*value != std::floor(*value)) throw ParameterError("'" + key + "' must be an integer");
            if (target) *target = static_cast<int>(*value);
            continue;
        }
        const auto& allowed = defaults_for(spec.kind);
        const bool center = spec.kind == SyntheticKind::saddle && (key == "cx" || key == "cy");
        if (!allowed.contains(key) && !center) {
            throw ParameterError("synthetic field '" + std::string(kind) + "' has no parameter '" + key + "'");
        }
        spec.params[key] = *value;
    }
    return spec;
}

std::string format_synthetic_spec(const SyntheticFieldSpec& spec) {
    std::string out(to_string(spec.kind));
    char sep = ':';
    for (const auto& [k, v] : spec.params) {
        out += sep + k + "=" + format_double(v);
        sep = ',';
    }
    return out;
}

GriddedField synthesize_field(const SyntheticFieldSpec& spec, int rows, int cols) {
    for (const auto& [k, v] : spec.params) {
        if (!std::isfinite(v)) throw ParameterError("parameter '" + k + "' is not finite");
    }
    const bool gyre = spec.kind == SyntheticKind::single_gyre || spec.kind == SyntheticKind::double_gyre;
    if (gyre && (rows < 4 || cols < 4)) throw ParameterError("gyre fields need at least a 4x4 grid");

    Workspace w(rows, cols);
    std::vector<double> u(w.size(), 0.0), v(w.size(), 0.0);
    constexpr double pi = std::numbers::pi;

    switch (spec.kind) {
        case SyntheticKind::uniform: {
            std::fill(u.begin(), u.end(), spec.param("u"));
            std::fill(v.begin(), v.end(), spec.param("v"));
            break;
        }
        case SyntheticKind::single_gyre:
        case SyntheticKind::double_gyre: {
            const double amplitude = spec.param("amplitude");
            const double convergence = spec.param("convergence");
            if (amplitude == 0.0 && convergence == 0.0) throw ParameterError("gyre needs a nonzero amplitude or convergence");
            // Stream function S = sin(pi X) sin(pi Y) over X in [0, basins], Y in [0, 1].
            // Rotation follows S; the drift climbs S^2, so every basin center is a sink.
            const double basins = spec.kind == SyntheticKind::double_gyre ? 2.0 : 1.0;
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) {
                    const double x = basins * c / (cols - 1);
                    const double y = static_cast<double>(r) / (rows - 1);
                    const double s = std::sin(pi * x) * std::sin(pi * y);
                    const double sx = pi * std::cos(pi * x) * std::sin(pi * y);
                    const double sy = pi * std::sin(pi * x) * std::cos(pi * y);
                    const auto i = static_cast<std::size_t>(r * cols + c);
                    u[i] = -amplitude * sy + convergence * 2.0 * s * sx;
                    v[i] = amplitude * sx + convergence * 2.0 * s * sy;
                }
            }
            break;
        }
        case SyntheticKind::saddle: {
            const double amplitude = spec.param("amplitude");
            if (amplitude == 0.0) throw ParameterError("saddle needs a nonzero amplitude");
            const double cx = spec.params.contains("cx") ? spec.params.at("cx") : (cols - 1) / 2.0;
            const double cy = spec.params.contains("cy") ? spec.params.at("cy") : (rows - 1) / 2.0;
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) {
                    const auto i = static_cast<std::size_t>(r * cols + c);
                    u[i] = amplitude * (c - cx);
                    v[i] = -amplitude * (r - cy);
                }
            }
            break;
        }
    }
    // sin(pi) is not exactly zero; snap roundoff so stagnation points stay exact.
    for (auto* comp : {&u, &v}) {
        for (double& x : *comp) {
            if (std::abs(x) < 1e-12) x = 0.0;
        }
    }
    VectorField f(w, std::move(u), std::move(v));
    return {std::move(w), std::move(f), "surface", "synthetic"};
}

}  // namespace driftloc
