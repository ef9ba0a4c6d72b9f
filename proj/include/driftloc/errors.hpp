#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftloc {

struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct NonAdjacentCells : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LandCellError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InternalInconsistency : std::logic_error {
    using std::logic_error::logic_error;
};

// Raised by the decoder when no state sequence explains the observations.
// `step` is the 1-based index of the first observation that cannot be emitted.
class ZeroProbabilityError : public std::runtime_error {
public:
    explicit ZeroProbabilityError(std::size_t step)
        : std::runtime_error("observation sequence has zero probability: no feasible state emits observation " +
                             std::to_string(step)),
          step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Collects every validation failure of a config before anything runs.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out = "invalid experiment config:";
        for (const auto& issue : issues) out += "\n  - " + issue;
        return out;
    }

    std::vector<std::string> issues_;
};

}  // namespace driftloc
