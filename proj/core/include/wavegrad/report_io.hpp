#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavegrad/experiments.hpp"

namespace wavegrad {

inline constexpr const char* kHistoryCsvHeader = "iter,loss,gap,eta,halvings,mass,min_p";

class ReportIoError : public std::runtime_error {
public:
    ReportIoError(const std::string& what, std::filesystem::path path)
        : std::runtime_error(what + ": " + path.string()), path(std::move(path)) {}

    std::filesystem::path path;
};

// Header plus one row per record; LF endings, floats with 17 significant digits.
void write_history_csv(const DescentHistory& history, std::ostream& out);

// <dir>/<preset>_<metric>.csv for every metric that produced a history.
// Returns the paths written.
std::vector<std::filesystem::path> write_csv(const RunReport& report, const std::filesystem::path& dir);

// Gap versus iteration on a log axis, one polyline per metric.
void write_svg(const RunReport& report, std::ostream& out);
void write_svg(const RunReport& report, const std::filesystem::path& path);

std::string format_double(double value);

}  // namespace wavegrad
