#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mvcp::cli::svg {

// Plain SVG charts for eyeballing diagnostics; no styling contract.

/// Line plot with markers; points with no value are skipped.
std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<double>& xs, const std::vector<std::optional<double>>& ys,
                      const std::string& comment);

/// Scatter plot, one color per distinct group label (legend included).
std::string scatter(const std::string& title, const std::vector<double>& xs, const std::vector<double>& ys,
                    const std::vector<std::string>& groups, const std::string& comment);

}  // namespace mvcp::cli::svg
