#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dfhn/bifurcation.hpp"

namespace dfhn {

inline constexpr const char* kVersion = "0.1.0";

std::string format_g17(double v);

/// Writes rows of doubles under a header line, 17 significant digits.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

/// JSON sidecar `<path>.meta.json` carrying full parameter provenance.
void write_sidecar(const std::string& path, const nlohmann::json& params);

/// Curve export: label,k,param,tau,y.
void write_curves_csv(const std::string& path, const std::vector<BifurcationCurve>& curves);

/// Standalone gnuplot script referencing CSVs by relative path.
void write_plot_script(const std::string& path, const std::string& title,
                       const std::vector<std::string>& plot_lines);

} // namespace dfhn
