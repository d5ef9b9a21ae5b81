#include "dfhn/io.hpp"

#include <cstdio>
#include <fstream>

#include "dfhn/errors.hpp"

namespace dfhn {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path);
    if (!f) throw error("cannot open " + path);
    f << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) f << ",";
            f << format_g17(row[i]);
        }
        f << "\n";
    }
}

void write_sidecar(const std::string& path, const nlohmann::json& params) {
    nlohmann::json j = params;
    j["version"] = kVersion;
    std::ofstream f(path + ".meta.json");
    if (!f) throw error("cannot open " + path + ".meta.json");
    f << j.dump(2) << "\n";
}

void write_curves_csv(const std::string& path, const std::vector<BifurcationCurve>& curves) {
    std::ofstream f(path);
    if (!f) throw error("cannot open " + path);
    f << "label,k,param,tau,y\n";
    for (const auto& c : curves)
        for (const auto& s : c.samples)
            f << curve_label_name(c.label) << "," << c.k << "," << format_g17(s.param) << ","
              << format_g17(s.tau) << "," << format_g17(s.y) << "\n";
}

void write_plot_script(const std::string& path, const std::string& title,
                       const std::vector<std::string>& plot_lines) {
    std::ofstream f(path);
    if (!f) throw error("cannot open " + path);
    f << "# gnuplot script (no in-process plotting dependency)\n";
    f << "set datafile separator ','\n";
    f << "set key outside\n";
    f << "set title '" << title << "'\n";
    for (const auto& l : plot_lines) f << l << "\n";
    f << "pause -1\n";
}

} // namespace dfhn
