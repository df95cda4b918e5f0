#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dbm/field.hpp"

namespace dbm {

/// Sample grids for sampled PSD and norm tests. Fixed by default for reproducible reports.
struct GridSpec {
    double x_lo = -5.0, x_hi = 5.0;
    int nx = 21;
    std::vector<double> ys{0.1, 0.5, 1.0, 2.0, 5.0};
    int pj_n = 20;            // P(J) grid is pj_n x pj_n over [x_lo, x_hi] x (0, pj_y_max]
    double pj_y_max = 5.0;
    double real_half_width = 10.0;
    int real_n = 41;
    int herglotz_real_n = 512;
    double pole_margin = 1e-6;

    /// Upper half plane grid {x + iy}.
    std::vector<cplx> upper() const {
        std::vector<cplx> pts;
        for (double y : ys)
            for (int k = 0; k < nx; ++k) pts.emplace_back(x_lo + (x_hi - x_lo) * k / (nx - 1), y);
        return pts;
    }
    std::vector<cplx> lower() const {
        auto pts = upper();
        for (auto& p : pts) p = std::conj(p);
        return pts;
    }
    std::vector<cplx> pj() const {
        std::vector<cplx> pts;
        for (int j = 0; j < pj_n; ++j)
            for (int k = 0; k < pj_n; ++k)
                pts.emplace_back(x_lo + (x_hi - x_lo) * k / (pj_n - 1), pj_y_max * (j + 1) / pj_n);
        return pts;
    }
    /// Chebyshev points on [-real_half_width, real_half_width].
    std::vector<double> real() const {
        std::vector<double> pts;
        for (int k = 0; k < real_n; ++k)
            pts.push_back(real_half_width * std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * real_n)));
        return pts;
    }
    /// Whole-line samples x = tan(theta), theta equispaced in (-pi/2, pi/2).
    std::vector<double> whole_line(int n) const {
        std::vector<double> pts;
        for (int k = 0; k < n; ++k) pts.push_back(std::tan(std::numbers::pi * ((k + 0.5) / n - 0.5)));
        return pts;
    }

    /// Parses "key=value" pairs separated by ';' (ys as a comma list), e.g. "nx=11;ys=0.5,1;real_n=21".
    static GridSpec parse(const std::string& spec) {
        GridSpec g;
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ';')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw PreconditionError("grid spec item without '=': " + item);
            const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
            try {
                if (key == "x_lo") g.x_lo = std::stod(val);
                else if (key == "x_hi") g.x_hi = std::stod(val);
                else if (key == "nx") g.nx = std::stoi(val);
                else if (key == "pj_n") g.pj_n = std::stoi(val);
                else if (key == "pj_y_max") g.pj_y_max = std::stod(val);
                else if (key == "real_half_width") g.real_half_width = std::stod(val);
                else if (key == "real_n") g.real_n = std::stoi(val);
                else if (key == "herglotz_real_n") g.herglotz_real_n = std::stoi(val);
                else if (key == "pole_margin") g.pole_margin = std::stod(val);
                else if (key == "ys") {
                    g.ys.clear();
                    std::stringstream vs(val);
                    std::string y;
                    while (std::getline(vs, y, ',')) g.ys.push_back(std::stod(y));
                } else {
                    throw PreconditionError("unknown grid key: " + key);
                }
            } catch (const std::invalid_argument&) {
                throw PreconditionError("bad grid value: " + item);
            }
        }
        if (g.nx < 2 || g.pj_n < 2 || g.real_n < 1 || g.ys.empty()) throw PreconditionError("grid too small");
        return g;
    }
};

inline const GridSpec& default_grid() {
    static const GridSpec g;
    return g;
}

}  // namespace dbm
