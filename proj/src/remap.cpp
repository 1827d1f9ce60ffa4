#include "llf/remap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace llf {

double OrigRemap::eval1(double delta) const {
    if (delta == 0.0) return 0.0;
    const double s = delta > 0.0 ? 1.0 : -1.0;
    const double ad = std::abs(delta);
    if (ad < sigma) return s * sigma * std::pow(ad / sigma, alpha);
    return s * (beta * (ad - sigma) + sigma);
}

std::array<double, 3> orig_remap_grad(const OrigRemap& p, double delta) {
    if (delta == 0.0) return {0.0, 0.0, 0.0};
    const double s = delta > 0.0 ? 1.0 : -1.0;
    const double ad = std::abs(delta);
    if (ad < p.sigma) {
        const double q = ad / p.sigma;
        const double t = std::pow(q, p.alpha);
        return {s * t * (1.0 - p.alpha), s * p.sigma * t * std::log(q), 0.0};
    }
    return {s * (1.0 - p.beta), 0.0, s * (ad - p.sigma)};
}

std::vector<double> RemapCurve::make_grid(int n) {
    if (n < 2) throw config_error("remap curve needs at least 2 grid points");
    std::vector<double> grid(n);
    for (int j = 0; j < n; ++j)
        grid[j] = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n - 1);
    return grid;
}

RemapCurve export_curve(const RemapFunction& r, int n) {
    RemapCurve c;
    c.grid = RemapCurve::make_grid(n);
    c.values.resize(n);
    r.eval(c.grid, c.values);
    return c;
}

MonotonicityReport check_monotonic(const RemapCurve& c) {
    constexpr double kTol = 1e-9;
    MonotonicityReport rep;
    for (int k = 1; k < c.size(); ++k) {
        if (c.values[k] < c.values[k - 1] - kTol) {
            rep.is_monotonic = false;
            rep.violations.push_back({k, c.grid[k], c.values[k - 1] - c.values[k]});
        }
    }
    return rep;
}

TabulatedRemap::TabulatedRemap(RemapCurve curve) : curve_(std::move(curve)) {
    if (curve_.size() < 2 || curve_.grid.size() != curve_.values.size())
        throw config_error("malformed remap curve");
}

void table_lookup(std::span<const double> grid, double delta, int& j, double& u) {
    const int n = static_cast<int>(grid.size());
    const double d = std::clamp(delta, grid.front(), grid.back());
    const double pos = (d - grid.front()) / (grid.back() - grid.front()) * (n - 1);
    j = std::clamp(static_cast<int>(std::floor(pos)), 0, n - 2);
    // the uniform-grid estimate can be off by one at knot boundaries
    while (j > 0 && d < grid[j]) --j;
    while (j < n - 2 && d > grid[j + 1]) ++j;
    u = (d - grid[j]) / (grid[j + 1] - grid[j]);
}

void TabulatedRemap::lookup(double delta, int& j, double& u) const {
    table_lookup(curve_.grid, delta, j, u);
}

double TabulatedRemap::eval1(double delta) const {
    int j;
    double u;
    lookup(delta, j, u);
    return (1.0 - u) * curve_.values[j] + u * curve_.values[j + 1];
}

void write_curve_csv(const RemapCurve& c, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw io_error("cannot write curve to " + path);
    std::fputs("delta,value\n", f);
    for (int j = 0; j < c.size(); ++j)
        std::fprintf(f, "%.17g,%.17g\n", c.grid[j], c.values[j]);
    std::fclose(f);
}

RemapCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read curve from " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("delta,value", 0) != 0)
        throw io_error("missing curve header in " + path);
    RemapCurve c;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double d, v;
        if (std::sscanf(line.c_str(), "%lf,%lf", &d, &v) != 2)
            throw io_error("malformed curve row in " + path);
        c.grid.push_back(d);
        c.values.push_back(v);
    }
    if (c.size() < 2) throw io_error("curve in " + path + " has fewer than 2 rows");
    return c;
}

std::string monotonicity_report_json(const MonotonicityReport& r, const RemapCurve&) {
    nlohmann::json j;
    j["is_monotonic"] = r.is_monotonic;
    j["violations"] = nlohmann::json::array();
    for (const auto& v : r.violations)
        j["violations"].push_back({{"index", v.index}, {"delta", v.delta}, {"drop", v.drop}});
    return j.dump(2);
}

void write_monotonicity_json(const MonotonicityReport& r, const RemapCurve& c,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write monotonicity report to " + path);
    out << monotonicity_report_json(r, c) << "\n";
}

}  // namespace llf
