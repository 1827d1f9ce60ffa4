#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "llf/errors.hpp"

namespace llf {

// Scalar remap r(delta) applied to the difference between a pixel and its
// local Gaussian context. The remap is the filter's only behavioral knob.
class RemapFunction {
public:
    virtual ~RemapFunction() = default;
    virtual double eval1(double delta) const = 0;
    virtual void eval(std::span<const double> delta, std::span<double> out) const {
        for (size_t i = 0; i < delta.size(); ++i) out[i] = eval1(delta[i]);
    }
};

// Three-parameter remap: sign(d)*sigma*(|d|/sigma)^alpha inside the
// threshold, sign(d)*(beta*(|d|-sigma)+sigma) outside. Odd, continuous at
// |d| == sigma, and r(0) == 0 for all parameter values.
struct OrigRemap final : RemapFunction {
    double sigma = 0.2;  // detail/edge threshold, > 0
    double alpha = 1.0;  // detail exponent, > 0
    double beta = 1.0;   // edge slope, >= 0

    OrigRemap() = default;
    OrigRemap(double s, double a, double b) : sigma(s), alpha(a), beta(b) {}

    double eval1(double delta) const override;
};

// Partials (d/dsigma, d/dalpha, d/dbeta). Branch selection is treated as
// constant; at delta == 0 all three are defined as 0.
std::array<double, 3> orig_remap_grad(const OrigRemap& p, double delta);

// Tabulation of a remap on a uniform grid over [-1, 1].
struct RemapCurve {
    std::vector<double> grid;    // strictly increasing, grid[0]=-1, back()=1
    std::vector<double> values;

    static std::vector<double> make_grid(int n);
    int size() const { return static_cast<int>(grid.size()); }
};

// Deterministic tabulation; n >= 2. MLP remaps must be in inference mode.
RemapCurve export_curve(const RemapFunction& r, int n);

struct MonotonicityViolation {
    int index;    // right element of the violating adjacent pair
    double delta; // grid[index]
    double drop;  // values[index-1] - values[index]
};

struct MonotonicityReport {
    bool is_monotonic = true;
    std::vector<MonotonicityViolation> violations;
};

// Flags every adjacent pair with values[k+1] < values[k] - 1e-9.
MonotonicityReport check_monotonic(const RemapCurve& c);

// Knot interval and interpolation weight on a uniform grid; deltas beyond
// the ends clamp. The single definition is shared by evaluation and by the
// reverse pass, so their weights always agree.
void table_lookup(std::span<const double> grid, double delta, int& j, double& u);

// Piecewise-linear evaluation between knots; exact at knots. Deltas beyond
// the grid ends clamp to the end values. This is the single differentiable
// pathway the training loop drives, for both remap kinds.
class TabulatedRemap final : public RemapFunction {
public:
    explicit TabulatedRemap(RemapCurve curve);

    double eval1(double delta) const override;

    // Knot interval and interpolation weight for a delta; eval1 returns
    // (1-u)*values[j] + u*values[j+1] for exactly this (j, u).
    void lookup(double delta, int& j, double& u) const;

    const RemapCurve& curve() const { return curve_; }

private:
    RemapCurve curve_;
};

void write_curve_csv(const RemapCurve& c, const std::string& path);
RemapCurve read_curve_csv(const std::string& path);
std::string monotonicity_report_json(const MonotonicityReport& r, const RemapCurve& c);
void write_monotonicity_json(const MonotonicityReport& r, const RemapCurve& c,
                             const std::string& path);

}  // namespace llf
