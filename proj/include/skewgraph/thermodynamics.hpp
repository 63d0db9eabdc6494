#ifndef SKEWGRAPH_THERMODYNAMICS_HPP
#define SKEWGRAPH_THERMODYNAMICS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skewgraph/ergodic.hpp"
#include "skewgraph/skew_system.hpp"

namespace skewgraph {

struct Potential {
    enum class Form { Constant, Cosine, NegLogDeriv, FiberDependent };
    Form form = Form::Constant;
    double value = 0.0;  // the constant, or the cosine amplitude
    Observable fn;       // FiberDependent only
    bool holder = true;

    double eval(double t, double x = 0.0) const;
    bool fiber_independent() const { return form != Form::FiberDependent; }
    std::string name() const;
    std::string tag() const;  // filesystem-safe short form of name()

    static Potential constant(double c);
    static Potential cosine(double amplitude);
    static Potential neg_log_deriv();  // -log|D omega| = -log 4
    static Potential fiber_dependent(Observable f);
};

struct PressureRow {
    double epsilon = 0.0;  // separated-set rows
    int n = 0;             // orbit length or resolution
    std::int64_t count = 0;
    double log_sum = 0.0;
    double value = 0.0;  // (1/n) log sum, or log lambda_1 for transfer rows
};

enum class PressureMethod { SeparatedSets, TransferOperator };

struct PressureResult {
    PressureMethod method = PressureMethod::TransferOperator;
    double value = 0.0;
    std::vector<PressureRow> diagnostics;
    // transfer-operator extras
    double eigenvalue = 0.0;
    double spectral_gap_ratio = 0.0;      // |lambda_2| / lambda_1 estimate, < 1
    std::vector<double> density;          // equilibrium cell masses, sum 1
    std::vector<double> cauchy_ladder;    // |P_N - P_{N/2}| down the resolution ladder
};

// Collocation transfer matrix on uniform circle cells: row j holds the four
// branch pre-images y = (t_j + k)/4 of the cell-j centre, weighted by e^{phi(y)}.
// For phi = 0 every column's branch count is exactly 4.
struct TransferDiscretization {
    int resolution = 0;
    std::vector<std::array<int, 4>> source_cell;  // per row: cells of the 4 branch points
    std::vector<std::array<double, 4>> weight;

    static TransferDiscretization build(const Potential& phi, int resolution);
    void apply(const std::vector<double>& in, std::vector<double>& out) const;
    void apply_transpose(const std::vector<double>& in, std::vector<double>& out) const;
    double column_weight_sum(int k) const;
};

// leading eigen-data by power iteration over a resolution ladder; pressure is
// log of the leading eigenvalue at the finest resolution
PressureResult transfer_pressure(const Potential& phi, const std::vector<int>& resolutions);

// greedy maximally separated subset of the uniform M-point circle grid under the
// d_n metric of the quadrupling map (indices into the grid)
std::vector<std::int64_t> greedy_separated_circle(std::int64_t grid_points, double eps, int n);

// potential-weighted separated-set counts; the headline value is the log-slope
// of the weighted sums between the two largest completed n at the smallest
// epsilon, which cancels the (1/n) log(1/eps) bias of the raw quotients
PressureResult pressure_separated(const Potential& phi, const std::vector<double>& epsilons,
                                  int n_max, std::int64_t max_grid = (1 << 23));

// same estimator over the invertible torus extension: the grid is the product of
// the circle grid in t and an epsilon-spaced grid in the contracting coordinate
PressureResult pressure_separated_baker(const Potential& phi, const std::vector<double>& epsilons,
                                        int n_max, std::int64_t max_grid = (1 << 23));

struct CycleBound {
    int period;
    double max_average;  // max Birkhoff average of phi over cycles of this period
};

struct VariationalReport {
    double pressure = 0.0;
    std::vector<CycleBound> bounds;
    double max_cycle_average = -1e300;
    bool satisfied = false;       // pressure >= every zero-entropy cycle bound
    double entropy_floor = 0.0;   // log 4 + min phi
    bool floor_satisfied = false;
};

// exact enumeration of the quadrupling map's periodic orbits t = k/(4^p - 1)
VariationalReport variational_check(const Potential& phi, double pressure, int max_period);

// psi(p) = phi(t0(p), gamma_band(p)); fibre-independent phi reduces to phi(t0)
std::function<double(const BasePoint&)> lift_potential(const SkewSystem& sys, int band,
                                                       const Potential& phi, int depth);

struct LiftedPressureReport {
    double transfer_circle = 0.0;
    double separated_baker = 0.0;
    double difference = 0.0;
};

LiftedPressureReport lifted_pressure_check(const Potential& phi, int resolution,
                                           const std::vector<double>& epsilons, int baker_n_max);

// atoms (p, gamma(p)) with base points drawn from the equilibrium cell density
// by inverse CDF, lifted to the invertible base with uniform contracting digits
struct PushforwardMeasure {
    EmpiricalMeasure measure;
    MeanSE mean_x;
};

PushforwardMeasure pushforward_equilibrium(const SkewSystem& sys, int band,
                                           const std::vector<double>& density,
                                           const BaseMeasureSampler& sampler, std::size_t count,
                                           int depth, int threads = 1);

// one forward step applied to every atom: (t, x) -> (4t mod 1, f_t(x))
EmpiricalMeasure advance_measure(const SkewSystem& sys, int band, const EmpiricalMeasure& m);

} // namespace skewgraph

#endif
