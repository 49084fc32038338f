#pragma once

#include <span>
#include <vector>

namespace pins {

/// Terminal portfolio values of one strategy over M simulated paths.
struct TerminalSample {
    std::vector<double> values;
    double v0 = 100.0;
    double floor = 100.0;  // F_T
    double r = 0.0;
    double horizon = 1.0;
};

// Ratios that divide by an empty loss side come back as +infinity; values
// that are 0/0 or otherwise undefined come back as NaN.

/// E(V - L)^+ / E(L - V)^+.
double omega(const TerminalSample& sample, double threshold);

/// (E V - L) / (E[((L - V)^+)^n])^{1/n}.
double kappa(const TerminalSample& sample, int order, double threshold);

/// Excess simple return over e^{rT} - 1 divided by the unbiased standard
/// deviation of V_T / V0 - 1.
double sharpe(const TerminalSample& sample);

struct ShortfallStats {
    double probability = 0.0;
    double expected_shortfall = 0.0;  // NaN when no path ends below the floor
};

/// Fraction of values strictly below F_T and mean(F_T - V) over those.
ShortfallStats shortfall_stats(const TerminalSample& sample);

double sample_mean(std::span<const double> values);
double sample_std(std::span<const double> values);

struct KappaEntry {
    int order = 2;
    double threshold = 0.0;
    double value = 0.0;
};

struct MetricsReport {
    double mean = 0.0;
    double std = 0.0;
    double sharpe = 0.0;
    std::vector<std::pair<double, double>> omega;  // (L, Omega(L))
    std::vector<KappaEntry> kappa;                 // ordered by order, then L
    ShortfallStats shortfall;
};

/// Thresholds are given as fractions x of V0, i.e. L = V0 (1 + x).
MetricsReport compute_metrics(const TerminalSample& sample,
                              std::span<const double> threshold_fractions,
                              std::span<const int> kappa_orders);

}  // namespace pins
