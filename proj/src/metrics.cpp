#include "pins/metrics.hpp"

#include <cmath>
#include <limits>

#include "pins/errors.hpp"

namespace pins {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_nonempty(const TerminalSample& sample) {
    if (sample.values.empty()) {
        throw InputError("metrics need at least one terminal value");
    }
}

double ratio_or_sentinel(double num, double den) {
    if (den > 0.0) {
        return num / den;
    }
    return num > 0.0 ? kInf : kNaN;
}

}  // namespace

double sample_mean(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) {
        return kNaN;
    }
    const double m = sample_mean(values);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double omega(const TerminalSample& sample, double threshold) {
    require_nonempty(sample);
    double gains = 0.0;
    double losses = 0.0;
    for (double v : sample.values) {
        if (v > threshold) {
            gains += v - threshold;
        } else {
            losses += threshold - v;
        }
    }
    return ratio_or_sentinel(gains, losses);
}

double kappa(const TerminalSample& sample, int order, double threshold) {
    require_nonempty(sample);
    if (order < 1) {
        throw InputError("kappa order must be >= 1");
    }
    const double m = static_cast<double>(sample.values.size());
    double lpm = 0.0;
    for (double v : sample.values) {
        if (v < threshold) {
            lpm += std::pow(threshold - v, order);
        }
    }
    lpm /= m;
    const double excess = sample_mean(sample.values) - threshold;
    if (lpm > 0.0) {
        return excess / std::pow(lpm, 1.0 / order);
    }
    return excess > 0.0 ? kInf : kNaN;
}

double sharpe(const TerminalSample& sample) {
    if (sample.values.size() < 2) {
        return kNaN;
    }
    std::vector<double> returns;
    returns.reserve(sample.values.size());
    for (double v : sample.values) {
        returns.push_back(v / sample.v0 - 1.0);
    }
    const double sd = sample_std(returns);
    if (!(sd > 0.0)) {
        return kNaN;
    }
    const double riskless = std::exp(sample.r * sample.horizon) - 1.0;
    return (sample_mean(returns) - riskless) / sd;
}

ShortfallStats shortfall_stats(const TerminalSample& sample) {
    require_nonempty(sample);
    std::size_t count = 0;
    double total = 0.0;
    for (double v : sample.values) {
        if (v < sample.floor) {
            ++count;
            total += sample.floor - v;
        }
    }
    ShortfallStats out;
    out.probability = static_cast<double>(count) / static_cast<double>(sample.values.size());
    out.expected_shortfall = count > 0 ? total / static_cast<double>(count) : kNaN;
    return out;
}

MetricsReport compute_metrics(const TerminalSample& sample,
                              std::span<const double> threshold_fractions,
                              std::span<const int> kappa_orders) {
    require_nonempty(sample);
    MetricsReport report;
    report.mean = sample_mean(sample.values);
    report.std = sample_std(sample.values);
    report.sharpe = sharpe(sample);
    for (double x : threshold_fractions) {
        const double level = sample.v0 * (1.0 + x);
        report.omega.emplace_back(level, omega(sample, level));
    }
    for (int order : kappa_orders) {
        for (double x : threshold_fractions) {
            const double level = sample.v0 * (1.0 + x);
            report.kappa.push_back({order, level, kappa(sample, order, level)});
        }
    }
    report.shortfall = shortfall_stats(sample);
    return report;
}

}  // namespace pins
