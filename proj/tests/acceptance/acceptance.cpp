// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every failing criterion is listed in --known-failures
// (criteria whose targets this model cannot reach; their lines still print
// FAIL with the measured numbers).

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pins/config.hpp"
#include "pins/errors.hpp"
#include "pins/experiment.hpp"
#include "pins/harness.hpp"
#include "pins/metrics.hpp"
#include "pins/retdist.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kSource = PINS_SOURCE_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

pins::ExperimentConfig shipped_config() { return pins::load_config(kSource / "paper.config"); }

Eigen::MatrixXd symmetric_generator() {
    Eigen::MatrixXd q(2, 2);
    q << -0.25, 0.25, 0.25, -0.25;
    return q;
}

double normal_quantile_oracle(double alpha) {
    // scipy.stats.norm.ppf
    if (alpha == 0.01) return -2.3263478740408408;
    if (alpha == 0.05) return -1.6448536269514729;
    return -1.2815515655446004;
}

// ---------------------------------------------------------------------------

Outcome ac1_char_fn_normalization() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = shipped_config().model();
    double worst = 0.0;
    for (double t : {1.0 / 260.0, 0.25, 1.0}) {
        worst = std::max(worst, std::abs(pins::char_fn(pins::CharFnModel(model, t), 0.0) - 1.0));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 1.0,
            fmt("max |phi_t(0) - 1| = %.3g (tol 1e-12), %.3f s (limit 1 s)", worst, secs)};
}

Outcome ac2_gaussian_quantiles() {
    const auto t0 = std::chrono::steady_clock::now();
    const pins::RegimeModel model(symmetric_generator(), Eigen::Vector2d(0.14, 0.14),
                                  Eigen::Vector2d(0.16, 0.16));
    double worst = 0.0;
    for (double t : {1.0 / 260.0, 0.25, 1.0}) {
        const auto dist = pins::build_distribution(pins::CharFnModel(model, t));
        for (double alpha : {0.01, 0.05, 0.10}) {
            const double expected = 0.1272 * t + 0.16 * std::sqrt(t) * normal_quantile_oracle(alpha);
            worst = std::max(worst, std::abs(pins::quantile(dist, alpha) - expected));
        }
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-4 && secs < 2.0,
            fmt("max |q_fft - q_gauss| = %.3g (tol 1e-4), %.3f s (limit 2 s)", worst, secs)};
}

Outcome ac3_fft_vs_monte_carlo() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = shipped_config().model();
    const auto dist = pins::build_distribution(pins::CharFnModel(model, 1.0));
    pins::SimulationPlan plan{.market = {}, .model = model};
    plan.master_seed = 42;
    const Eigen::MatrixXd p = pins::transition_matrix(model, plan.market.dt());
    std::vector<double> r(200000);
    for (std::size_t j = 0; j < r.size(); ++j) {
        const auto path = pins::generate_path(plan, p, j);
        r[j] = std::log(path.s.back() / path.s.front());
    }
    std::sort(r.begin(), r.end());
    const double n = static_cast<double>(r.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double f = dist.cdf_at(r[i]);
        ks = std::max({ks, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    const double secs = seconds_since(t0);
    return {ks < 0.01 && secs < 30.0,
            fmt("KS = %.4f (tol 0.01) over 200000 paths, %.2f s (limit 30 s)", ks, secs)};
}

Outcome ac4_martingale() {
    const auto t0 = std::chrono::steady_clock::now();
    const pins::RegimeModel model(symmetric_generator(), Eigen::Vector2d(0.04, 0.04),
                                  Eigen::Vector2d(0.16, 0.20));
    pins::SimulationPlan plan{.market = {}, .model = model};
    plan.n_paths = 200000;
    plan.master_seed = 42;
    plan.cache = std::make_shared<pins::DistributionCache>(model);

    pins::VbpiSpec vbpi;
    vbpi.confidence_level = 0.95;
    const double t1 = plan.market.dt();
    const double w0 = pins::vbpi_weight(vbpi, *plan.cache->get(t1), 100.0, 0.04, t1, 1.0);
    const double c0 = 100.0 - pins::floor_value(vbpi.floor, 0.04, 1.0, 0.0);
    const pins::CppiSpec cppi{.multiple = pins::match_multiple(w0, 100.0, c0)};
    plan.strategies = {{"CPPI", cppi}, {"VBPI", vbpi}};
    const auto report = pins::run(plan);

    bool ok = true;
    std::string detail;
    for (const auto& s : report.strategies) {
        std::vector<double> disc(s.sample.values.size());
        for (std::size_t j = 0; j < disc.size(); ++j) disc[j] = s.sample.values[j] * std::exp(-0.04);
        const double mean = pins::sample_mean(disc);
        const double se = pins::sample_std(disc) / std::sqrt(static_cast<double>(disc.size()));
        const double z = (mean - 100.0) / se;
        ok = ok && std::abs(z) < 3.0;
        detail += fmt("%s disc. mean %.4f (%.2f SE); ", s.label.c_str(), mean, z);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 60.0;
    return {ok, detail + fmt("m = %.3f, %.2f s (limit 60 s)", cppi.multiple, secs)};
}

Outcome ac5_lock_in() {
    auto cfg = shipped_config();
    pins::DistributionCache cache(cfg.model(), cfg.fft);
    const auto cells = pins::expand_matrix(cfg, cache);
    const pins::CppiSpec cppi{.multiple = cells.front().cppi_multiple};  // daily cell
    pins::SimulationPlan plan{.market = cfg.market(pins::Rebalance::daily), .model = cfg.model()};
    plan.master_seed = cfg.seed;
    const Eigen::MatrixXd p = pins::transition_matrix(plan.model, plan.market.dt());

    std::size_t locked_paths = 0;
    double worst = 0.0;
    for (std::size_t j = 0; j < 10000; ++j) {
        const auto path = pins::generate_path(plan, p, j);
        const auto out = pins::evolve_cppi(cppi, plan.market, path, {1});
        const auto first = std::find(out.locked.begin(), out.locked.end(), true);
        if (first == out.locked.end()) continue;
        ++locked_paths;
        for (auto k = static_cast<std::size_t>(first - out.locked.begin()); k + 1 < out.value.size(); ++k) {
            const double expected = out.value[k] * (path.b[k + 1] / path.b[k]);
            worst = std::max(worst, std::abs(out.value[k + 1] - expected) / expected);
        }
    }
    return {locked_paths > 0 && worst < 1e-12,
            fmt("%zu of 10000 paths locked, max relative deviation %.3g (tol 1e-12)", locked_paths,
                worst)};
}

// Results of the full rebalance x CL matrix for one seed, keyed by
// (rebalance, CL index, strategy "CPPI"/"VBPI").
struct MatrixRun {
    std::map<std::tuple<pins::Rebalance, std::size_t, std::string>, pins::StrategyResult> cells;
    std::uint64_t seed = 0;
    double seconds = 0.0;
};

MatrixRun run_matrix(std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = shipped_config();
    cfg.seed = seed;
    auto cache = std::make_shared<pins::DistributionCache>(cfg.model(), cfg.fft);
    const auto cells = pins::expand_matrix(cfg, *cache);
    MatrixRun out;
    out.seed = seed;
    for (pins::Rebalance freq : cfg.rebalance) {
        const auto report = pins::run(pins::make_plan(cfg, freq, cells, cache));
        std::size_t s = 0;
        for (std::size_t c = 0; c < cfg.confidence_levels.size(); ++c) {
            out.cells[{freq, c, "CPPI"}] = report.strategies.at(s++);
            out.cells[{freq, c, "VBPI"}] = report.strategies.at(s++);
        }
    }
    out.seconds = seconds_since(t0);
    return out;
}

constexpr pins::Rebalance kFreqs[] = {pins::Rebalance::daily, pins::Rebalance::weekly,
                                      pins::Rebalance::monthly};
constexpr double kLevels[] = {0.90, 0.95, 0.99};

Outcome ac6_sharpe_trend(const std::vector<MatrixRun>& runs) {
    // reference: daily CPPI 0.36 / 0.41 / 0.45; weekly and monthly negative for both
    bool ok = true;
    std::string detail = "seed-avg Sharpe";
    double secs = 0.0;
    for (const auto& r : runs) secs += r.seconds;
    for (pins::Rebalance f : kFreqs) {
        for (const char* strat : {"CPPI", "VBPI"}) {
            detail += fmt(" | %s %s:", strat, pins::to_string(f).c_str());
            for (std::size_t c = 0; c < 3; ++c) {
                double avg = 0.0;
                for (const auto& r : runs) avg += r.cells.at({f, c, strat}).metrics.sharpe;
                avg /= static_cast<double>(runs.size());
                detail += fmt(" %.3f", avg);
                if (f == pins::Rebalance::daily) {
                    if (std::string(strat) == "CPPI") ok = ok && avg >= 0.21 && avg <= 0.60;
                } else {
                    ok = ok && avg < 0.0;
                }
            }
        }
    }
    ok = ok && secs < 300.0;
    return {ok, detail + fmt(" | daily CPPI band [0.21, 0.60], weekly/monthly < 0; %zu x 18 cells in %.1f s (limit 300 s)",
                             runs.size(), secs)};
}

Outcome ac7_cl_trends(const MatrixRun& run) {
    std::vector<std::string> violations;
    for (pins::Rebalance f : kFreqs) {
        for (const char* strat : {"CPPI", "VBPI"}) {
            for (std::size_t c = 1; c < 3; ++c) {
                const double prev = run.cells.at({f, c - 1, strat}).metrics.mean;
                const double cur = run.cells.at({f, c, strat}).metrics.mean;
                if (cur > prev) {
                    violations.push_back(fmt("(a) %s %s mean %.4f -> %.4f at CL %.2f", strat,
                                             pins::to_string(f).c_str(), prev, cur, kLevels[c]));
                }
            }
        }
        for (std::size_t c = 1; c < 3; ++c) {
            const double prev = run.cells.at({f, c - 1, "VBPI"}).metrics.shortfall.probability;
            const double cur = run.cells.at({f, c, "VBPI"}).metrics.shortfall.probability;
            if (cur > prev) {
                violations.push_back(fmt("(b) VBPI %s shortfall %.4f -> %.4f at CL %.2f",
                                         pins::to_string(f).c_str(), prev, cur, kLevels[c]));
            }
        }
    }
    std::string spread_detail = "CPPI std spread across frequencies:";
    for (std::size_t c = 0; c < 3; ++c) {
        double lo = 1e300, hi = 0.0;
        for (pins::Rebalance f : kFreqs) {
            const double sd = run.cells.at({f, c, "CPPI"}).metrics.std;
            lo = std::min(lo, sd);
            hi = std::max(hi, sd);
        }
        // relative to the smallest of the three
        const double spread = (hi - lo) / lo;
        spread_detail += fmt(" CL%.0f %.1f%%", kLevels[c] * 100.0, spread * 100.0);
        if (!(spread < 0.20)) {
            violations.push_back(fmt("(c) CPPI std %.3f..%.3f (%.1f%%) at CL %.2f", lo, hi,
                                     spread * 100.0, kLevels[c]));
        }
    }
    std::string detail = spread_detail + " (tol 20%)";
    for (const auto& v : violations) detail += " | " + v;
    return {violations.empty(), detail};
}

Outcome ac8_omega_crossing(const std::vector<MatrixRun>& runs) {
    std::size_t good = 0;
    std::string detail = "thresholds x = 0%..10% step 0.5%, L = 100(1+x);";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& cppi = runs[i].cells.at({pins::Rebalance::daily, 2, "CPPI"}).sample;
        const auto& vbpi = runs[i].cells.at({pins::Rebalance::daily, 2, "VBPI"}).sample;
        int first_cppi = -1;
        int later_vbpi = -1;
        for (int k = 0; k <= 20; ++k) {
            const double level = 100.0 * (1.0 + 0.005 * k);
            const double oc = pins::omega(cppi, level);
            const double ov = pins::omega(vbpi, level);
            if (first_cppi < 0 && oc > ov) {
                first_cppi = k;
            } else if (first_cppi >= 0 && later_vbpi < 0 && ov >= oc) {
                later_vbpi = k;
            }
        }
        const bool crossed = first_cppi >= 0 && later_vbpi >= 0;
        good += crossed;
        const auto seed = static_cast<unsigned long long>(runs[i].seed);
        detail += crossed ? fmt(" seed %llu: CPPI ahead at %.1f%%, VBPI at %.1f%%;", seed,
                                0.5 * first_cppi, 0.5 * later_vbpi)
                          : fmt(" seed %llu: no crossing;", seed);
    }
    return {good >= 4, detail + fmt(" %zu/%zu seeds (need 4)", good, runs.size())};
}

Outcome ac9_metric_identities(const MatrixRun& run) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_kappa = 0.0;
    double worst_mean = 0.0;
    bool conserved = true;
    std::size_t finite_cases = 0;
    for (const auto& [key, result] : run.cells) {
        const auto& s = result.sample;
        for (int k = -20; k <= 40; ++k) {
            const double level = 100.0 * (1.0 + 0.005 * k);
            const double om = pins::omega(s, level);
            const double k1 = pins::kappa(s, 1, level);
            if (std::isfinite(om) && std::isfinite(k1)) {
                ++finite_cases;
                worst_kappa = std::max(worst_kappa, std::abs(k1 - (om - 1.0)) / std::max(1.0, std::abs(om)));
            }
        }
        worst_mean = std::max(worst_mean, std::abs(pins::omega(s, pins::sample_mean(s.values)) - 1.0));
        const auto h = pins::histogram(s, 50);
        std::size_t total = 0;
        for (auto c : h.counts) total += c;
        conserved = conserved && total == s.values.size();
    }
    const double secs = seconds_since(t0);
    return {worst_kappa <= 1e-12 && worst_mean < 1e-9 && conserved && secs < 1.0,
            fmt("|kappa_1 - (Omega - 1)| <= %.3g over %zu finite cases (tol 1e-12 rel), "
                "|Omega(mean) - 1| = %.3g (tol 1e-9), histograms %s, %.3f s (limit 1 s)",
                worst_kappa, finite_cases, worst_mean, conserved ? "conserve M" : "LOSE PATHS",
                secs)};
}

Outcome ac10_determinism() {
    const fs::path base = fs::temp_directory_path() / "pins_acceptance_determinism";
    fs::remove_all(base);
    std::string bytes[2];
    const unsigned workers[2] = {1, 8};
    for (int i = 0; i < 2; ++i) {
        auto cfg = shipped_config();
        cfg.workers = workers[i];
        cfg.out_dir = base / std::to_string(workers[i]);
        std::ostringstream log;
        if (pins::run_experiment(cfg, {}, log) != pins::kExitOk) {
            return {false, "run failed: " + log.str()};
        }
        std::ifstream in(cfg.out_dir / "metrics.csv", std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        bytes[i] = s.str();
    }
    fs::remove_all(base);
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
    return {same, fmt("metrics.csv (%zu bytes, 10000 paths, 18 cells) %s between 1 and 8 workers",
                      bytes[0].size(), same ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> known;
    app.add_option("--known-failures", known, "criteria expected to fail")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    const std::set<int> known_set(known.begin(), known.end());

    std::vector<MatrixRun> runs;
    auto matrix = [&]() -> const std::vector<MatrixRun>& {
        if (runs.empty()) {
            for (std::uint64_t seed = 42; seed < 47; ++seed) runs.push_back(run_matrix(seed));
        }
        return runs;
    };

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"characteristic-function normalization", ac1_char_fn_normalization},
        {"Gaussian-oracle quantiles", ac2_gaussian_quantiles},
        {"FFT vs Monte Carlo", ac3_fft_vs_monte_carlo},
        {"discounted martingale", ac4_martingale},
        {"CPPI lock-in", ac5_lock_in},
        {"Sharpe sign and band", [&] { return ac6_sharpe_trend(matrix()); }},
        {"mean / shortfall / std trends", [&] { return ac7_cl_trends(matrix().front()); }},
        {"Omega crossing", [&] { return ac8_omega_crossing(matrix()); }},
        {"metric identities", [&] { return ac9_metric_identities(matrix().front()); }},
        {"determinism", ac10_determinism},
    };

    std::vector<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) failed.push_back(id);
        const bool expected = !o.pass && known_set.contains(id);
        std::cout << (o.pass ? "PASS" : "FAIL") << "  AC" << id << "  " << criteria[i].first
                  << (expected ? " [known]" : "") << ": " << o.detail << std::endl;
    }

    const auto unexpected = std::count_if(failed.begin(), failed.end(),
                                          [&](int id) { return !known_set.contains(id); });
    std::cout << "\n" << criteria.size() - failed.size() << "/" << criteria.size() << " criteria passed";
    if (!failed.empty()) {
        std::cout << "; failing:";
        for (int id : failed) std::cout << " AC" << id;
        std::cout << " (" << unexpected << " unexpected)";
    }
    std::cout << "\n";
    return unexpected == 0 ? 0 : 1;
}
