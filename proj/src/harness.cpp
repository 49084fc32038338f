#include "pins/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "pins/errors.hpp"
#include "pins/rng.hpp"

namespace pins {

int steps_per_year(Rebalance freq) {
    switch (freq) {
        case Rebalance::daily:
            return 260;
        case Rebalance::weekly:
            return 52;
        case Rebalance::monthly:
            return 12;
    }
    return 260;
}

std::string to_string(Rebalance freq) {
    switch (freq) {
        case Rebalance::daily:
            return "daily";
        case Rebalance::weekly:
            return "weekly";
        case Rebalance::monthly:
            return "monthly";
    }
    return "daily";
}

Rebalance parse_rebalance(const std::string& name) {
    if (name == "daily") return Rebalance::daily;
    if (name == "weekly") return Rebalance::weekly;
    if (name == "monthly") return Rebalance::monthly;
    throw ConfigError("unknown rebalance frequency '" + name + "'");
}

void SimulationPlan::validate() const {
    market.validate();
    if (n_paths < 1) {
        throw ConfigError("n_paths must be >= 1");
    }
    if (strategies.empty()) {
        throw ConfigError("plan has no strategies");
    }
    if (histogram_bins < 1) {
        throw ConfigError("histogram_bins must be >= 1");
    }
    if (market.steps_per_year % steps_per_year(rebalance) != 0) {
        throw ConfigError("rebalance frequency must divide the market grid");
    }
    if (cache && cache->model().generator() != model.generator()) {
        throw ConfigError("distribution cache was built for a different model");
    }
    grid().nodes(market.n_steps());
}

RebalanceGrid SimulationPlan::grid() const {
    return RebalanceGrid{static_cast<std::size_t>(market.steps_per_year / steps_per_year(rebalance))};
}

Histogram histogram(const TerminalSample& sample, std::size_t n_bins) {
    if (n_bins < 1) {
        throw InputError("histogram needs at least one bin");
    }
    if (sample.values.empty()) {
        throw InputError("histogram of an empty sample");
    }
    const auto [lo_it, hi_it] = std::minmax_element(sample.values.begin(), sample.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    Histogram h;
    if (!(hi > lo)) {
        h.edges = {lo, hi};
        h.counts = {sample.values.size()};
        return h;
    }
    const double width = (hi - lo) / static_cast<double>(n_bins);
    h.edges.resize(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        h.edges[b] = lo + width * static_cast<double>(b);
    }
    h.edges[n_bins] = hi;
    h.counts.assign(n_bins, 0);
    for (double v : sample.values) {
        auto bin = static_cast<std::size_t>((v - lo) / width);
        h.counts[std::min(bin, n_bins - 1)]++;
    }
    return h;
}

AssetPath generate_path(const SimulationPlan& plan, const Eigen::MatrixXd& transition,
                        std::size_t j) {
    const std::size_t n = plan.market.n_steps();
    CounterRng regime_rng = CounterRng::for_path(plan.master_seed, j, 0);
    CounterRng normal_rng = CounterRng::for_path(plan.master_seed, j, 1);

    const int initial = draw_state(plan.model.initial_dist().transpose(), regime_rng.uniform_open());
    std::vector<double> uniforms(n);
    for (double& u : uniforms) {
        u = regime_rng.uniform_open();
    }
    std::vector<double> normals(n, 0.0);
    if (plan.noise == NoiseMode::random) {
        std::normal_distribution<double> gauss;
        for (double& z : normals) {
            z = gauss(normal_rng);
        }
    }
    return sample_asset_path(plan.market, plan.model,
                             sample_regime_path(transition, plan.market.dt(), uniforms, initial),
                             normals);
}

namespace {

struct PreparedStrategy {
    const StrategySpec* spec = nullptr;
    std::vector<double> weights;  // VBPI inception
    HorizonTable table;           // VBPI rolling
};

template <typename Error>
[[noreturn]] void rethrow_labelled(const std::string& label, const Error& e) {
    throw Error("strategy '" + label + "': " + e.what());
}

PreparedStrategy prepare(const SimulationPlan& plan, const StrategySpec& s,
                         DistributionCache& cache) {
    PreparedStrategy out;
    out.spec = &s;
    try {
        if (const auto* cppi = std::get_if<CppiSpec>(&s.spec)) {
            cppi->validate();
            return out;
        }
        const auto& vbpi = std::get<VbpiSpec>(s.spec);
        vbpi.validate();
        const RebalanceGrid grid = plan.grid();
        HorizonTable table;
        for (double t : vbpi_horizons(vbpi, plan.market, grid)) {
            if (t > 0.0 && !table.contains(t)) {
                table.add(t, cache.get(t));
            }
        }
        if (vbpi.base == VbpiBase::inception) {
            out.weights = vbpi_weight_schedule(vbpi, plan.market, grid, table);
        } else {
            out.table = std::move(table);
        }
    } catch (const InfeasibleFloor& e) {
        rethrow_labelled(s.label, e);
    } catch (const NoInitialCushion& e) {
        rethrow_labelled(s.label, e);
    } catch (const InputError& e) {
        rethrow_labelled(s.label, e);
    }
    return out;
}

double terminal_value(const SimulationPlan& plan, const PreparedStrategy& p,
                      const AssetPath& path, const RebalanceGrid& grid) {
    if (const auto* cppi = std::get_if<CppiSpec>(&p.spec->spec)) {
        return evolve_cppi(*cppi, plan.market, path, grid).terminal();
    }
    const auto& vbpi = std::get<VbpiSpec>(p.spec->spec);
    if (vbpi.base == VbpiBase::inception) {
        return evolve_vbpi_schedule(vbpi, plan.market, path, grid, p.weights).terminal();
    }
    return evolve_vbpi(vbpi, plan.market, path, grid, p.table).terminal();
}

const FloorSchedule& floor_of(const StrategySpec& s) {
    return std::visit([](const auto& spec) -> const FloorSchedule& { return spec.floor; }, s.spec);
}

}  // namespace

SimulationReport run(const SimulationPlan& plan) {
    plan.validate();
    const auto started = std::chrono::steady_clock::now();

    std::shared_ptr<DistributionCache> cache = plan.cache;
    if (!cache) {
        cache = std::make_shared<DistributionCache>(plan.model);
    }
    std::vector<PreparedStrategy> prepared;
    prepared.reserve(plan.strategies.size());
    for (const auto& s : plan.strategies) {
        prepared.push_back(prepare(plan, s, *cache));
    }

    const RebalanceGrid grid = plan.grid();
    const Eigen::MatrixXd transition = transition_matrix(plan.model, plan.market.dt());
    const std::size_t n_strategies = prepared.size();
    // Slot layout: terminal[s * n_paths + j].
    std::vector<double> terminal(n_strategies * plan.n_paths, 0.0);

    unsigned workers = plan.workers;
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, plan.n_paths));

    constexpr std::size_t kChunk = 256;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= plan.n_paths) {
                    return;
                }
                const std::size_t end = std::min(begin + kChunk, plan.n_paths);
                for (std::size_t j = begin; j < end; ++j) {
                    const AssetPath path = generate_path(plan, transition, j);
                    for (std::size_t s = 0; s < n_strategies; ++s) {
                        terminal[s * plan.n_paths + j] = terminal_value(plan, prepared[s], path, grid);
                    }
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(plan.n_paths);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    SimulationReport report;
    for (std::size_t s = 0; s < n_strategies; ++s) {
        const StrategySpec& spec = *prepared[s].spec;
        StrategyResult result;
        result.label = spec.label;
        result.sample.values.assign(terminal.begin() + static_cast<std::ptrdiff_t>(s * plan.n_paths),
                                    terminal.begin() + static_cast<std::ptrdiff_t>((s + 1) * plan.n_paths));
        result.sample.v0 = floor_of(spec).v0;
        result.sample.floor = floor_of(spec).terminal_floor();
        result.sample.r = plan.market.r;
        result.sample.horizon = plan.market.horizon;
        result.metrics = compute_metrics(result.sample, plan.thresholds, plan.kappa_orders);
        result.histogram = histogram(result.sample, plan.histogram_bins);
        result.vbpi_weights = prepared[s].weights;
        report.strategies.push_back(std::move(result));
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.info.n_paths = plan.n_paths;
    report.info.seed = plan.master_seed;
    report.info.n_steps = plan.market.n_steps();
    report.info.n_rebalances = grid.nodes(plan.market.n_steps()).size();
    report.info.workers = workers;
    report.info.seconds = seconds;
    report.info.paths_per_second = seconds > 0.0 ? static_cast<double>(plan.n_paths) / seconds : 0.0;
    return report;
}

}  // namespace pins
