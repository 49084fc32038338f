#include "pins/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pins/errors.hpp"

namespace pins {

namespace fs = std::filesystem;

std::string format_number(double value, int digits) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

std::string cell_name(const std::string& strategy, Rebalance freq, double confidence_level) {
    std::string lower;
    for (char c : strategy) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return lower + "_" + to_string(freq) + "_cl" + format_number(confidence_level * 100.0, 6);
}

namespace {

VbpiSpec vbpi_spec(const ExperimentConfig& cfg, double cl) {
    VbpiSpec spec;
    spec.confidence_level = cl;
    spec.floor = FloorSchedule{cfg.pi, cfg.v0};
    spec.base = cfg.vbpi_base;
    return spec;
}

RebalanceGrid grid_for(const MarketConfig& market, Rebalance freq) {
    return RebalanceGrid{static_cast<std::size_t>(market.steps_per_year / steps_per_year(freq))};
}

std::string vbpi_label(double cl) { return "VBPI@" + format_number(cl, 6); }
std::string cppi_label(double cl) { return "CPPI@" + format_number(cl, 6); }

}  // namespace

std::vector<MatrixCell> expand_matrix(const ExperimentConfig& cfg, DistributionCache& cache) {
    std::vector<MatrixCell> cells;
    for (Rebalance freq : cfg.rebalance) {
        const MarketConfig market = cfg.market(freq);
        const RebalanceGrid grid = grid_for(market, freq);
        for (double cl : cfg.confidence_levels) {
            // m is matched on the inception weight even in rolling mode so
            // both modes share the same CPPI benchmark.
            VbpiSpec spec = vbpi_spec(cfg, cl);
            spec.base = VbpiBase::inception;
            const double t_first = vbpi_horizons(spec, market, grid).front();
            MatrixCell cell;
            cell.rebalance = freq;
            cell.confidence_level = cl;
            try {
                cell.vbpi_w0 =
                    vbpi_weight(spec, *cache.get(t_first), cfg.v0, cfg.r, t_first, cfg.horizon);
            } catch (const InfeasibleFloor& e) {
                throw InfeasibleFloor("VBPI " + to_string(freq) + " CL " + format_number(cl, 6) +
                                      ": " + e.what());
            }
            const double c0 = cfg.v0 - floor_value(spec.floor, cfg.r, cfg.horizon, 0.0);
            try {
                cell.cppi_multiple = match_multiple(cell.vbpi_w0, cfg.v0, c0);
            } catch (const NoInitialCushion& e) {
                throw NoInitialCushion("CPPI " + to_string(freq) + " CL " + format_number(cl, 6) +
                                       " (pi = " + format_number(cfg.pi, 6) + ", r = " +
                                       format_number(cfg.r, 6) + "): " + e.what());
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

SimulationPlan make_plan(const ExperimentConfig& cfg, Rebalance freq,
                         const std::vector<MatrixCell>& cells,
                         std::shared_ptr<DistributionCache> cache) {
    SimulationPlan plan{.market = cfg.market(freq), .model = cfg.model()};
    plan.n_paths = cfg.paths;
    plan.master_seed = cfg.seed;
    plan.rebalance = freq;
    plan.thresholds = cfg.thresholds;
    plan.kappa_orders = cfg.kappa_orders;
    plan.histogram_bins = cfg.histogram_bins;
    plan.workers = cfg.workers;
    plan.cache = std::move(cache);
    for (const MatrixCell& cell : cells) {
        if (cell.rebalance != freq) {
            continue;
        }
        CppiSpec cppi;
        cppi.multiple = cell.cppi_multiple;
        cppi.exposure_cap = cfg.exposure_cap;
        cppi.floor = FloorSchedule{cfg.pi, cfg.v0};
        plan.strategies.push_back({cppi_label(cell.confidence_level), cppi});
        plan.strategies.push_back(
            {vbpi_label(cell.confidence_level), vbpi_spec(cfg, cell.confidence_level)});
    }
    return plan;
}

std::string metrics_header(const ExperimentConfig& cfg) {
    std::string h = "strategy,rebalance,CL,mean,std,sharpe";
    for (std::size_t i = 1; i <= cfg.thresholds.size(); ++i) {
        h += ",omega_" + std::to_string(i);
    }
    for (int order : cfg.kappa_orders) {
        for (std::size_t i = 1; i <= cfg.thresholds.size(); ++i) {
            h += ",kappa" + std::to_string(order) + "_" + std::to_string(i);
        }
    }
    h += ",shortfall_prob,expected_shortfall";
    return h;
}

std::string metrics_row(const std::string& strategy, Rebalance freq, double confidence_level,
                        const MetricsReport& m) {
    std::string row = strategy + "," + to_string(freq) + "," + format_number(confidence_level, 6);
    auto add = [&row](double v) { row += "," + format_number(v, 6); };
    add(m.mean);
    add(m.std);
    add(m.sharpe);
    for (const auto& [level, value] : m.omega) add(value);
    for (const auto& k : m.kappa) add(k.value);
    add(m.shortfall.probability);
    add(m.shortfall.expected_shortfall);
    return row;
}

namespace {

// Tracks files created by a run so a failed run leaves nothing behind.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    std::ofstream open(const fs::path& relative) {
        const fs::path full = dir_ / relative;
        fs::create_directories(full.parent_path());
        std::ofstream out(full, std::ios::binary);
        if (!out) {
            throw ConfigError("cannot write " + full.string());
        }
        written_.push_back(full);
        return out;
    }

    void discard() noexcept {
        std::error_code ec;
        for (const auto& f : written_) {
            fs::remove(f, ec);
        }
        fs::remove(dir_ / "distributions", ec);  // only succeeds when empty
    }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

void write_outputs(Rebalance freq, const SimulationReport& report,
                   const std::vector<MatrixCell>& cells, OutputSet& out,
                   std::ostream& metrics_csv) {
    std::size_t s = 0;
    for (const MatrixCell& cell : cells) {
        if (cell.rebalance != freq) {
            continue;
        }
        for (const char* strategy : {"CPPI", "VBPI"}) {
            const StrategyResult& result = report.strategies.at(s++);
            metrics_csv << metrics_row(strategy, freq, cell.confidence_level, result.metrics)
                        << "\n";
            const std::string stem = cell_name(strategy, freq, cell.confidence_level);

            auto terminal = out.open("terminal_values_" + stem + ".csv");
            terminal << "path,terminal_value\n";
            for (std::size_t j = 0; j < result.sample.values.size(); ++j) {
                terminal << j << "," << format_number(result.sample.values[j], 17) << "\n";
            }

            auto hist = out.open("histogram_" + stem + ".csv");
            hist << "bin,lower,upper,count\n";
            for (std::size_t b = 0; b < result.histogram.counts.size(); ++b) {
                hist << b << "," << format_number(result.histogram.edges[b], 17) << ","
                     << format_number(result.histogram.edges[b + 1], 17) << ","
                     << result.histogram.counts[b] << "\n";
            }
        }
    }
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const RunOptions& options, std::ostream& log) {
    OutputSet out(cfg.out_dir);
    try {
        cfg.validate();
        auto cache = std::make_shared<DistributionCache>(cfg.model(), cfg.fft);
        const std::vector<MatrixCell> cells = expand_matrix(cfg, *cache);

        if (options.dry_run) {
            log << "rebalance,CL,vbpi_w0,cppi_multiple\n";
            for (const MatrixCell& c : cells) {
                log << to_string(c.rebalance) << "," << format_number(c.confidence_level, 6) << ","
                    << format_number(c.vbpi_w0, 6) << "," << format_number(c.cppi_multiple, 6)
                    << "\n";
            }
            log << cells.size() * 2 << " cells, " << cfg.paths << " paths each\n";
            return kExitOk;
        }

        std::ostringstream metrics_csv;
        metrics_csv << metrics_header(cfg) << "\n";
        std::ostringstream info;
        info << "paths=" << cfg.paths << "\nseed=" << cfg.seed << "\n";

        for (Rebalance freq : cfg.rebalance) {
            const SimulationPlan plan = make_plan(cfg, freq, cells, cache);
            const SimulationReport report = run(plan);
            write_outputs(freq, report, cells, out, metrics_csv);
            info << to_string(freq) << ".steps=" << report.info.n_steps << "\n"
                 << to_string(freq) << ".rebalances=" << report.info.n_rebalances << "\n";
            log << to_string(freq) << ": " << report.info.n_paths << " paths x "
                << plan.strategies.size() << " strategies in "
                << format_number(report.info.seconds, 3) << " s ("
                << format_number(report.info.paths_per_second, 4) << " paths/s, "
                << report.info.workers << " workers)\n";
        }

        if (cfg.dump_distributions) {
            for (const auto& dist : cache->entries()) {
                char name[64];
                std::snprintf(name, sizeof name, "distributions/dist_t%.8f.csv", dist->t);
                auto f = out.open(name);
                write_distribution_csv(f, *dist);
            }
        }
        out.open("run_info.txt") << info.str();
        out.open("metrics.csv") << metrics_csv.str();
        log << "wrote " << (cfg.out_dir / "metrics.csv").string() << "\n";
        return kExitOk;
    } catch (const InputError& e) {
        out.discard();
        log << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        out.discard();
        log << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        out.discard();
        log << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace pins
