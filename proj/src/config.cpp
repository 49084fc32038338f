#include "pins/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include "pins/errors.hpp"

namespace pins {

namespace {

std::string where(const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    if (mark.line < 0) {
        return "";
    }
    return " (line " + std::to_string(mark.line + 1) + ")";
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) {
        throw ConfigError(field + ": expected a scalar" + where(node));
    }
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(field + ": cannot parse '" + node.Scalar() + "'" + where(node));
    }
}

template <typename T>
std::vector<T> list(const YAML::Node& node, const std::string& field) {
    if (!node.IsSequence()) {
        throw ConfigError(field + ": expected a list" + where(node));
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(scalar<T>(node[i], field + "[" + std::to_string(i) + "]"));
    }
    if (out.empty()) {
        throw ConfigError(field + ": list must not be empty" + where(node));
    }
    return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Reads the known keys of a block and records a warning for anything else.
class Block {
public:
    Block(const YAML::Node& root, std::string name, std::vector<std::string>& warnings)
        : name_(std::move(name)), warnings_(warnings), node_(root[name_]) {
        if (node_ && !node_.IsMap()) {
            throw ConfigError(name_ + ": expected a mapping" + where(node_));
        }
    }

    ~Block() {
        if (!node_ || std::uncaught_exceptions() > 0) {
            return;
        }
        try {
            for (const auto& kv : node_) {
                const auto key = kv.first.as<std::string>();
                if (!seen_.contains(key)) {
                    warnings_.push_back("unknown key " + name_ + "." + key + where(kv.first));
                }
            }
        } catch (const YAML::Exception&) {
            warnings_.push_back("non-scalar key in block " + name_);
        }
    }

    YAML::Node get(const std::string& key) {
        seen_.insert(key);
        const YAML::Node& view = node_;
        return view ? view[key] : YAML::Node(YAML::NodeType::Undefined);
    }

    std::string field(const std::string& key) const { return name_ + "." + key; }
    bool present() const { return static_cast<bool>(node_); }

    template <typename T>
    void read(const std::string& key, T& target) {
        if (auto n = get(key)) {
            target = scalar<T>(n, field(key));
        }
    }

private:
    std::string name_;
    std::vector<std::string>& warnings_;
    YAML::Node node_;
    std::set<std::string> seen_;
};

void parse_into(const YAML::Node& root, ExperimentConfig& cfg) {
    if (!root.IsMap()) {
        throw ConfigError("config root must be a mapping");
    }
    static const std::set<std::string> known{"market", "model", "strategy", "sim", "output", "fft"};
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!known.contains(key)) {
            cfg.warnings.push_back("unknown block " + key + where(kv.first));
        }
    }

    {
        Block market(root, "market", cfg.warnings);
        market.read("r", cfg.r);
        market.read("s0", cfg.s0);
        market.read("b0", cfg.b0);
        market.read("horizon", cfg.horizon);
    }
    {
        Block model(root, "model", cfg.warnings);
        if (!model.present()) {
            throw ConfigError("model: missing block");
        }
        const YAML::Node regimes = model.get("regimes");
        if (!regimes) {
            throw ConfigError("model.regimes: missing field");
        }
        if (!regimes.IsSequence() || regimes.size() == 0) {
            throw ConfigError("model.regimes: expected a non-empty list" + where(regimes));
        }
        std::vector<double> mu, sigma;
        for (std::size_t i = 0; i < regimes.size(); ++i) {
            const std::string f = "model.regimes[" + std::to_string(i) + "]";
            const YAML::Node reg = regimes[i];
            if (!reg.IsMap() || !reg["mu"] || !reg["sigma"]) {
                throw ConfigError(f + ": expected {mu, sigma}" + where(reg));
            }
            mu.push_back(scalar<double>(reg["mu"], f + ".mu"));
            sigma.push_back(scalar<double>(reg["sigma"], f + ".sigma"));
        }
        cfg.mu = to_vector(mu);
        cfg.sigma = to_vector(sigma);

        const YAML::Node gen = model.get("generator");
        if (!gen) {
            throw ConfigError("model.generator: missing field");
        }
        if (!gen.IsSequence()) {
            throw ConfigError("model.generator: expected a list of rows" + where(gen));
        }
        const auto h = static_cast<Eigen::Index>(gen.size());
        cfg.generator.resize(h, h);
        for (Eigen::Index i = 0; i < h; ++i) {
            const std::string f = "model.generator[" + std::to_string(i) + "]";
            const auto row = list<double>(gen[static_cast<std::size_t>(i)], f);
            if (static_cast<Eigen::Index>(row.size()) != h) {
                throw ConfigError(f + ": row " + std::to_string(i) + " must have " +
                                  std::to_string(h) + " entries" + where(gen[i]));
            }
            cfg.generator.row(i) = to_vector(row).transpose();
        }
        if (auto init = model.get("initial_dist")) {
            cfg.initial_dist = to_vector(list<double>(init, "model.initial_dist"));
        }
    }
    {
        Block strategy(root, "strategy", cfg.warnings);
        strategy.read("v0", cfg.v0);
        strategy.read("pi", cfg.pi);
        strategy.read("p", cfg.exposure_cap);
        if (auto n = strategy.get("cl")) cfg.confidence_levels = list<double>(n, "strategy.cl");
        if (auto n = strategy.get("vbpi_base")) {
            const auto base = scalar<std::string>(n, "strategy.vbpi_base");
            if (base == "inception") {
                cfg.vbpi_base = VbpiBase::inception;
            } else if (base == "rolling") {
                cfg.vbpi_base = VbpiBase::rolling;
            } else {
                throw ConfigError("strategy.vbpi_base: expected inception or rolling" + where(n));
            }
        }
        if (auto n = strategy.get("kappa_orders")) {
            cfg.kappa_orders = list<int>(n, "strategy.kappa_orders");
        }
        if (auto n = strategy.get("thresholds")) {
            cfg.thresholds = list<double>(n, "strategy.thresholds");
        }
    }
    {
        Block sim(root, "sim", cfg.warnings);
        sim.read("paths", cfg.paths);
        sim.read("seed", cfg.seed);
        sim.read("workers", cfg.workers);
        if (auto n = sim.get("rebalance")) {
            cfg.rebalance.clear();
            for (const auto& name : list<std::string>(n, "sim.rebalance")) {
                try {
                    cfg.rebalance.push_back(parse_rebalance(name));
                } catch (const ConfigError& e) {
                    throw ConfigError(std::string("sim.rebalance: ") + e.what() + where(n));
                }
            }
        }
        if (auto n = sim.get("monitoring")) {
            const auto mode = scalar<std::string>(n, "sim.monitoring");
            if (mode == "daily") {
                cfg.daily_monitoring = true;
            } else if (mode == "rebalance") {
                cfg.daily_monitoring = false;
            } else {
                throw ConfigError("sim.monitoring: expected rebalance or daily" + where(n));
            }
        }
    }
    {
        Block output(root, "output", cfg.warnings);
        if (auto n = output.get("directory")) {
            cfg.out_dir = scalar<std::string>(n, "output.directory");
        }
        output.read("histogram_bins", cfg.histogram_bins);
        output.read("dump_distributions", cfg.dump_distributions);
    }
    {
        Block fft(root, "fft", cfg.warnings);
        fft.read("n_fft", cfg.fft.n_fft);
        fft.read("width_sigmas", cfg.fft.width_sigmas);
    }
}

}  // namespace

RegimeModel ExperimentConfig::model() const {
    if (initial_dist) {
        return RegimeModel(generator, mu, sigma, *initial_dist);
    }
    return RegimeModel(generator, mu, sigma);
}

MarketConfig ExperimentConfig::market(Rebalance freq) const {
    MarketConfig m;
    m.r = r;
    m.s0 = s0;
    m.b0 = b0;
    m.horizon = horizon;
    m.steps_per_year = daily_monitoring ? steps_per_year(Rebalance::daily) : steps_per_year(freq);
    return m;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError(field + ": " + why);
    };
    if (!std::isfinite(r)) fail("market.r", "must be finite");
    if (!(s0 > 0.0)) fail("market.s0", "must be positive");
    if (!(b0 > 0.0)) fail("market.b0", "must be positive");
    if (!(horizon > 0.0)) fail("market.horizon", "must be positive");

    const Eigen::Index h = generator.rows();
    if (h == 0) fail("model.generator", "missing");
    if (mu.size() != h) {
        fail("model.regimes", "expected one regime per generator row (" + std::to_string(h) + ")");
    }
    for (Eigen::Index i = 0; i < h; ++i) {
        if (std::abs(generator.row(i).sum()) > 1e-12) {
            fail("model.generator", "row " + std::to_string(i) + " does not sum to zero");
        }
        for (Eigen::Index j = 0; j < h; ++j) {
            if (i != j && generator(i, j) < 0.0) {
                fail("model.generator", "row " + std::to_string(i) + " has a negative rate");
            }
        }
        if (!(sigma(i) > 0.0)) {
            fail("model.regimes[" + std::to_string(i) + "].sigma", "must be positive");
        }
    }
    if (initial_dist) {
        if (initial_dist->size() != h) fail("model.initial_dist", "needs one entry per regime");
        if ((initial_dist->array() < 0.0).any() || std::abs(initial_dist->sum() - 1.0) > 1e-12) {
            fail("model.initial_dist", "must be a probability vector");
        }
    }

    if (!(v0 > 0.0)) fail("strategy.v0", "must be positive");
    if (!(pi >= 0.0 && pi <= 1.0)) fail("strategy.pi", "must lie in [0, 1]");
    if (!(exposure_cap > 0.0)) fail("strategy.p", "must be positive");
    for (double cl : confidence_levels) {
        if (!(cl > 0.5 && cl < 1.0)) fail("strategy.cl", "each level must lie in (0.5, 1)");
    }
    for (int n : kappa_orders) {
        if (n < 1) fail("strategy.kappa_orders", "orders must be >= 1");
    }
    if (thresholds.empty()) fail("strategy.thresholds", "must not be empty");
    if (confidence_levels.empty()) fail("strategy.cl", "must not be empty");
    if (kappa_orders.empty()) fail("strategy.kappa_orders", "must not be empty");

    if (paths < 1) fail("sim.paths", "must be >= 1");
    if (rebalance.empty()) fail("sim.rebalance", "must not be empty");
    for (Rebalance freq : rebalance) {
        if (market(freq).steps_per_year % steps_per_year(freq) != 0) {
            fail("sim.monitoring", "daily monitoring cannot be combined with " + to_string(freq) +
                                       " rebalancing (260 is not a multiple of " +
                                       std::to_string(steps_per_year(freq)) + ")");
        }
        const double steps = horizon * market(freq).steps_per_year;
        if (std::abs(steps - std::round(steps)) > 1e-9) {
            fail("market.horizon", "must span a whole number of " + to_string(freq) + " steps");
        }
    }
    if (histogram_bins < 1) fail("output.histogram_bins", "must be >= 1");
    if (fft.n_fft < 1024 || (fft.n_fft & (fft.n_fft - 1)) != 0) {
        fail("fft.n_fft", "must be a power of two >= 1024");
    }
    if (!(fft.width_sigmas > 0.0)) fail("fft.width_sigmas", "must be positive");

    try {
        (void)model();
    } catch (const InputError& e) {
        fail("model", e.what());
    }
}

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                          std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    ExperimentConfig cfg;
    try {
        parse_into(root, cfg);
    } catch (const YAML::Exception& e) {
        const std::string at =
            e.mark.line >= 0 ? " at line " + std::to_string(e.mark.line + 1) : std::string();
        throw ConfigError("malformed config" + at + ": " + e.msg);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace pins
