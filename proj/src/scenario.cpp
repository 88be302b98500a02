#include "impatience/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "impatience/errors.hpp"
#include "impatience/estimation.hpp"
#include "impatience/fifo_begin.hpp"
#include "impatience/fifo_end.hpp"
#include "impatience/parallel.hpp"
#include "impatience/properties.hpp"
#include "impatience/sampling.hpp"
#include "impatience/weak_stationarity.hpp"

namespace impatience {

using nlohmann::json;

namespace {

double number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

Distribution parse_distribution(const json& j, const std::string& where) {
    if (j.is_number()) return Distribution::deterministic(j.get<double>());
    if (!j.is_object() || !j.contains("dist") || !j.at("dist").is_string()) {
        throw ConfigError(where + ": expected a number or an object with a 'dist' name");
    }
    const auto name = j.at("dist").get<std::string>();
    if (name == "deterministic") return Distribution::deterministic(number(j, "value", where));
    if (name == "uniform") return Distribution::uniform(number(j, "low", where), number(j, "high", where));
    if (name == "exponential") return Distribution::exponential(number(j, "rate", where));
    if (name == "truncated_exponential") {
        return Distribution::truncated_exponential(number(j, "rate", where), number(j, "cap", where));
    }
    if (name == "discrete") {
        if (!j.contains("values") || !j.contains("probs")) throw ConfigError(where + ": discrete needs values and probs");
        return Distribution::discrete(j.at("values").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>());
    }
    throw ConfigError(where + ": unknown distribution '" + name + "'");
}

MarkLaw parse_law(const json& j, const std::string& where) {
    for (const char* key : {"xi", "sigma", "dpat"}) {
        if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    }
    return {parse_distribution(j.at("xi"), where + ".xi"), parse_distribution(j.at("sigma"), where + ".sigma"),
            parse_distribution(j.at("dpat"), where + ".dpat")};
}

MarkTriple parse_triple(const json& j, const std::string& where) {
    return {number(j, "xi", where), number(j, "sigma", where), number(j, "dpat", where)};
}

AlphaKind parse_alpha_kind(const std::string& name) {
    if (name == "sigma_plus_d") return AlphaKind::sigma_plus_d;
    if (name == "sigma_min_d") return AlphaKind::sigma_min_d;
    if (name == "d_only") return AlphaKind::d_only;
    throw ConfigError("source.alpha_bounds: unknown alpha kind '" + name +
                      "' (expected sigma_plus_d, sigma_min_d or d_only)");
}

MarkSource parse_source(const json& j) {
    if (!j.is_object()) throw ConfigError("'source' must be an object");
    const std::string kind = j.value("kind", "iid");
    const auto seed = j.value<std::uint64_t>("seed", 1);
    const auto stream = j.value<std::uint64_t>("stream", 0);
    MarkSource src = MarkSource::constant({1.0, 0.0, 0.0});
    if (kind == "deterministic") {
        if (j.contains("pattern")) {
            std::vector<MarkTriple> cycle;
            for (const auto& t : j.at("pattern")) cycle.push_back(parse_triple(t, "source.pattern"));
            src = MarkSource::pattern(std::move(cycle));
        } else {
            src = MarkSource::constant(parse_triple(j, "source"));
        }
    } else if (kind == "iid") {
        src = MarkSource::iid(parse_law(j, "source"), seed, stream);
    } else if (kind == "markov") {
        if (!j.contains("states") || !j.contains("transition")) {
            throw ConfigError("source: markov kind needs 'states' and 'transition'");
        }
        std::vector<MarkLaw> laws;
        for (const auto& s : j.at("states")) laws.push_back(parse_law(s, "source.states[]"));
        src = MarkSource::markov_modulated(j.at("transition").get<std::vector<std::vector<double>>>(),
                                           std::move(laws), seed, stream);
    } else {
        throw ConfigError("source.kind must be deterministic, iid or markov");
    }
    if (j.contains("alpha_bounds")) {
        for (const auto& [name, value] : j.at("alpha_bounds").items()) {
            if (!value.is_number()) throw ConfigError("source.alpha_bounds." + name + " must be a number");
            src = src.with_alpha_bound(parse_alpha_kind(name), value.get<double>());
        }
    }
    return src;
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

json estimate_json(const Estimate& e) {
    return {{"point", e.point},
            {"lower", e.lower},
            {"upper", e.upper},
            {"std_error", e.std_error},
            {"n", e.n},
            {"interval", e.interval == Estimate::Interval::wilson ? "wilson" : "student_t"}};
}

std::string estimate_csv_row(const std::string& name, const Estimate& e) {
    return name + "," + format_double(e.point) + "," + format_double(e.lower) + "," + format_double(e.upper) + "," +
           format_double(e.std_error) + "," + std::to_string(e.n) + "\n";
}

json path_json(const PathStatistics& st) {
    return {{"events", st.events},
            {"empty_epoch_count", st.empty_epoch_count},
            {"inclusion_violations", st.inclusion_violations},
            {"sojourn_violations", st.sojourn_violations},
            {"idle_with_queue", st.idle_with_queue},
            {"served", st.served},
            {"abandoned_queue", st.abandoned},
            {"aborted_in_service", st.aborted},
            {"in_system_at_end", st.in_system_at_end},
            {"arrivals", st.arrivals},
            {"time_average_congestion", st.time_average_congestion},
            {"final_time", st.final_time}};
}

void require_bound(const MarkSource& src, AlphaKind kind, const std::string& experiment) {
    if (!src.alpha_bound(kind)) {
        throw CapabilityError(experiment + " in exact mode needs source.alpha_bounds." + to_string(kind) +
                              " (an almost-sure upper bound on that alpha mark); declare it or use "
                              "\"mode\": \"approximate\"");
    }
}

class Runner {
public:
    Runner(const std::string& experiment, const ScenarioConfig& cfg, const RunOptions& opts)
        : experiment_(experiment), cfg_(cfg), opts_(opts) {
        summary_ = {{"tool", "impatience"},
                    {"version", kToolVersion},
                    {"experiment", experiment},
                    {"config_hash", config_hash(cfg.raw)},
                    {"seed", cfg.source.seed()},
                    {"stream", cfg.source.stream_id()},
                    {"source_kind", cfg.source.kind_name()},
                    {"workers_independent", true}};
    }

    // Returns true when every contract of the experiment held.
    bool run() {
        if (experiment_ == "sample-w" || experiment_ == "sample-s") return samples();
        if (experiment_ == "loss-begin" || experiment_ == "loss-end") return loss();
        if (experiment_ == "regen" || experiment_ == "des") return des();
        if (experiment_ == "cesaro") return cesaro();
        if (experiment_ == "xval") return xval();
        if (experiment_ == "props") return props();
        throw ConfigError("unknown experiment '" + experiment_ + "'");
    }

    void write() const {
        std::filesystem::create_directories(opts_.out_dir);
        write_file(opts_.out_dir / "summary.json", summary_.dump(2) + "\n");
        write_file(opts_.out_dir / "detail.csv", detail_.str());
        if (!customers_.empty()) write_file(opts_.out_dir / "customers.csv", customers_);
    }

private:
    SamplingOptions sampling() const {
        return {cfg_.exec.mode, cfg_.exec.max_epochs, cfg_.exec.max_depth, cfg_.exec.warmup};
    }

    LossOptions loss_options() const {
        LossOptions lo;
        lo.sampling = sampling();
        lo.samples = cfg_.exec.samples;
        lo.replicas = cfg_.exec.replicas;
        lo.workers = opts_.workers;
        return lo;
    }

    bool samples() {
        const bool end = experiment_ == "sample-s";
        const auto& exec = cfg_.exec;
        if (exec.mode == Exactness::exact) {
            require_bound(cfg_.source, end ? AlphaKind::d_only : AlphaKind::sigma_plus_d, experiment_);
        }
        if (exec.samples == 0) throw ConfigError("execution.samples must be >= 1");
        const std::int64_t spacing = 2 * (exec.mode == Exactness::exact ? exec.max_depth : exec.warmup);
        std::vector<StationarySample> draws(exec.samples);
        std::vector<LoynesResult> loynes(end && exec.mode == Exactness::exact ? exec.samples : 0);
        const SamplingOptions so = sampling();
        parallel_for(exec.samples, opts_.workers, [&](std::size_t k) {
            const MarkSource view = replica_view(cfg_.source, k, spacing);
            draws[k] = end ? sample_stationary_s(view, so) : sample_stationary_w(view, so);
            if (!loynes.empty()) loynes[k] = loynes_stationary_s(view, exec.max_depth);
        });
        std::vector<double> values;
        std::size_t loynes_mismatch = 0;
        std::size_t loynes_converged = 0;
        detail_ << "replica,value,method,renovation_epoch,certificate_depth,residual_bound"
                << (loynes.empty() ? "" : ",loynes_value,loynes_depth,loynes_converged") << "\n";
        for (std::size_t k = 0; k < draws.size(); ++k) {
            const auto& d = draws[k];
            values.push_back(d.value);
            detail_ << k << "," << format_double(d.value) << "," << to_string(d.method) << ","
                    << (d.renovation_epoch ? std::to_string(*d.renovation_epoch) : "") << ","
                    << (d.certificate ? std::to_string(d.certificate->depth) : "") << ","
                    << (d.certificate ? format_double(d.certificate->residual_bound) : "");
            if (!loynes.empty()) {
                const auto& l = loynes[k];
                detail_ << "," << format_double(l.value) << "," << l.depth << "," << (l.converged ? 1 : 0);
                if (l.converged) {
                    ++loynes_converged;
                    if (l.value != d.value) ++loynes_mismatch;
                }
            }
            detail_ << "\n";
        }
        summary_["method"] = to_string(draws.front().method);
        summary_["samples"] = exec.samples;
        summary_["mean"] = estimate_json(student_t_estimate(values));
        std::size_t zeros = 0;
        for (double v : values) zeros += v == 0.0 ? 1 : 0;
        summary_["prob_zero"] = estimate_json(wilson_estimate(zeros, values.size()));
        if (!loynes.empty()) {
            summary_["loynes_converged"] = loynes_converged;
            summary_["loynes_renovation_mismatches"] = loynes_mismatch;
        }
        return loynes_mismatch == 0;
    }

    bool loss() {
        const bool end = experiment_ == "loss-end";
        if (cfg_.exec.mode == Exactness::exact) {
            require_bound(cfg_.source, end ? AlphaKind::d_only : AlphaKind::sigma_plus_d, experiment_);
        }
        const LossReport rep = end ? loss_metrics_end(cfg_.source, loss_options()) : loss_probability_begin(cfg_.source, loss_options());
        summary_["model"] = rep.model;
        summary_["method"] = rep.method;
        summary_["samples"] = rep.samples;
        summary_["replicas"] = rep.replicas;
        summary_["pi_hat"] = estimate_json(rep.loss);
        summary_["lower_bound"] = estimate_json(rep.lower_bound);
        summary_["upper_bound"] = estimate_json(rep.upper_bound);
        if (rep.unreached) summary_["pi_hat_unreached"] = estimate_json(*rep.unreached);
        summary_["bracketing_holds"] = rep.bracketing_holds;
        detail_ << "quantity,point,lower,upper,std_error,n\n";
        detail_ << estimate_csv_row(end ? "pi_e" : "pi_b", rep.loss);
        if (rep.unreached) detail_ << estimate_csv_row("pi_hat_e", *rep.unreached);
        detail_ << estimate_csv_row("lower_bound", rep.lower_bound);
        detail_ << estimate_csv_row("upper_bound", rep.upper_bound);
        return rep.bracketing_holds;
    }

    bool des() {
        const Scenario scn{cfg_.servers, cfg_.model, cfg_.source, cfg_.exec.horizon};
        const SimulationResult run = simulate(scn);
        summary_["model"] = to_string(cfg_.model);
        summary_["servers"] = cfg_.servers;
        summary_["path"] = path_json(run.stats);
        if (experiment_ == "regen") {
            const RegenerationReport rep =
                regeneration_stats(run, scn, cfg_.exec.samples, cfg_.exec.max_depth, opts_.workers);
            summary_["l_zero_at_arrivals"] = estimate_json(rep.l_zero_at_arrivals);
            summary_["m_zero_at_arrivals"] = estimate_json(rep.m_zero_at_arrivals);
            summary_["empty_at_arrivals"] = estimate_json(rep.empty_at_arrivals);
            summary_["prob_zero_sufficient"] = estimate_json(rep.sufficient.estimate);
            summary_["prob_zero_sufficient_exact"] = rep.sufficient.exact;
            summary_["prob_zero_necessary"] = estimate_json(rep.necessary.estimate);
            summary_["prob_zero_necessary_exact"] = rep.necessary.exact;
        }
        detail_ << "index,lrmst_before,lrmst_min_before,congestion_before\n";
        for (std::size_t i = 0; i < run.lrmst_before_arrival.size(); ++i) {
            detail_ << i << "," << format_double(run.lrmst_before_arrival[i]) << ","
                    << format_double(run.lrmst_min_before_arrival[i]) << "," << run.congestion_before_arrival[i]
                    << "\n";
        }
        std::ostringstream c;
        c << "index,arrival,sigma,dpat,service_start,departure,outcome\n";
        for (const auto& r : run.customers) {
            c << r.index << "," << format_double(r.arrival) << "," << format_double(r.sigma) << ","
              << format_double(r.dpat) << "," << (r.service_start ? format_double(*r.service_start) : "") << ","
              << format_double(r.departure) << "," << to_string(r.outcome) << "\n";
        }
        customers_ = c.str();
        const auto& st = run.stats;
        return st.inclusion_violations == 0 && st.sojourn_violations == 0 && st.idle_with_queue == 0;
    }

    bool cesaro() {
        const auto& exec = cfg_.exec;
        const EmpiricalMeasure mu = cesaro_distribution(cfg_.source, exec.n, cfg_.model);
        const double inv = invariance_distance(mu, cfg_.source, cfg_.model);
        const TightnessReport tight = tightness_report(cfg_.source, exec.n, exec.levels, cfg_.model);
        summary_["model"] = to_string(cfg_.model);
        summary_["steps"] = exec.n;
        summary_["atoms"] = mu.atoms().size();
        summary_["invariance_distance"] = inv;
        json rows = json::array();
        for (const auto& r : tight.rows) {
            rows.push_back({{"level", r.level}, {"workload", r.workload_quantile}, {"dominating", r.dominating_quantile}});
        }
        summary_["tightness"] = rows;
        summary_["tightness_ordered"] = tight.ordered;
        summary_["pathwise_violations"] = tight.pathwise_violations;
        json masses = json::array();
        for (int p = 1; p <= exec.p_max; ++p) {
            const BoundaryMass b = boundary_mass(cfg_.source, exec.n, p, cfg_.model);
            masses.push_back({{"p", p}, {"fraction", b.fraction}, {"std_error", b.std_error}});
        }
        summary_["boundary_mass"] = masses;
        detail_ << "# steps=" << mu.steps << ",source=" << mu.source_id << ",model=" << to_string(cfg_.model) << "\n";
        detail_ << "value,weight\n";
        for (const auto& a : mu.atoms()) detail_ << format_double(a.value) << "," << format_double(a.weight) << "\n";
        return tight.ordered && tight.pathwise_violations == 0;
    }

    bool xval() {
        const Scenario scn{cfg_.servers, cfg_.model, cfg_.source, cfg_.exec.horizon};
        const double d = cross_validate_recursion(scn);
        summary_["model"] = to_string(cfg_.model);
        summary_["customers"] = cfg_.exec.horizon;
        summary_["max_discrepancy"] = d;
        summary_["tolerance"] = 1e-9;
        detail_ << "quantity,value\nmax_discrepancy," << format_double(d) << "\n";
        return d <= 1e-9;
    }

    bool props() {
        const PropertySuiteResult pointwise = run_pointwise_suite(cfg_.exec.tuples, cfg_.source.seed());
        const PropertySuiteResult inclusion = run_inclusion_suite(cfg_.source, cfg_.exec.min_events);
        json suites = json::array();
        detail_ << "property,checked,violations\n";
        for (const auto* suite : {&pointwise, &inclusion}) {
            for (const auto& c : suite->counts) {
                suites.push_back({{"name", c.name}, {"checked", c.checked}, {"violations", c.violations}});
                detail_ << '"' << c.name << "\"," << c.checked << "," << c.violations << "\n";
            }
        }
        const std::size_t total = pointwise.total_violations() + inclusion.total_violations();
        summary_["properties"] = suites;
        summary_["total_violations"] = total;
        return total == 0;
    }

    std::string experiment_;
    const ScenarioConfig& cfg_;
    RunOptions opts_;
    json summary_;
    std::ostringstream detail_;
    std::string customers_;

public:
    json& summary() { return summary_; }
};

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string config_hash(const json& doc) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : doc.dump()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScenarioConfig parse_config(const json& input, std::optional<std::uint64_t> seed_override) {
    if (!input.is_object()) throw ConfigError("config must be a JSON object");
    json doc = input;
    if (!doc.contains("source")) throw ConfigError("config needs a 'source' object");
    if (seed_override) doc["source"]["seed"] = *seed_override;

    ScenarioConfig cfg;
    cfg.raw = doc;
    if (doc.contains("experiment")) cfg.experiment = doc.at("experiment").get<std::string>();
    try {
        cfg.source = parse_source(doc.at("source"));
        if (doc.contains("model")) {
            const auto& m = doc.at("model");
            const int servers = m.value("servers", 1);
            if (servers < 1) throw ConfigError("model.servers must be >= 1");
            cfg.servers = static_cast<unsigned>(servers);
            const std::string imp = m.value("impatience", "begin");
            if (imp == "begin") {
                cfg.model = ImpatienceModel::begin;
            } else if (imp == "end") {
                cfg.model = ImpatienceModel::end;
            } else {
                throw ConfigError("model.impatience must be 'begin' or 'end'");
            }
        }
        if (doc.contains("execution")) {
            const auto& e = doc.at("execution");
            auto& x = cfg.exec;
            const std::string mode = e.value("mode", "exact");
            if (mode == "exact") {
                x.mode = Exactness::exact;
            } else if (mode == "approximate") {
                x.mode = Exactness::approximate;
            } else {
                throw ConfigError("execution.mode must be 'exact' or 'approximate'");
            }
            read_opt(e, "samples", x.samples);
            read_opt(e, "replicas", x.replicas);
            read_opt(e, "max_epochs", x.max_epochs);
            read_opt(e, "max_depth", x.max_depth);
            read_opt(e, "warmup", x.warmup);
            read_opt(e, "horizon", x.horizon);
            read_opt(e, "n", x.n);
            read_opt(e, "levels", x.levels);
            read_opt(e, "p_max", x.p_max);
            read_opt(e, "tuples", x.tuples);
            read_opt(e, "min_events", x.min_events);
            if (x.max_epochs < 1 || x.max_depth < 1 || x.warmup < 0 || x.horizon < 1 || x.n < 1 || x.p_max < 1) {
                throw ConfigError("execution parameters must be positive (warmup nonnegative)");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        f >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_config(doc, seed_override);
}

int run_scenario(const std::string& experiment, const ScenarioConfig& config, const RunOptions& opts,
                 std::ostream& log) {
    try {
        if (config.experiment && *config.experiment != experiment) {
            throw ConfigError("config names experiment '" + *config.experiment + "' but '" + experiment +
                              "' was requested");
        }
        Runner runner(experiment, config, opts);
        bool ok = true;
        int code = kExitOk;
        try {
            ok = runner.run();
        } catch (const ContractViolation& e) {
            runner.summary()["contract_violation"] = e.what();
            ok = false;
        }
        runner.summary()["contracts_hold"] = ok;
        runner.write();
        if (!ok) {
            log << experiment << ": contract violation (see summary.json)\n";
            code = kExitContract;
        }
        return code;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ArgumentError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CapabilityError& e) {
        log << "capability error: " << e.what() << "\n";
        return kExitCapability;
    } catch (const DepthExhausted& e) {
        log << "capability error: " << e.what() << "\n";
        return kExitCapability;
    } catch (const RenovationNotFound& e) {
        log << "capability error: " << e.what() << "\n";
        return kExitCapability;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace impatience
