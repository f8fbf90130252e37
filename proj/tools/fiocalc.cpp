// Batch front end: experiment configs in, index/symbol tables and
// verification verdicts out.
#include "fiocalc/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fiocalc::ValidationError("cannot read config file " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

int dispatch(const std::string& task, const std::string& config_path, const std::string& out_dir,
             double tol, long seed, const std::vector<std::string>& only) {
    nlohmann::json cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (cfg.is_null()) cfg = nlohmann::json::object();
    if (cfg.contains("task") && cfg.at("task").get<std::string>() != task)
        throw fiocalc::ValidationError("config task '" + cfg.at("task").get<std::string>() +
                                       "' does not match subcommand '" + task + "'");
    cfg["task"] = task;
    if (tol > 0) cfg["tol"] = tol;
    if (seed >= 0) cfg["seed"] = static_cast<std::uint64_t>(seed);
    if (!only.empty()) cfg["only"] = only;
    std::string dir = out_dir;
    if (cfg.contains("out")) {
        if (dir.empty()) dir = cfg.at("out").get<std::string>();
        cfg.erase("out");
    }

    const fiocalc::ExperimentOutcome outcome = fiocalc::run_experiment(cfg, dir, std::cout);
    std::cout << outcome.summary << "\n";
    for (const auto& f : outcome.files) std::cout << "wrote " << f << "\n";
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symplectic index and symbol calculus for oscillatory propagators"};
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string out;
        double tol = -1.0;
        long seed = -1;
        std::vector<std::string> only;
    };

    std::map<std::string, Common> opts;
    const std::vector<std::string> tasks = {"validate-map",    "indices",
                                            "maslov-path",     "compose-symbols",
                                            "extract-symbol",  "verify-suite"};
    for (const auto& task : tasks) {
        auto* sub = app.add_subcommand(task);
        Common& c = opts[task];
        auto* cfg = sub->add_option("--config,-c", c.config, "experiment config (JSON)");
        if (task != "verify-suite") cfg->required();
        sub->add_option("--out,-o", c.out, "output directory (default: FIOCALC_OUT_DIR or .)");
        sub->add_option("--tol", c.tol, "tolerance override");
        sub->add_option("--seed", c.seed, "seed override");
        if (task == "verify-suite")
            sub->add_option("--only", c.only, "run only the named criteria (repeatable)");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string task = app.get_subcommands().front()->get_name();
    const Common& c = opts[task];
    try {
        return dispatch(task, c.config, c.out, c.tol, c.seed, c.only);
    } catch (const fiocalc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
}
