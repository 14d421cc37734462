#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "advtrain/data_io.hpp"
#include "advtrain/erm_game.hpp"
#include "advtrain/format.hpp"
#include "advtrain/harness.hpp"

namespace fs = std::filesystem;
using namespace advtrain;

namespace {

struct GlobalOpts {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

ExperimentConfig load_config(const GlobalOpts& g, bool required) {
    ExperimentConfig cfg;
    if (!g.config.empty())
        cfg = load_config_file(g.config);
    else if (required)
        throw std::runtime_error("this subcommand needs --config <path>");
    if (!g.out.empty()) cfg.output_dir = g.out;
    if (g.seed) cfg.seed = *g.seed;
    return cfg;
}

int cmd_train(const GlobalOpts& g) {
    const ExperimentConfig cfg = load_config(g, true);
    const ExperimentResult res = run_experiment(cfg);
    std::printf("wrote %zu files under %s\n", res.files.size(), cfg.output_dir.c_str());
    return 0;
}

int cmd_tune(const GlobalOpts& g) {
    ExperimentConfig cfg = load_config(g, true);
    if (cfg.algorithm != Algorithm::AGd && cfg.algorithm != Algorithm::ASgd)
        throw std::runtime_error("tune applies to agd/asgd configs");
    if (!cfg.dataset) throw std::runtime_error("tune requires a dataset section");
    Dataset S = build_dataset(*cfg.dataset);
    if (cfg.normalize) S = scale_to_unit_ball(S).first;
    fs::create_directories(cfg.output_dir);
    for (double alpha : cfg.alphas) {
        const TuningResult tr = tune_step_size(cfg, S, alpha);
        std::printf("alpha=%s chosen_eta=%s\n", fmt_g17(alpha).c_str(),
                    fmt_g17(tr.chosen_eta).c_str());
        char tag[48];
        std::snprintf(tag, sizeof(tag), "%.12g", alpha);
        const std::string path =
            (fs::path(cfg.output_dir) / ("tuning_alpha=" + std::string(tag) + ".csv")).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "eta,mean_final_robust_risk\n";
        for (const auto& [e, v] : tr.grid) out << fmt_g17(e) << "," << fmt_g17(v) << "\n";
    }
    return 0;
}

int cmd_game(const GlobalOpts& g) {
    ExperimentConfig cfg = load_config(g, false);
    if (g.config.empty()) {
        // demonstration defaults: d=50, gamma=0.5, alpha=0.4, epsilon=0.1, 100 rounds
        DatasetConfig dc;
        dc.kind = DatasetConfig::Kind::TwoPoint;
        dc.gamma = 0.5;
        dc.d = 50;
        cfg.dataset = dc;
        cfg.algorithm = Algorithm::ErmGame;
        cfg.game = GameConfig{};
        cfg.iterations = 100;
    }
    if (cfg.algorithm != Algorithm::ErmGame)
        throw std::runtime_error("game requires an erm_game config");
    const ExperimentResult res = run_experiment(cfg);
    const auto& game = res.summary.at("game");
    std::printf("rounds=%s admissible=%s margin_on_s=[%s, %s]\n",
                game.at("rounds").dump().c_str(), game.at("admissible").dump().c_str(),
                game.at("margin_on_s_min").dump().c_str(),
                game.at("margin_on_s_max").dump().c_str());
    return game.at("admissible").get<bool>() && game.at("code_complete").get<bool>() ? 0 : 1;
}

int cmd_bounds(const GlobalOpts& g) {
    const ExperimentConfig cfg = load_config(g, false);
    BoundTableConfig bc;
    if (cfg.bounds)
        bc = *cfg.bounds;
    else
        bc.t_grid = {2, 10, 100, 1000, 10000};
    fs::create_directories(cfg.output_dir);
    const std::string path = (fs::path(cfg.output_dir) / "bounds.csv").string();
    emit_bound_table(bc.inputs, bc.t_grid, path);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_data(const GlobalOpts& g) {
    const ExperimentConfig cfg = load_config(g, true);
    if (!cfg.dataset) throw std::runtime_error("data requires a dataset section");
    Dataset S = build_dataset(*cfg.dataset);
    double scale = 1.0;
    if (cfg.normalize) {
        auto [scaled_set, sc] = scale_to_unit_ball(S);
        S = std::move(scaled_set);
        scale = sc;
    }
    fs::create_directories(cfg.output_dir);
    const std::string path = (fs::path(cfg.output_dir) / "dataset.csv").string();
    save_dataset_csv(S, path);
    std::printf("wrote %s (n=%zu, d=%zu, max_norm=%s, scale=%s)\n", path.c_str(), S.n(), S.dim(),
                fmt_g17(S.max_norm()).c_str(), fmt_g17(scale).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversarial training for linear classifiers on separable data"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global flags after a subcommand name too

    GlobalOpts g;
    std::uint64_t seed_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "override the config seed")->expected(1);
    app.add_option("--config", g.config, "path to a JSON experiment config");
    app.add_option("--out", g.out, "output directory (overrides the config)");

    auto* train = app.add_subcommand("train", "run the configured experiment");
    auto* tune = app.add_subcommand("tune", "step-size grid search only");
    auto* game = app.add_subcommand("game", "run the worst-case ERM adversary game");
    auto* bounds = app.add_subcommand("bounds", "emit the closed-form bound table");
    auto* data = app.add_subcommand("data", "construct and export the configured dataset");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) g.seed = seed_val;

    try {
        if (train->parsed()) return cmd_train(g);
        if (tune->parsed()) return cmd_tune(g);
        if (game->parsed()) return cmd_game(g);
        if (bounds->parsed()) return cmd_bounds(g);
        if (data->parsed()) return cmd_data(g);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
