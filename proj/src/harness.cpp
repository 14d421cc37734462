#include "advtrain/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "advtrain/format.hpp"
#include "advtrain/io.hpp"
#include "advtrain/rng.hpp"
#include "advtrain/trainers.hpp"
#include "advtrain/erm_game.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace advtrain {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::runtime_error("config: unknown key '" + it.key() + "' in " + where);
}

std::string alpha_tag(double a) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", a);
    return buf;
}

DatasetConfig parse_dataset(const json& j) {
    DatasetConfig dc;
    const std::string type = j.at("type").get<std::string>();
    if (type == "synthetic") {
        check_keys(j, {"type", "n_per_circle", "seed", "include_anchors"}, "dataset");
        dc.kind = DatasetConfig::Kind::Synthetic;
        dc.synth.n_per_circle = j.value("n_per_circle", std::size_t{50});
        dc.synth.seed = j.value("seed", std::uint64_t{0});
        dc.synth.include_anchor_points = j.value("include_anchors", true);
    } else if (type == "iris") {
        check_keys(j, {"type", "path", "positive_class", "negative_class"}, "dataset");
        dc.kind = DatasetConfig::Kind::Iris;
        dc.iris.path = j.at("path").get<std::string>();
        dc.iris.positive_class = j.value("positive_class", "Iris-setosa");
        dc.iris.negative_class = j.value("negative_class", "Iris-virginica");
    } else if (type == "two_point") {
        check_keys(j, {"type", "gamma", "d"}, "dataset");
        dc.kind = DatasetConfig::Kind::TwoPoint;
        dc.gamma = j.at("gamma").get<double>();
        dc.d = j.value("d", std::size_t{2});
    } else {
        throw std::runtime_error("config: unknown dataset type '" + type + "'");
    }
    return dc;
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "agd") return Algorithm::AGd;
    if (s == "asgd") return Algorithm::ASgd;
    if (s == "aperceptron") return Algorithm::APerceptron;
    if (s == "slow_gd") return Algorithm::SlowGd;
    if (s == "erm_game") return Algorithm::ErmGame;
    throw std::runtime_error("config: unknown algorithm '" + s + "'");
}

InitMode parse_init(const std::string& s) {
    if (s == "zero") return InitMode::Zero;
    if (s == "e2") return InitMode::E2;
    if (s == "gaussian") return InitMode::Gaussian;
    throw std::runtime_error("config: unknown init '" + s + "'");
}

BoundTableConfig parse_bounds(const json& j) {
    check_keys(j, {"n", "d", "gamma", "alpha", "eta", "delta", "q", "c", "c_init", "t_grid"},
               "bounds");
    BoundTableConfig bc;
    bc.inputs.n = j.value("n", std::size_t{2});
    bc.inputs.d = j.value("d", std::size_t{2});
    bc.inputs.gamma = j.value("gamma", 1.0);
    bc.inputs.alpha = j.value("alpha", 0.5);
    bc.inputs.eta = j.value("eta", 0.2);
    bc.inputs.delta_conf = j.value("delta", 0.1);
    bc.inputs.q = j.value("q", 2.0);
    bc.inputs.c = j.value("c", 1.0);
    bc.inputs.c_init = j.value("c_init", 5.0);
    if (j.contains("t_grid")) bc.t_grid = j.at("t_grid").get<std::vector<std::size_t>>();
    return bc;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    check_keys(j,
               {"dataset", "algorithm", "alphas", "iterations", "step_size", "trials", "seed",
                "normalize", "output_dir", "init", "emit_svg", "game", "slow_gd", "bounds"},
               "top level");
    ExperimentConfig cfg;
    if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"));
    if (j.contains("algorithm")) cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("alphas")) cfg.alphas = j.at("alphas").get<std::vector<double>>();
    for (double a : cfg.alphas)
        if (!(a >= 0.0)) throw std::runtime_error("config: alphas must be nonnegative");
    cfg.iterations = j.value("iterations", std::size_t{1000});
    if (cfg.iterations < 1) throw std::runtime_error("config: iterations must be at least 1");
    if (j.contains("step_size")) {
        const auto& s = j.at("step_size");
        if (s.is_string()) {
            const std::string m = s.get<std::string>();
            if (m == "tune")
                cfg.step_mode = StepMode::Tune;
            else if (m == "theory_cap")
                cfg.step_mode = StepMode::TheoryCap;
            else
                throw std::runtime_error("config: step_size must be a number, 'tune', or 'theory_cap'");
        } else {
            cfg.step_mode = StepMode::Explicit;
            cfg.step_size = s.get<double>();
            if (!(cfg.step_size > 0.0)) throw std::runtime_error("config: step_size must be positive");
        }
    }
    cfg.trials = j.value("trials", std::size_t{1});
    if (cfg.trials < 1) throw std::runtime_error("config: trials must be at least 1");
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.normalize = j.value("normalize", false);
    cfg.output_dir = j.value("output_dir", std::string{"out"});
    if (j.contains("init")) cfg.init = parse_init(j.at("init").get<std::string>());
    cfg.emit_svg = j.value("emit_svg", true);
    if (j.contains("game")) {
        const auto& g = j.at("game");
        check_keys(g, {"alpha", "epsilon", "c"}, "game");
        GameConfig gc;
        gc.alpha = g.value("alpha", 0.4);
        gc.epsilon = g.value("epsilon", 0.1);
        gc.c = g.value("c", 1.0);
        cfg.game = gc;
    }
    if (j.contains("slow_gd")) {
        const auto& s = j.at("slow_gd");
        check_keys(s, {"c", "alpha"}, "slow_gd");
        SlowGdConfig sc;
        sc.c = s.value("c", 5.0);
        sc.alpha = s.value("alpha", 0.5);
        cfg.slow_gd = sc;
    }
    if (j.contains("bounds")) cfg.bounds = parse_bounds(j.at("bounds"));
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    return parse_config(j);
}

Dataset build_dataset(const DatasetConfig& dc) {
    switch (dc.kind) {
        case DatasetConfig::Kind::Synthetic:
            return synth_two_circles(dc.synth);
        case DatasetConfig::Kind::Iris:
            return load_iris(dc.iris);
        case DatasetConfig::Kind::TwoPoint: {
            Vector e1(dc.d, 0.0);
            e1[0] = 1.0;
            return two_point_dataset(dc.gamma, dc.d, e1);
        }
    }
    throw std::logic_error("unknown dataset kind");
}

namespace {

Model initial_model(const ExperimentConfig& cfg, std::size_t d) {
    switch (cfg.init) {
        case InitMode::Zero:
            return Model{Vector(d, 0.0)};
        case InitMode::E2: {
            if (d < 2) throw std::runtime_error("e2 init requires dimension >= 2");
            Vector w(d, 0.0);
            w[1] = 1.0;
            return Model{w};
        }
        case InitMode::Gaussian: {
            Rng rng(cfg.seed);
            Vector w(d);
            for (auto& wi : w) wi = rng.normal();
            return Model{w};
        }
    }
    throw std::logic_error("unknown init mode");
}

double sgd_step_cap(double alpha) { return std::min(1.0, 2.0 / ((1.0 + alpha) * (1.0 + alpha))); }

double run_final_robust_risk(const ExperimentConfig& cfg, const Dataset& S, double alpha,
                             double eta, std::size_t iters, std::uint64_t seed, const Model& w0) {
    if (cfg.algorithm == Algorithm::AGd)
        return run_alpha_gd(S, alpha, StepSchedule::constant(eta), iters, w0)
            .rows.back()
            .robust_risk;
    return run_alpha_sgd(S, alpha, eta, iters, seed, w0).rows.back().robust_risk;
}

}  // namespace

TuningResult tune_step_size(const ExperimentConfig& cfg, const Dataset& S, double alpha) {
    if (cfg.algorithm != Algorithm::AGd && cfg.algorithm != Algorithm::ASgd)
        throw std::runtime_error("step-size tuning applies to agd/asgd only");
    constexpr std::size_t kTuneIters = 500;
    constexpr std::size_t kTuneTrials = 5;
    const Model w0 = initial_model(cfg, S.dim());

    TuningResult res;
    res.alpha = alpha;
    bool any = false;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) {
        const double eta = 0.1 / std::pow(2.0, k);
        double score;
        try {
            if (cfg.algorithm == Algorithm::AGd) {
                score = run_final_robust_risk(cfg, S, alpha, eta, kTuneIters, cfg.seed, w0);
            } else {
                double sum = 0.0;
                for (std::size_t tr = 0; tr < kTuneTrials; ++tr)
                    sum += run_final_robust_risk(cfg, S, alpha, eta, kTuneIters, cfg.seed + tr, w0);
                score = sum / static_cast<double>(kTuneTrials);
            }
        } catch (const std::runtime_error&) {
            score = std::numeric_limits<double>::infinity();  // diverged grid point
        }
        res.grid.emplace_back(eta, score);
        if (std::isfinite(score) && score <= best) {  // ties favor the smaller (later) eta
            best = score;
            res.chosen_eta = eta;
            any = true;
        }
    }
    if (!any) throw std::runtime_error("step-size tuning: every grid point diverged");
    return res;
}

namespace {

class ArtifactWriter {
  public:
    explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

    void record(const std::string& p) { files_.push_back(p); }

    const std::vector<std::string>& files() const { return files_; }

    void remove_all_recorded() {
        for (const auto& f : files_) {
            std::error_code ec;
            fs::remove(f, ec);
        }
    }

  private:
    std::string dir_;
    std::vector<std::string> files_;
};

std::vector<std::pair<double, double>> series_points(const std::vector<TraceRow>& rows,
                                                     TraceField f, bool skip_t0) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        if (skip_t0 && r.t == 0) continue;
        pts.emplace_back(static_cast<double>(r.t), trace_field(r, f));
    }
    return pts;
}

std::optional<std::size_t> first_margin_at_least(const std::vector<TraceRow>& rows, double alpha) {
    for (const auto& r : rows)
        if (r.margin >= alpha) return r.t;
    return std::nullopt;
}

json opt_to_json(const std::optional<std::size_t>& v) {
    if (v) return *v;
    return nullptr;
}

}  // namespace

void emit_bound_table(const BoundInputs& in, const std::vector<std::size_t>& t_grid,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,gd_bound,sgd_bound,margin_trigger_level\n";
    const StepSchedule sched = StepSchedule::constant(in.eta);
    for (std::size_t t : t_grid) {
        out << t << "," << fmt_g17(gd_bound(t, in.gamma, in.alpha, sched)) << ","
            << fmt_g17(sgd_bound(t, in.gamma, in.alpha, in.eta, in.delta_conf)) << ","
            << fmt_g17(margin_trigger_level(in.n)) << "\n";
    }
    out << "# c_q," << fmt_g17(static_cast<double>(c_q_constant(in.q))) << "\n";
    out << "# corollary_gd_iters," << fmt_g17(corollary_gd_iters(in)) << "\n";
    out << "# corollary_sgd_iters," << fmt_g17(corollary_sgd_iters(in)) << "\n";
    out << "# constants,q=" << fmt_g17(in.q) << ",c=" << fmt_g17(in.c)
        << ",delta=" << fmt_g17(in.delta_conf) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ArtifactWriter art(cfg.output_dir);
    try {
        json summary;
        summary["alphas"] = cfg.alphas;
        json step_sizes = json::object();
        json bounds = json::object();
        json rate_slopes = json::object();
        json margin_attained = json::object();
        json results = json::object();

        const std::size_t T = cfg.iterations;
        // slope fit window: the trailing 98% of a long run, so transients at
        // t < T/50 don't leak into the exponent estimate
        const std::size_t slope_t_min = std::max<std::size_t>(1, T / 50);

        auto fit_slope = [&](const TrainTrace& trace) -> json {
            if (T < slope_t_min + 2) return nullptr;
            try {
                return rate_slope(trace, TraceField::RobustRisk, slope_t_min, T);
            } catch (const std::exception&) {
                return nullptr;
            }
        };

        if (cfg.algorithm == Algorithm::ErmGame) {
            if (!cfg.dataset || cfg.dataset->kind != DatasetConfig::Kind::TwoPoint)
                throw std::runtime_error("erm_game requires a two_point dataset");
            if (!cfg.game) throw std::runtime_error("erm_game requires a game config section");
            const GameParams params{cfg.dataset->d, cfg.dataset->gamma, cfg.game->alpha,
                                    cfg.game->epsilon};
            const GameState st = run_erm_game(params, T, cfg.seed);
            summary["gamma"] = params.gamma;
            summary["alphas"] = std::vector<double>{params.alpha};
            double mn = std::numeric_limits<double>::infinity();
            double mx = -std::numeric_limits<double>::infinity();
            for (double m : st.margins_on_s) {
                mn = std::min(mn, m);
                mx = std::max(mx, m);
            }
            json game;
            game["rounds"] = st.rounds;
            game["rounds_requested"] = st.rounds_requested;
            game["admissible"] = st.admissible;
            game["code_size"] = st.models.size();
            game["code_complete"] = st.code_complete;
            game["epsilon"] = params.eps;
            game["threshold"] = code_threshold(params.gamma, params.alpha, params.eps);
            game["margin_on_s_min"] = st.rounds ? json(mn) : json(nullptr);
            game["margin_on_s_max"] = st.rounds ? json(mx) : json(nullptr);
            game["lower_bound_iters"] = erm_lower_bound_iters(params.d, params.gamma, params.eps,
                                                              cfg.game->c);
            game["lower_bound_c"] = cfg.game->c;
            summary["game"] = game;
        } else if (cfg.algorithm == Algorithm::SlowGd) {
            if (!cfg.slow_gd) throw std::runtime_error("slow_gd requires a slow_gd config section");
            const double c = cfg.slow_gd->c, alpha = cfg.slow_gd->alpha;
            const TrainTrace trace = run_slow_gd_instance(c, alpha, T);
            summary["gamma"] = 1.0;
            summary["alphas"] = std::vector<double>{alpha};
            const std::string tp = art.path("trace_slow_gd.csv");
            write_trace_csv(trace.rows, tp);
            art.record(tp);
            json r;
            r["c"] = c;
            r["threshold"] = exp_gd_threshold(c, alpha);
            r["final_first_coordinate"] = trace.final_model.w[0];
            results["slow_gd"] = r;
            margin_attained[alpha_tag(alpha)] = opt_to_json(first_margin_at_least(trace.rows, alpha));
            rate_slopes[alpha_tag(alpha)] = fit_slope(trace);
            if (cfg.emit_svg) {
                const std::string mp = art.path("truncated_margin.svg");
                emit_svg_chart({{"slow_gd", series_points(trace.rows, TraceField::TruncatedMargin,
                                                          false)}},
                               false, mp, "truncated margin", "t", "truncated margin");
                art.record(mp);
            }
        } else {
            if (!cfg.dataset) throw std::runtime_error("this algorithm requires a dataset section");
            Dataset S = build_dataset(*cfg.dataset);
            double scale = 1.0;
            if (cfg.normalize) {
                auto [scaled_set, sc] = scale_to_unit_ball(S);
                S = std::move(scaled_set);
                scale = sc;
            }
            const double gamma = max_margin(S).gamma;
            summary["gamma"] = gamma;
            bounds["margin_trigger_level"] = margin_trigger_level(S.n());
            bounds["scale"] = scale;
            json per_alpha = json::object();

            std::vector<ChartSeries> risk_series, margin_series;
            json tuning = json::object();

            for (double alpha : cfg.alphas) {
                const std::string tag = alpha_tag(alpha);
                json ab = json::object();

                if (cfg.algorithm == Algorithm::APerceptron) {
                    const PerceptronReport rep = run_alpha_perceptron(S, alpha, T);
                    json r;
                    r["nonzero_updates"] = rep.nonzero_updates;
                    r["epochs"] = rep.epochs;
                    r["terminated"] = rep.terminated;
                    if (norm(rep.final_model.w) > 0.0) {
                        const double m = margin(rep.final_model, S).margin;
                        r["final_margin"] = m;
                        margin_attained[tag] = m >= alpha ? json(rep.epochs) : json(nullptr);
                    } else {
                        r["final_margin"] = nullptr;
                        margin_attained[tag] = nullptr;
                    }
                    if (alpha < gamma) ab["perceptron_update_bound"] = perceptron_update_bound(gamma, alpha);
                    results["perceptron"][tag] = r;
                    rate_slopes[tag] = nullptr;
                    per_alpha[tag] = ab;
                    continue;
                }

                // resolve the step size
                double eta;
                if (cfg.step_mode == StepMode::Explicit) {
                    eta = cfg.step_size;
                } else if (cfg.step_mode == StepMode::Tune) {
                    const TuningResult tr = tune_step_size(cfg, S, alpha);
                    eta = tr.chosen_eta;
                    json grid = json::array();
                    for (const auto& [e, v] : tr.grid)
                        grid.push_back({e, std::isfinite(v) ? json(v) : json(nullptr)});
                    tuning[tag] = {{"chosen_eta", eta}, {"grid", grid}};
                    const std::string tp = art.path("tuning_alpha=" + tag + ".csv");
                    std::ofstream tout(tp, std::ios::binary);
                    if (!tout) throw std::runtime_error("cannot write " + tp);
                    tout << "eta,mean_final_robust_risk\n";
                    for (const auto& [e, v] : tr.grid)
                        tout << fmt_g17(e) << "," << fmt_g17(v) << "\n";
                    art.record(tp);
                } else {
                    if (cfg.algorithm == Algorithm::AGd) {
                        if (!(alpha < gamma))
                            throw std::runtime_error("theory_cap step requires alpha < gamma (alpha=" +
                                                     tag + ", gamma=" + fmt_g17(gamma) + ")");
                        eta = gd_step_cap(gamma, alpha);
                    } else {
                        eta = sgd_step_cap(alpha);
                    }
                }
                step_sizes[tag] = eta;
                ab["step_size"] = eta;
                if (alpha < gamma) {
                    ab["gd_step_cap"] = gd_step_cap(gamma, alpha);
                    if (T >= 2) {
                        ab["gd_bound_at_T"] =
                            gd_bound(T, gamma, alpha, StepSchedule::constant(eta));
                        ab["sgd_bound_at_T"] = sgd_bound(T, gamma, alpha, eta, 0.1);
                    }
                }

                const Model w0 = initial_model(cfg, S.dim());
                if (cfg.algorithm == Algorithm::AGd) {
                    const StepSchedule sched = cfg.step_mode == StepMode::TheoryCap
                                                   ? StepSchedule::constant_with_warmup(1.0, eta)
                                                   : StepSchedule::constant(eta);
                    const TrainTrace trace = run_alpha_gd(S, alpha, sched, T, w0);
                    const std::string tp = art.path("trace_alpha=" + tag + ".csv");
                    write_trace_csv(trace.rows, tp);
                    art.record(tp);
                    rate_slopes[tag] = fit_slope(trace);
                    margin_attained[tag] = opt_to_json(first_margin_at_least(trace.rows, alpha));
                    if (cfg.emit_svg) {
                        risk_series.push_back(
                            {"alpha=" + tag, series_points(trace.rows, TraceField::RobustRisk, true)});
                        margin_series.push_back(
                            {"alpha=" + tag,
                             series_points(trace.rows, TraceField::TruncatedMargin, false)});
                    }
                } else {  // ASgd
                    std::vector<std::vector<TraceRow>> trial_rows;
                    json final_avg_risks = json::array();
                    std::optional<TrainTrace> first_trace;
                    for (std::size_t k = 0; k < cfg.trials; ++k) {
                        TrainTrace trace = run_alpha_sgd(S, alpha, eta, T, cfg.seed + k, w0);
                        const std::string tp =
                            art.path("trace_alpha=" + tag + "_trial=" + std::to_string(k) + ".csv");
                        write_trace_csv(trace.rows, tp);
                        art.record(tp);
                        final_avg_risks.push_back(trace.avg_rows.back().robust_risk);
                        trial_rows.push_back(trace.rows);
                        if (k == 0) first_trace = std::move(trace);
                    }
                    const std::string ap = art.path("aggregate_alpha=" + tag + ".csv");
                    write_aggregate_csv(trial_rows, ap);
                    art.record(ap);
                    results["sgd"][tag] = {{"final_averaged_robust_risk", final_avg_risks}};
                    rate_slopes[tag] = fit_slope(*first_trace);
                    margin_attained[tag] = opt_to_json(first_margin_at_least(first_trace->rows, alpha));
                    if (cfg.emit_svg) {
                        // chart the across-trial mean of the robust risk
                        std::vector<std::pair<double, double>> mean_pts, margin_pts;
                        const double k = static_cast<double>(trial_rows.size());
                        for (std::size_t r = 0; r < trial_rows[0].size(); ++r) {
                            double s = 0.0, tm = 0.0;
                            for (const auto& tr : trial_rows) {
                                s += tr[r].robust_risk;
                                tm += tr[r].truncated_margin;
                            }
                            if (trial_rows[0][r].t >= 1)
                                mean_pts.emplace_back(static_cast<double>(trial_rows[0][r].t), s / k);
                            margin_pts.emplace_back(static_cast<double>(trial_rows[0][r].t), tm / k);
                        }
                        risk_series.push_back({"alpha=" + tag, mean_pts});
                        margin_series.push_back({"alpha=" + tag, margin_pts});
                    }
                }
                per_alpha[tag] = ab;
            }

            bounds["per_alpha"] = per_alpha;
            if (!tuning.empty()) results["tuning"] = tuning;
            if (cfg.emit_svg && !risk_series.empty()) {
                const std::string rp = art.path("robust_risk.svg");
                emit_svg_chart(risk_series, false, rp, "robust risk", "t", "robust risk");
                art.record(rp);
                const std::string lp = art.path("robust_risk_loglog.svg");
                emit_svg_chart(risk_series, true, lp, "robust risk (log-log)", "t", "robust risk");
                art.record(lp);
                const std::string mp = art.path("truncated_margin.svg");
                emit_svg_chart(margin_series, false, mp, "truncated margin", "t", "truncated margin");
                art.record(mp);
            }
        }

        summary["step_sizes"] = step_sizes;
        summary["bounds"] = bounds;
        summary["rate_slopes"] = rate_slopes;
        summary["margin_attained_at"] = margin_attained;
        if (!results.empty()) summary["results"] = results;

        const std::string sp = art.path("summary.json");
        {
            std::ofstream out(sp, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + sp);
            out << summary.dump(2) << "\n";
            if (!out) throw std::runtime_error("write failed: " + sp);
        }
        art.record(sp);
        return {art.files(), summary};
    } catch (...) {
        art.remove_all_recorded();
        throw;
    }
}

}  // namespace advtrain
