#include "gtc/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace gtc {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw std::logic_error("median of empty set");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Runs fn(0..count-1), at most `jobs` at a time. Tasks must not share state.
void parallel_tasks(Index count, Index jobs, const std::function<void(Index)>& fn) {
    if (jobs <= 1) {
        for (Index i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<Index> next{0};
    std::vector<std::thread> workers;
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mutex;
    for (Index w = 0; w < std::min(jobs, count); ++w)
        workers.emplace_back([&] {
            for (;;) {
                const Index i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!failed.exchange(true)) first_error = e.what();
                    return;
                }
            }
        });
    for (auto& t : workers) t.join();
    if (failed.load()) throw std::runtime_error(first_error);
}

void write_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                   const std::string& metrics_csv) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir + "/config.txt") << cfg.resolved_text();
    std::ofstream(out_dir + "/metrics.csv") << metrics_csv;
    std::ofstream(out_dir + "/seeds.txt")
        << "graph_seed = " << cfg.graph_seed << "\ndata_seed = " << cfg.data_seed
        << "\nsample_seed = " << cfg.sample_seed
        << "\nsolver_seed = " << cfg.solver.seed << '\n';
}

ObservedTensor dense_to_coo(const RTensor& x) {
    ObservedTensor obs{x.n1(), x.n2(), x.n3(), {}};
    obs.entries.reserve(static_cast<size_t>(x.size()));
    for (Index i3 = 0; i3 < x.n3(); ++i3)
        for (Index i2 = 0; i2 < x.n2(); ++i2)
            for (Index i1 = 0; i1 < x.n1(); ++i1)
                obs.entries.push_back({i1, i2, i3, x(i1, i2, i3)});
    return obs;
}

CommunityGraphSpec graph_spec(const ExperimentConfig& cfg, Index vertices,
                              std::uint64_t seed) {
    CommunityGraphSpec spec;
    spec.vertex_count = vertices;
    spec.communities = std::min(cfg.communities, vertices);
    spec.p_in = cfg.p_in;
    spec.p_out = cfg.p_out;
    spec.periods = cfg.T;
    spec.interval = cfg.interval;
    spec.seed = seed;
    return spec;
}

std::optional<DynamicGraph> load_graph(const std::string& path, Index m, Index T) {
    if (path.empty()) return std::nullopt;
    return read_dynamic_graph(path, m, T);
}

// RE of the completion on the observed entries themselves.
double train_re(const RTensor& completed, const ObservedTensor& obs) {
    return evaluate(completed, obs.entries).re;
}

struct SolveOutcome {
    RTensor completed;
    Diagnostics diag;
};

SolveOutcome solve_mode(const ObservedTensor& obs, const SyntheticInstance& inst,
                        const ExperimentConfig& cfg, GraphMode mode,
                        std::uint64_t solver_seed) {
    SolverConfig sc = cfg.solver;
    sc.seed = solver_seed;
    std::optional<DynamicGraph> gw, gh;
    switch (mode) {
        case GraphMode::agnostic:
            sc.lambda_g = 0.0;
            sc.ss = 0;
            break;
        // Static mode runs the same solver configuration as dynamic (same
        // aggregation window) but is fed the first-period graph copied across
        // all periods, so the comparison isolates the value of graph dynamism.
        case GraphMode::static_:
            gw = static_graph(inst.g_w);
            gh = static_graph(inst.g_h);
            sc.ss = cfg.interval;
            break;
        case GraphMode::dynamic:
            gw = inst.g_w;
            gh = inst.g_h;
            sc.ss = cfg.interval;
            break;
    }
    auto [completed, diag] = solve(obs, std::move(gw), std::move(gh), sc);
    return {std::move(completed), std::move(diag)};
}

}  // namespace

std::string to_string(GraphMode mode) {
    switch (mode) {
        case GraphMode::agnostic: return "agnostic";
        case GraphMode::static_: return "static";
        case GraphMode::dynamic: return "dynamic";
    }
    return "?";
}

SyntheticInstance make_synthetic(const ExperimentConfig& cfg, Index seed_offset) {
    SyntheticInstance inst;
    inst.g_w = community_dynamic_graph(graph_spec(cfg, cfg.m, cfg.graph_seed + seed_offset));
    inst.g_h =
        community_dynamic_graph(graph_spec(cfg, cfg.n, cfg.graph_seed + seed_offset + 101));
    Transform m = Transform::dft(cfg.T);
    RTensor z = lowrank_tensor(cfg.m, cfg.n, cfg.T, cfg.gen_rank, m,
                               cfg.data_seed + seed_offset);
    inst.truth = embed_graph_similarity(z, &inst.g_w, &inst.g_h);
    // The spectral filter shrinks entries by orders of magnitude; rescale to
    // unit RMS entry so regularization weights mean the same thing at every
    // size and the reported relative errors are comparable across instances.
    const double rms =
        inst.truth.frobenius_norm() / std::sqrt(static_cast<double>(inst.truth.size()));
    if (rms > 0)
        for (Index i = 0; i < inst.truth.size(); ++i) inst.truth.data()[i] /= rms;

    ObservationModel om;
    om.sample_ratio = cfg.sample_ratio;
    om.count = cfg.sample_count;
    om.sigma = cfg.sigma;
    om.noise_kind = cfg.noise;
    om.with_replacement = cfg.with_replacement;
    om.seed = cfg.sample_seed + seed_offset;
    inst.observed = sample_observations(inst.truth, om);
    return inst;
}

void run_generate(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (out_dir.empty()) throw ConfigError("generate requires an output directory");
    SyntheticInstance inst = make_synthetic(cfg);
    std::filesystem::create_directories(out_dir);
    write_coo_tensor(out_dir + "/truth.coo", dense_to_coo(inst.truth));
    write_coo_tensor(out_dir + "/observed.coo", inst.observed);
    write_dynamic_graph(out_dir + "/graph_w.edges", inst.g_w);
    write_dynamic_graph(out_dir + "/graph_h.edges", inst.g_h);
    std::ostringstream ss;
    ss << "n1,n2,n3,observed,sparsity\n"
       << cfg.m << ',' << cfg.n << ',' << cfg.T << ',' << inst.observed.entries.size()
       << ','
       << static_cast<double>(inst.observed.entries.size()) /
              static_cast<double>(cfg.m * cfg.n * cfg.T)
       << '\n';
    write_outputs(out_dir, cfg, ss.str());
}

CompleteResult run_complete(const ExperimentConfig& cfg, const std::string& out_dir,
                            Index) {
    CompleteResult res;
    ObservedTensor obs;
    std::optional<RTensor> truth;
    std::optional<DynamicGraph> gw, gh;
    if (!cfg.data_file.empty()) {
        obs = read_coo_tensor(cfg.data_file);
        gw = load_graph(cfg.graph_w_file, obs.n1, obs.n3);
        gh = load_graph(cfg.graph_h_file, obs.n2, obs.n3);
    } else {
        SyntheticInstance inst = make_synthetic(cfg);
        obs = std::move(inst.observed);
        truth = std::move(inst.truth);
        gw = std::move(inst.g_w);
        gh = std::move(inst.g_h);
    }
    SolverConfig sc = cfg.solver;
    if (cfg.beta_theory) {
        AdmmSolver probe(obs, gw, gh, sc);
        sc.beta = probe.beta_theory_bound();
    }
    res.beta_used = sc.beta;
    auto [completed, diag] = solve(obs, gw, gh, sc);
    res.iterations = diag.iterations;
    res.converged = diag.converged;
    res.train_re = train_re(completed, obs);
    if (truth) {
        const auto test = test_entries(*truth, obs);
        if (!test.empty()) {
            const EvalMetrics m = evaluate(completed, test);
            res.re = m.re;
            res.rmse = m.rmse;
        }
    }
    std::ostringstream ss;
    ss.precision(17);
    ss << "re,rmse,train_re,iterations,converged,beta\n"
       << res.re << ',' << res.rmse << ',' << res.train_re << ',' << res.iterations
       << ',' << res.converged << ',' << res.beta_used << '\n';
    write_outputs(out_dir, cfg, ss.str());
    if (!out_dir.empty()) {
        diag.write_csv(out_dir + "/diagnostics.csv");
        write_coo_tensor(out_dir + "/completed.coo", dense_to_coo(completed));
    }
    return res;
}

double GraphModesResult::median_re(double ratio, GraphMode mode) const {
    for (const GraphModesRow& r : rows)
        if (r.ratio == ratio && r.mode == mode) return r.median_re;
    throw std::logic_error("no such graph-modes row");
}

GraphModesResult run_compare_graph_modes(const ExperimentConfig& cfg,
                                         const std::string& out_dir, Index jobs) {
    const Index n_ratios = static_cast<Index>(cfg.ratios.size());
    const Index n_tasks = n_ratios * cfg.seeds;
    // re[task][mode]
    std::vector<std::array<double, 3>> re(static_cast<size_t>(n_tasks));

    parallel_tasks(n_tasks, jobs, [&](Index task) {
        const Index ri = task / cfg.seeds;
        const Index s = task % cfg.seeds;
        ExperimentConfig c = cfg;
        c.sample_ratio = cfg.ratios[static_cast<size_t>(ri)];
        c.sample_count = 0;
        c.sample_seed = cfg.sample_seed + 7919 * ri;  // mask varies with ratio too
        SyntheticInstance inst = make_synthetic(c, s);
        const auto test = test_entries(inst.truth, inst.observed);
        for (GraphMode mode :
             {GraphMode::agnostic, GraphMode::static_, GraphMode::dynamic}) {
            SolveOutcome out =
                solve_mode(inst.observed, inst, c, mode, cfg.solver.seed + s);
            re[static_cast<size_t>(task)][static_cast<size_t>(mode)] =
                evaluate(out.completed, test).re;
        }
    });

    GraphModesResult res;
    std::ostringstream ss;
    ss.precision(17);
    ss << "ratio,mode,median_re\n";
    for (Index ri = 0; ri < n_ratios; ++ri)
        for (GraphMode mode :
             {GraphMode::agnostic, GraphMode::static_, GraphMode::dynamic}) {
            std::vector<double> vals;
            for (Index s = 0; s < cfg.seeds; ++s)
                vals.push_back(
                    re[static_cast<size_t>(ri * cfg.seeds + s)][static_cast<size_t>(mode)]);
            res.rows.push_back({cfg.ratios[static_cast<size_t>(ri)], mode, median(vals)});
            ss << cfg.ratios[static_cast<size_t>(ri)] << ',' << to_string(mode) << ','
               << res.rows.back().median_re << '\n';
        }
    for (const auto& r : re)
        res.dynamic_static_gap =
            std::max(res.dynamic_static_gap,
                     std::abs(r[static_cast<size_t>(GraphMode::dynamic)] -
                              r[static_cast<size_t>(GraphMode::static_)]));
    write_outputs(out_dir, cfg, ss.str());
    return res;
}

SweepSsResult run_sweep_ss(const ExperimentConfig& cfg, const std::string& out_dir,
                           Index jobs) {
    std::vector<Index> grid = cfg.ss_grid;
    if (grid.empty())
        for (Index d = 1; d <= cfg.T; ++d)
            if (cfg.T % d == 0) grid.push_back(d);
    for (Index ss : grid)
        if (ss <= 0 || cfg.T % ss != 0)
            throw ConfigError("ss_grid entries must divide T");

    const Index n_int = static_cast<Index>(cfg.intervals.size());
    const Index n_ss = static_cast<Index>(grid.size());
    const Index n_tasks = n_int * cfg.seeds;
    std::vector<std::vector<double>> re(static_cast<size_t>(n_tasks),
                                        std::vector<double>(static_cast<size_t>(n_ss)));

    parallel_tasks(n_tasks, jobs, [&](Index task) {
        const Index ii = task / cfg.seeds;
        const Index s = task % cfg.seeds;
        ExperimentConfig c = cfg;
        c.interval = cfg.intervals[static_cast<size_t>(ii)];
        SyntheticInstance inst = make_synthetic(c, s);
        const auto test = test_entries(inst.truth, inst.observed);
        for (Index k = 0; k < n_ss; ++k) {
            SolverConfig sc = cfg.solver;
            sc.ss = grid[static_cast<size_t>(k)];
            sc.seed = cfg.solver.seed + s;
            auto [completed, diag] = solve(inst.observed, inst.g_w, inst.g_h, sc);
            re[static_cast<size_t>(task)][static_cast<size_t>(k)] =
                evaluate(completed, test).re;
        }
    });

    SweepSsResult res;
    std::ostringstream ss;
    ss.precision(17);
    ss << "interval,ss,median_re\n";
    for (Index ii = 0; ii < n_int; ++ii) {
        Index best = grid[0];
        double best_re = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < n_ss; ++k) {
            std::vector<double> vals;
            for (Index s = 0; s < cfg.seeds; ++s)
                vals.push_back(
                    re[static_cast<size_t>(ii * cfg.seeds + s)][static_cast<size_t>(k)]);
            const double med = median(vals);
            res.rows.push_back(
                {cfg.intervals[static_cast<size_t>(ii)], grid[static_cast<size_t>(k)], med});
            ss << cfg.intervals[static_cast<size_t>(ii)] << ','
               << grid[static_cast<size_t>(k)] << ',' << med << '\n';
            if (med < best_re) {
                best_re = med;
                best = grid[static_cast<size_t>(k)];
            }
        }
        res.best_ss.emplace_back(cfg.intervals[static_cast<size_t>(ii)], best);
    }
    write_outputs(out_dir, cfg, ss.str());
    return res;
}

AlphaProbeResult run_alpha_probe(const ExperimentConfig& cfg,
                                 const std::string& out_dir) {
    AlphaProbeResult res;
    Transform dft = Transform::dft(cfg.T);
    const double lg = cfg.solver.lambda_g, l1 = cfg.solver.lambda_1;

    // alpha under the model's own weighting (aggregation window = interval)
    // built from perturbed versions of the generating graphs; alpha_star is
    // the plain infinity norm the graph-agnostic bound carries.
    std::vector<std::vector<double>> alphas(cfg.perturb_levels.size());
    std::vector<double> stars;
    for (Index s = 0; s < cfg.seeds; ++s) {
        SyntheticInstance inst = make_synthetic(cfg, s);
        stars.push_back(inst.truth.inf_norm());
        for (size_t li = 0; li < cfg.perturb_levels.size(); ++li) {
            const double level = cfg.perturb_levels[li];
            DynamicGraph pw = perturb_graph(inst.g_w, level, cfg.graph_seed + 7 * s);
            DynamicGraph ph = perturb_graph(inst.g_h, level, cfg.graph_seed + 7 * s + 3);
            LaplacianTensor lw = laplacian_tensor(pw, cfg.interval);
            LaplacianTensor lh = laplacian_tensor(ph, cfg.interval);
            WeightPair pair = weight_pair_from_laplacians(&lw, &lh, lg, l1, dft);
            alphas[li].push_back(alpha_measure(inst.truth, pair).alpha);
        }
    }
    for (size_t li = 0; li < cfg.perturb_levels.size(); ++li)
        res.perturb_rows.push_back(
            {cfg.perturb_levels[li], median(alphas[li]), median(stars)});

    // static (ss = T) vs dynamic (ss = interval) model weights across graph
    // change rates: the coarse window smears dynamism, inflating alpha.
    for (Index interval : cfg.intervals) {
        std::vector<double> ratios;
        for (Index s = 0; s < cfg.seeds; ++s) {
            ExperimentConfig c = cfg;
            c.interval = interval;
            SyntheticInstance inst = make_synthetic(c, s);
            LaplacianTensor lw = laplacian_tensor(inst.g_w, interval);
            LaplacianTensor lh = laplacian_tensor(inst.g_h, interval);
            LaplacianTensor slw = laplacian_tensor(inst.g_w, cfg.T);
            LaplacianTensor slh = laplacian_tensor(inst.g_h, cfg.T);
            const double a_dyn =
                alpha_measure(inst.truth,
                              weight_pair_from_laplacians(&lw, &lh, lg, l1, dft))
                    .alpha;
            const double a_sta =
                alpha_measure(inst.truth,
                              weight_pair_from_laplacians(&slw, &slh, lg, l1, dft))
                    .alpha;
            ratios.push_back(a_sta / a_dyn);
        }
        res.interval_rows.push_back({interval, median(ratios)});
    }

    std::ostringstream ss;
    ss.precision(17);
    ss << "probe,x,alpha,alpha_star,ratio\n";
    for (const AlphaProbeRow& r : res.perturb_rows)
        ss << "perturb," << r.perturb_level << ',' << r.alpha << ',' << r.alpha_star
           << ',' << r.alpha_star / r.alpha << '\n';
    for (const AlphaIntervalRow& r : res.interval_rows)
        ss << "interval," << r.interval << ",,," << r.alpha_static_over_dynamic << '\n';
    write_outputs(out_dir, cfg, ss.str());
    return res;
}

ScalingReport run_scaling_probe(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
    ScalingConfig sc;
    sc.sigma = cfg.sigma > 0 ? cfg.sigma : 1.0;
    sc.seeds = cfg.seeds;
    sc.base_seed = cfg.data_seed;
    // The consistency bound is stated for i.i.d. uniform draws, so the probe
    // always samples with replacement; this also lets N exceed the tensor
    // size on the preset grid.
    sc.with_replacement = true;
    sc.solver = cfg.solver;
    ScalingReport rep = error_scaling_experiment(sc);
    std::ostringstream ss;
    ss.precision(17);
    ss << "n_observations,per_entry_sq_error\n";
    for (const ScalingRow& r : rep.rows)
        ss << r.n_observations << ',' << r.per_entry_sq_error << '\n';
    ss << "slope," << rep.slope << '\n';
    write_outputs(out_dir, cfg, ss.str());
    return rep;
}

TheoryCheckResult run_theory_check(const ExperimentConfig& cfg,
                                   const std::string& out_dir) {
    TheoryCheckResult res;
    const Index m = 10, n = 8, T = 6;
    Transform dft = Transform::dft(T);
    std::mt19937_64 rng(cfg.data_seed);
    std::normal_distribution<double> randn(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto random_graph = [&](Index verts) {
        DynamicGraph g{verts, T, RTensor(verts, verts, T)};
        for (Index t = 0; t < T; ++t)
            for (Index i = 0; i < verts; ++i)
                for (Index j = i + 1; j < verts; ++j)
                    if (unif(rng) < 0.4) {
                        g.adjacency(i, j, t) = 1.0;
                        g.adjacency(j, i, t) = 1.0;
                    }
        return g;
    };

    for (Index trial = 0; trial < 50; ++trial) {
        DynamicGraph gw = random_graph(m), gh = random_graph(n);
        LaplacianTensor lw = laplacian_tensor(gw, 1), lh = laplacian_tensor(gh, 1);
        const double lg = 0.1 + unif(rng), l1 = 0.1 + unif(rng);
        WeightPair pair = weight_pair_from_laplacians(&lw, &lh, lg, l1, dft);
        RTensor w(m, cfg.solver.rank, T);
        for (Index i = 0; i < w.size(); ++i) w.data()[i] = randn(rng);
        res.max_regularizer_gap =
            std::max(res.max_regularizer_gap,
                     regularizer_weighted_frobenius_check(w, &lw, lg, l1, pair) /
                         std::max(1.0, w.frobenius_norm() * w.frobenius_norm()));

        RTensor x = lowrank_tensor(m, n, T, 4, dft, cfg.data_seed + 17 * trial);
        FactorizationBoundReport rep = factorization_bound_check(
            x, pair, std::min(m, n), 20, cfg.data_seed + trial);
        res.max_attained_rel_err = std::max(res.max_attained_rel_err, rep.attained_rel_err);
        res.max_lower_gap =
            std::max(res.max_lower_gap,
                     rep.worst_lower_gap / std::max(1.0, rep.weighted_nuclear));
    }
    res.ok = res.max_regularizer_gap <= 1e-8 && res.max_attained_rel_err <= 1e-6 &&
             res.max_lower_gap <= 1e-6;
    std::ostringstream ss;
    ss.precision(17);
    ss << "max_regularizer_gap,max_attained_rel_err,max_lower_gap,ok\n"
       << res.max_regularizer_gap << ',' << res.max_attained_rel_err << ','
       << res.max_lower_gap << ',' << res.ok << '\n';
    write_outputs(out_dir, cfg, ss.str());
    return res;
}

namespace {

// Splits the entry indices into `folds` contiguous chunks after a seeded shuffle.
std::vector<std::vector<size_t>> fold_indices(size_t n, Index folds,
                                              std::uint64_t seed) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::vector<size_t>> out(static_cast<size_t>(folds));
    for (size_t k = 0; k < n; ++k)
        out[k % static_cast<size_t>(folds)].push_back(idx[k]);
    return out;
}

ObservedTensor subset(const ObservedTensor& obs, const std::vector<char>& keep) {
    ObservedTensor out{obs.n1, obs.n2, obs.n3, {}};
    for (size_t k = 0; k < obs.entries.size(); ++k)
        if (keep[k]) out.entries.push_back(obs.entries[k]);
    return out;
}

}  // namespace

CvRankResult run_cv_rank(const ExperimentConfig& cfg, const std::string& out_dir,
                         Index jobs) {
    ObservedTensor obs;
    std::optional<DynamicGraph> gw, gh;
    if (!cfg.data_file.empty()) {
        RatingIngest ing = ingest_ratings(read_rating_log(cfg.data_file), cfg.T);
        obs = std::move(ing.tensor);
        gw = load_graph(cfg.graph_w_file, obs.n1, obs.n3);
        gh = load_graph(cfg.graph_h_file, obs.n2, obs.n3);
    } else {
        SyntheticInstance inst = make_synthetic(cfg);
        obs = std::move(inst.observed);
        gw = std::move(inst.g_w);
        gh = std::move(inst.g_h);
    }

    CvRankResult res;
    const size_t n = obs.entries.size();
    const auto folds = fold_indices(n, cfg.folds, cfg.sample_seed);

    auto solve_split = [&](const std::vector<char>& train_mask, Index rank,
                           bool with_graph, std::uint64_t seed) {
        SolverConfig sc = cfg.solver;
        sc.rank = rank;
        sc.seed = seed;
        if (!with_graph) {
            sc.lambda_g = 0.0;
            sc.ss = 0;
        }
        ObservedTensor train = subset(obs, train_mask);
        std::vector<Observation> test;
        for (size_t k = 0; k < n; ++k)
            if (!train_mask[k]) test.push_back(obs.entries[k]);
        auto [completed, diag] = solve(train, with_graph ? gw : std::nullopt,
                                       with_graph ? gh : std::nullopt, sc);
        return evaluate(completed, test).re;
    };

    // rank selection: mean held-out RE over the folds
    res.cv_errors.resize(cfg.ranks.size());
    const Index n_cv = static_cast<Index>(cfg.ranks.size()) * cfg.folds;
    std::vector<double> cv_re(static_cast<size_t>(n_cv));
    parallel_tasks(n_cv, jobs, [&](Index task) {
        const size_t ri = static_cast<size_t>(task / cfg.folds);
        const size_t f = static_cast<size_t>(task % cfg.folds);
        std::vector<char> train(n, 1);
        for (size_t k : folds[f]) train[k] = 0;
        cv_re[static_cast<size_t>(task)] =
            solve_split(train, cfg.ranks[ri], true, cfg.solver.seed + task);
    });
    double best = std::numeric_limits<double>::infinity();
    for (size_t ri = 0; ri < cfg.ranks.size(); ++ri) {
        double mean = 0;
        for (Index f = 0; f < cfg.folds; ++f)
            mean += cv_re[ri * static_cast<size_t>(cfg.folds) + static_cast<size_t>(f)];
        mean /= static_cast<double>(cfg.folds);
        res.cv_errors[ri] = {cfg.ranks[ri], mean};
        if (mean < best) {
            best = mean;
            res.best_rank = cfg.ranks[ri];
        }
    }

    // graph vs agnostic on `seeds` random 80/20 splits at the selected rank
    std::vector<double> graph_re(static_cast<size_t>(cfg.seeds)),
        agn_re(static_cast<size_t>(cfg.seeds));
    parallel_tasks(cfg.seeds, jobs, [&](Index s) {
        std::vector<size_t> idx(n);
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::mt19937_64 rng(cfg.sample_seed + 1000 + static_cast<std::uint64_t>(s));
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<char> train(n, 0);
        const size_t n_train = n - n / 5;
        for (size_t k = 0; k < n_train; ++k) train[idx[k]] = 1;
        graph_re[static_cast<size_t>(s)] =
            solve_split(train, res.best_rank, true, cfg.solver.seed + 500 + s);
        agn_re[static_cast<size_t>(s)] =
            solve_split(train, res.best_rank, false, cfg.solver.seed + 500 + s);
    });
    res.re_graph = median(graph_re);
    res.re_agnostic = median(agn_re);

    std::ostringstream ss;
    ss.precision(17);
    ss << "record,rank,value\n";
    for (const auto& [rank, err] : res.cv_errors) ss << "cv," << rank << ',' << err << '\n';
    ss << "best_rank," << res.best_rank << ",\n"
       << "re_graph,," << res.re_graph << '\n'
       << "re_agnostic,," << res.re_agnostic << '\n';
    write_outputs(out_dir, cfg, ss.str());
    return res;
}

}  // namespace gtc
