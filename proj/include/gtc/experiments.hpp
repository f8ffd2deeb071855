// Experiment drivers behind the CLI subcommands: synthetic generation,
// single completions, similarity-scale sweeps, graph-mode comparisons,
// complexity-measure probes, error-scaling runs, theory checks, and
// cross-validated rank selection.

#ifndef GTC_EXPERIMENTS_HPP
#define GTC_EXPERIMENTS_HPP

#include "gtc/io.hpp"
#include "gtc/theory.hpp"

namespace gtc {

// Synthetic instance shared by the drivers: graph-embedded low-rank truth,
// its generating dynamic graphs, and a sampled observation set.
struct SyntheticInstance {
    RTensor truth;
    DynamicGraph g_w, g_h;
    ObservedTensor observed;
};

SyntheticInstance make_synthetic(const ExperimentConfig& cfg, Index seed_offset = 0);

// If out_dir is empty no files are written; otherwise each driver writes
// config.txt (resolved), metrics.csv, and seeds.txt into it.
void run_generate(const ExperimentConfig& cfg, const std::string& out_dir);

struct CompleteResult {
    double re = 0, rmse = 0;
    double train_re = 0;
    Index iterations = 0;
    bool converged = false;
    double beta_used = 0;
};

CompleteResult run_complete(const ExperimentConfig& cfg, const std::string& out_dir,
                            Index jobs = 1);

enum class GraphMode { agnostic, static_, dynamic };

std::string to_string(GraphMode mode);

struct GraphModesRow {
    double ratio = 0;
    GraphMode mode = GraphMode::agnostic;
    double median_re = 0;
};

struct GraphModesResult {
    std::vector<GraphModesRow> rows;
    // max over seeds/ratios of |RE_dynamic - RE_static|; meaningful when the
    // graph interval equals T, where the two modes coincide.
    double dynamic_static_gap = 0;

    double median_re(double ratio, GraphMode mode) const;
};

GraphModesResult run_compare_graph_modes(const ExperimentConfig& cfg,
                                         const std::string& out_dir, Index jobs = 1);

struct SweepSsRow {
    Index interval = 0;
    Index ss = 0;
    double median_re = 0;
};

struct SweepSsResult {
    std::vector<SweepSsRow> rows;
    std::vector<std::pair<Index, Index>> best_ss;  // (interval, argmin-RE ss)
};

SweepSsResult run_sweep_ss(const ExperimentConfig& cfg, const std::string& out_dir,
                           Index jobs = 1);

struct AlphaProbeRow {
    double perturb_level = 0;
    double alpha = 0;       // median over seeds
    double alpha_star = 0;  // ||truth||_inf, median over seeds
};

struct AlphaIntervalRow {
    Index interval = 0;
    double alpha_static_over_dynamic = 0;  // median over seeds
};

struct AlphaProbeResult {
    std::vector<AlphaProbeRow> perturb_rows;
    std::vector<AlphaIntervalRow> interval_rows;
};

AlphaProbeResult run_alpha_probe(const ExperimentConfig& cfg,
                                 const std::string& out_dir);

ScalingReport run_scaling_probe(const ExperimentConfig& cfg,
                                const std::string& out_dir);

struct TheoryCheckResult {
    double max_regularizer_gap = 0;   // analytic-vs-weighted-Frobenius probe
    double max_attained_rel_err = 0;  // balanced factorization vs nuclear norm
    double max_lower_gap = 0;         // random factorizations vs nuclear norm
    bool ok = false;
};

TheoryCheckResult run_theory_check(const ExperimentConfig& cfg,
                                   const std::string& out_dir);

struct CvRankResult {
    Index best_rank = 0;
    std::vector<std::pair<Index, double>> cv_errors;  // (rank, mean CV RE)
    double re_graph = 0;     // median test RE over splits, graph-regularized
    double re_agnostic = 0;  // same splits, lambda_g = 0
};

// Five-fold CV rank selection on the observed entries of cfg.data_file
// (a rating log), then graph vs no-graph evaluation over `seeds` random
// 80/20 train/test splits of the observations.
CvRankResult run_cv_rank(const ExperimentConfig& cfg, const std::string& out_dir,
                         Index jobs = 1);

}  // namespace gtc

#endif  // GTC_EXPERIMENTS_HPP
