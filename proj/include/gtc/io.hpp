// File formats (sparse COO tensors, edge lists, rating logs, traffic
// matrices), experiment configuration, and evaluation metrics.

#ifndef GTC_IO_HPP
#define GTC_IO_HPP

#include <iosfwd>
#include <map>
#include <string>

#include "gtc/datagen.hpp"

namespace gtc {

// Bad configuration (unknown keys, invalid values). CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input data (malformed files, shape mismatches). CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// COO tensor file: header line `n1 n2 n3`, then one `i1 i2 i3 value` line per
// observed entry (1-based indices).
ObservedTensor read_coo_tensor(const std::string& path);
void write_coo_tensor(const std::string& path, const ObservedTensor& obs);

// Edge-event file: lines `i j t` (1-based), `#` comments and blank lines
// ignored. A static graph file omits `t` and is copied across all T periods.
DynamicGraph read_dynamic_graph(const std::string& path, Index m, Index T);
DynamicGraph read_static_graph(const std::string& path, Index m, Index T);
void write_dynamic_graph(const std::string& path, const DynamicGraph& g);

struct Rating {
    long long user, item;
    double value;
    double timestamp;
};

// Lines `user item rating timestamp`; `#` comments and blank lines ignored.
std::vector<Rating> read_rating_log(const std::string& path);

struct RatingIngest {
    ObservedTensor tensor;
    std::vector<long long> user_ids;  // dense index -> original id
    std::vector<long long> item_ids;
    double sparsity = 0;  // observed fraction of n1*n2*n3
};

// Buckets timestamps into T equal-width periods over [min, max]; duplicate
// (user, item, period) triples are collapsed by mean. Ids are remapped to
// dense 0-based indices in order of first appearance.
RatingIngest ingest_ratings(const std::vector<Rating>& log, Index T);

// Whitespace-separated row-major matrix of segments x (intervals*days),
// reshaped to segments x intervals x days. Zeros are treated as missing
// unless zeros_are_values is set.
ObservedTensor ingest_traffic(const std::string& path, Index segments,
                              Index intervals, Index days,
                              bool zeros_are_values = false);

struct EvalMetrics {
    double re = 0;    // ||est - truth||_F / ||truth||_F over the test mask
    double rmse = 0;  // per-entry root mean squared error
};

EvalMetrics evaluate(const RTensor& completed, const std::vector<Observation>& test);

// Flat `key = value` experiment configuration. Unknown keys are rejected;
// every run emits the fully resolved text alongside its results.
struct ExperimentConfig {
    // problem shape / generation
    Index m = 50, n = 50, T = 64;
    Index gen_rank = 5;
    Index communities = 5;
    double p_in = 0.7, p_out = 0.02;
    Index interval = 4;
    std::uint64_t graph_seed = 1, data_seed = 2;

    // sampling
    double sample_ratio = 0.1;
    Index sample_count = 0;
    double sigma = 0.0;
    NoiseKind noise = NoiseKind::gaussian;
    bool with_replacement = false;
    std::uint64_t sample_seed = 3;

    // solver
    SolverConfig solver;
    bool beta_theory = false;

    // sweeps / repeats
    std::vector<double> ratios = {0.05, 0.1, 0.2};
    std::vector<Index> intervals = {4, 8, 16, 32, 64};
    std::vector<Index> ss_grid;  // empty -> divisors-of-T default
    std::vector<Index> ranks = {2, 3, 5, 8};
    std::vector<double> perturb_levels = {0.0, 0.1, 0.2, 0.3, 0.4};
    Index seeds = 5;
    Index folds = 5;

    // external data (optional)
    std::string data_file;     // COO tensor or rating log, per subcommand
    std::string graph_w_file;  // edge events for the row graph
    std::string graph_h_file;  // edge events for the column graph

    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig parse_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::string resolved_text() const;
    void validate() const;
};

}  // namespace gtc

#endif  // GTC_IO_HPP
