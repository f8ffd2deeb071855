// Synthetic instances: community dynamic graphs, random low-tubal-rank
// tensors, graph-similarity embedding by spectral filtering, graph
// perturbation, and uniform observation sampling with noise.

#ifndef GTC_DATAGEN_HPP
#define GTC_DATAGEN_HPP

#include "gtc/dynamic_graph.hpp"
#include "gtc/solver.hpp"

namespace gtc {

struct CommunityGraphSpec {
    Index vertex_count = 50;
    Index communities = 5;
    double p_in = 0.7;
    double p_out = 0.02;
    Index periods = 64;
    Index interval = 4;  // graph redrawn every `interval` periods
    std::uint64_t seed = 0;

    void validate() const;
};

enum class NoiseKind { gaussian, none };

struct ObservationModel {
    double sample_ratio = 0.1;  // ignored when count > 0
    Index count = 0;            // explicit N, optional
    double sigma = 0.0;
    NoiseKind noise_kind = NoiseKind::gaussian;
    bool with_replacement = false;
    std::uint64_t seed = 0;
};

DynamicGraph community_dynamic_graph(const CommunityGraphSpec& spec);

// Z = P *_M Q^T with standard normal factors.
RTensor lowrank_tensor(Index m, Index n, Index T, Index r, const Transform& transform,
                       std::uint64_t seed);

// Spectral low-pass filter applied entrywise to Laplacian eigenvalues.
double lowpass_filter(double s);

// X = A_f (star) Z (star) B_f^T, where A_f/B_f come from slice-wise
// eigendecompositions of the graph Laplacians filtered by g(s) = s^-2
// (g(0) = 0); a missing graph contributes the identity.
RTensor embed_graph_similarity(const RTensor& z, const DynamicGraph* g_w,
                               const DynamicGraph* g_h);

// Rewires a `level` fraction of edges per slice to random non-edges,
// preserving edge count and symmetry.
DynamicGraph perturb_graph(const DynamicGraph& g, double level, std::uint64_t seed);

ObservedTensor sample_observations(const RTensor& x, const ObservationModel& model);

// Entries of x not observed in `obs` (the held-out test set).
std::vector<Observation> test_entries(const RTensor& x, const ObservedTensor& obs);

}  // namespace gtc

#endif  // GTC_DATAGEN_HPP
