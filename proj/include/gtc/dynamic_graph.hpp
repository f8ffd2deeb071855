// Dynamic graphs as adjacency tensors, window aggregation into hierarchical
// multigraphs, Laplacian tensors and the graph smoothness regularizer.

#ifndef GTC_DYNAMIC_GRAPH_HPP
#define GTC_DYNAMIC_GRAPH_HPP

#include <tuple>
#include <vector>

#include "gtc/tensor_ops.hpp"

namespace gtc {

struct EdgeEvent {
    Index i;  // 0-based
    Index j;
    Index t;
};

struct DynamicGraph {
    Index vertex_count = 0;
    Index period_count = 0;
    RTensor adjacency;  // m x m x T, binary, symmetric slices, zero diagonal
};

struct HierarchicalMultigraph {
    Index vertex_count = 0;
    Index layer_count = 0;
    Index window = 0;  // ss = T / K
    RTensor agg_adjacency;  // m x m x K, window sums of the adjacency
};

struct LaplacianTensor {
    RTensor laplacian;  // m x m x T, slice t = D(t) - A_elongated(t)
    Index window = 0;
};

DynamicGraph from_edge_events(const std::vector<EdgeEvent>& events, Index m, Index T);

// Copies the first-period slice across all T periods.
DynamicGraph static_graph(const DynamicGraph& g);

HierarchicalMultigraph aggregate(const DynamicGraph& g, Index ss);

LaplacianTensor laplacian_tensor(const DynamicGraph& g, Index ss);

// Transform-domain slice of the combined tensor lambda_g * LAP~ + lambda_1 * I.
Eigen::MatrixXd combined_hat_slice(const LaplacianTensor& l, Index t, double lambda_g,
                                   double lambda_1);

// <LAP~, W *_M W^T> evaluated slice-wise in the transform domain.
double smoothness_analytic(const LaplacianTensor& l, const RTensor& w,
                           const Transform& m);

// (1/2) sum_{i,j,k} A_agg(i,j,k) * ||W_{i:[k]} - W_{j:[k]}||_F^2, the
// direct-summation form of the same regularizer.
double smoothness_combinatorial(const HierarchicalMultigraph& g_agg, const RTensor& w);

enum class Metric { euclidean, cosine };

// Per-period k-nearest-neighbour graph, union-symmetrized; ties break toward
// the lower vertex index. One feature matrix per period (rows = vertices),
// or a single matrix applied to all T periods.
DynamicGraph knn_similarity_graph(const std::vector<Eigen::MatrixXd>& features,
                                  Index k, Metric metric, Index T = -1);

}  // namespace gtc

#endif  // GTC_DYNAMIC_GRAPH_HPP
