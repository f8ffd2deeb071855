#include "gtc/dynamic_graph.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

namespace gtc {

DynamicGraph from_edge_events(const std::vector<EdgeEvent>& events, Index m, Index T) {
    if (m <= 0 || T <= 0)
        throw std::invalid_argument("from_edge_events: m and T must be positive");
    DynamicGraph g{m, T, RTensor(m, m, T)};
    for (const EdgeEvent& e : events) {
        if (e.i < 0 || e.i >= m || e.j < 0 || e.j >= m || e.t < 0 || e.t >= T)
            throw std::invalid_argument("from_edge_events: index out of range");
        if (e.i == e.j)
            throw std::invalid_argument("from_edge_events: self-loops not allowed");
        g.adjacency(e.i, e.j, e.t) = 1.0;
        g.adjacency(e.j, e.i, e.t) = 1.0;
    }
    return g;
}

DynamicGraph static_graph(const DynamicGraph& g) {
    DynamicGraph s{g.vertex_count, g.period_count,
                   RTensor(g.vertex_count, g.vertex_count, g.period_count)};
    for (Index t = 0; t < g.period_count; ++t) s.adjacency.slice(t) = g.adjacency.slice(0);
    return s;
}

HierarchicalMultigraph aggregate(const DynamicGraph& g, Index ss) {
    const Index T = g.period_count;
    if (ss <= 0 || T % ss != 0)
        throw std::invalid_argument("aggregate: ss must divide T");
    const Index K = T / ss;
    HierarchicalMultigraph h{g.vertex_count, K, ss, RTensor(g.vertex_count, g.vertex_count, K)};
    for (Index k = 0; k < K; ++k) {
        auto layer = h.agg_adjacency.slice(k);
        for (Index t = k * ss; t < (k + 1) * ss; ++t) layer += g.adjacency.slice(t);
    }
    return h;
}

LaplacianTensor laplacian_tensor(const DynamicGraph& g, Index ss) {
    HierarchicalMultigraph h = aggregate(g, ss);
    const Index m = g.vertex_count, T = g.period_count;
    LaplacianTensor l{RTensor(m, m, T), ss};
    for (Index t = 0; t < T; ++t) {
        auto agg = h.agg_adjacency.slice(t / ss);
        auto lap = l.laplacian.slice(t);
        lap = -agg;
        Eigen::VectorXd deg = agg.rowwise().sum();
        lap.diagonal() += deg;
    }
    return l;
}

Eigen::MatrixXd combined_hat_slice(const LaplacianTensor& l, Index t, double lambda_g,
                                   double lambda_1) {
    Eigen::MatrixXd s = lambda_g * l.laplacian.slice(t);
    s.diagonal().array() += lambda_1;
    return s;
}

double smoothness_analytic(const LaplacianTensor& l, const RTensor& w,
                           const Transform& m) {
    if (w.n1() != l.laplacian.n1())
        throw std::invalid_argument("smoothness: w rows must equal vertex count");
    if (w.n3() != m.size() || l.laplacian.n3() != m.size())
        throw std::invalid_argument("smoothness: n3 must equal transform size");
    if (m.block_size() != l.window && m.kind() != TransformKind::identity)
        throw std::invalid_argument("smoothness: transform block size must equal window");
    CTensor w_hat = m.to_hat(w);
    double acc = 0;
    for (Index t = 0; t < m.size(); ++t) {
        const auto ws = w_hat.slice(t);
        acc += (ws.adjoint() * l.laplacian.slice(t) * ws).trace().real();
    }
    return acc / m.scale();
}

double smoothness_combinatorial(const HierarchicalMultigraph& g_agg, const RTensor& w) {
    if (w.n1() != g_agg.vertex_count)
        throw std::invalid_argument("smoothness: w rows must equal vertex count");
    if (w.n3() != g_agg.layer_count * g_agg.window)
        throw std::invalid_argument("smoothness: w depth must equal T");
    const Index r = w.n2(), ss = g_agg.window;
    double acc = 0;
    for (Index k = 0; k < g_agg.layer_count; ++k) {
        auto agg = g_agg.agg_adjacency.slice(k);
        for (Index i = 0; i < g_agg.vertex_count; ++i) {
            for (Index j = i + 1; j < g_agg.vertex_count; ++j) {
                if (agg(i, j) == 0.0) continue;
                double d2 = 0;
                for (Index c = 0; c < r; ++c)
                    for (Index t = k * ss; t < (k + 1) * ss; ++t) {
                        const double d = w(i, c, t) - w(j, c, t);
                        d2 += d * d;
                    }
                acc += agg(i, j) * d2;  // both (i,j) and (j,i) halves
            }
        }
    }
    return acc;
}

DynamicGraph knn_similarity_graph(const std::vector<Eigen::MatrixXd>& features,
                                  Index k, Metric metric, Index T) {
    if (features.empty())
        throw std::invalid_argument("knn graph: features must be non-empty");
    const Index m = features.front().rows();
    if (k <= 0 || k >= m) throw std::invalid_argument("knn graph: require 0 < k < m");
    const Index periods = T > 0 ? T : static_cast<Index>(features.size());
    if (features.size() != 1 && static_cast<Index>(features.size()) != periods)
        throw std::invalid_argument("knn graph: one feature matrix per period expected");

    DynamicGraph g{m, periods, RTensor(m, m, periods)};
    for (Index t = 0; t < periods; ++t) {
        const Eigen::MatrixXd& f = features.size() == 1 ? features.front() : features[t];
        if (f.rows() != m)
            throw std::invalid_argument("knn graph: inconsistent vertex count");
        Eigen::MatrixXd dist(m, m);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) {
                if (metric == Metric::euclidean) {
                    dist(i, j) = (f.row(i) - f.row(j)).norm();
                } else {
                    const double den = f.row(i).norm() * f.row(j).norm();
                    dist(i, j) = den == 0.0 ? 1.0 : 1.0 - f.row(i).dot(f.row(j)) / den;
                }
            }
        if ((dist.array().abs() < 1e-15).all())
            std::cerr << "knn graph: degenerate features at period " << t
                      << ", neighbours chosen by index tie-break\n";
        for (Index i = 0; i < m; ++i) {
            std::vector<Index> order(m);
            std::iota(order.begin(), order.end(), Index(0));
            std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
                return dist(i, a) < dist(i, b);  // stable: ties keep lower index
            });
            Index taken = 0;
            for (Index idx : order) {
                if (idx == i) continue;
                g.adjacency(i, idx, t) = 1.0;
                g.adjacency(idx, i, t) = 1.0;
                if (++taken == k) break;
            }
        }
    }
    return g;
}

}  // namespace gtc
