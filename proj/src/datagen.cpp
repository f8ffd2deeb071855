#include "gtc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

namespace gtc {

void CommunityGraphSpec::validate() const {
    if (vertex_count <= 0 || communities <= 0 || communities > vertex_count)
        throw std::invalid_argument("CommunityGraphSpec: need 1 <= communities <= m");
    if (!(0.0 <= p_out && p_out < p_in && p_in <= 1.0))
        throw std::invalid_argument("CommunityGraphSpec: require 0 <= p_out < p_in <= 1");
    if (periods <= 0 || interval <= 0 || periods % interval != 0)
        throw std::invalid_argument("CommunityGraphSpec: interval must divide T");
}

DynamicGraph community_dynamic_graph(const CommunityGraphSpec& spec) {
    spec.validate();
    const Index m = spec.vertex_count, T = spec.periods;
    const Index group = (m + spec.communities - 1) / spec.communities;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    DynamicGraph g{m, T, RTensor(m, m, T)};
    for (Index block = 0; block < T / spec.interval; ++block) {
        const Index t0 = block * spec.interval;
        for (Index i = 0; i < m; ++i)
            for (Index j = i + 1; j < m; ++j) {
                const double p = (i / group == j / group) ? spec.p_in : spec.p_out;
                if (unif(rng) < p) {
                    g.adjacency(i, j, t0) = 1.0;
                    g.adjacency(j, i, t0) = 1.0;
                }
            }
        for (Index t = t0 + 1; t < t0 + spec.interval; ++t)
            g.adjacency.slice(t) = g.adjacency.slice(t0);
    }
    return g;
}

RTensor lowrank_tensor(Index m, Index n, Index T, Index r, const Transform& transform,
                       std::uint64_t seed) {
    if (r > std::min(m, n))
        throw std::invalid_argument("lowrank_tensor: r must be <= min(m, n)");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> randn(0.0, 1.0);
    RTensor p(m, r, T), q(n, r, T);
    for (Index i = 0; i < p.size(); ++i) p.data()[i] = randn(rng);
    for (Index i = 0; i < q.size(); ++i) q.data()[i] = randn(rng);
    return t_product(p, conj_transpose(q, transform), transform);
}

double lowpass_filter(double s) { return s > 0.0 ? 1.0 / (s * s) : 0.0; }

namespace {

// Slice-wise U g(S) U^T from the per-period Laplacians of g.
RTensor filtered_basis(const DynamicGraph& g) {
    LaplacianTensor lap = laplacian_tensor(g, 1);
    const Index m = g.vertex_count, T = g.period_count;
    RTensor out(m, m, T);
    for (Index t = 0; t < T; ++t) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap.laplacian.slice(t));
        const Eigen::VectorXd& ev = eig.eigenvalues();
        if (ev.cwiseAbs().maxCoeff() == 0.0) {
            // Zero Laplacian carries no graph information; the filter basis
            // degenerates to the identity rather than annihilating the data.
            out.slice(t) = Eigen::MatrixXd::Identity(m, m);
            continue;
        }
        const double floor = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
        Eigen::VectorXd filtered(m);
        for (Index i = 0; i < m; ++i)
            filtered(i) = ev(i) > floor ? lowpass_filter(ev(i)) : 0.0;
        out.slice(t) =
            eig.eigenvectors() * filtered.asDiagonal() * eig.eigenvectors().transpose();
    }
    return out;
}

RTensor identity_slices(Index m, Index T) {
    RTensor out(m, m, T);
    for (Index t = 0; t < T; ++t) out.slice(t) = Eigen::MatrixXd::Identity(m, m);
    return out;
}

}  // namespace

RTensor embed_graph_similarity(const RTensor& z, const DynamicGraph* g_w,
                               const DynamicGraph* g_h) {
    const Index T = z.n3();
    RTensor a = g_w ? filtered_basis(*g_w) : identity_slices(z.n1(), T);
    RTensor b = g_h ? filtered_basis(*g_h) : identity_slices(z.n2(), T);
    RTensor bt(b.n2(), b.n1(), T);
    for (Index t = 0; t < T; ++t) bt.slice(t) = b.slice(t).transpose();
    return star_product(star_product(a, z), bt);
}

DynamicGraph perturb_graph(const DynamicGraph& g, double level, std::uint64_t seed) {
    if (level < 0.0 || level > 1.0)
        throw std::invalid_argument("perturb_graph: level must be in [0, 1]");
    DynamicGraph out = g;
    if (level == 0.0) return out;
    const Index m = g.vertex_count;
    std::mt19937_64 rng(seed);
    for (Index t = 0; t < g.period_count; ++t) {
        std::vector<std::pair<Index, Index>> edges;
        for (Index i = 0; i < m; ++i)
            for (Index j = i + 1; j < m; ++j)
                if (out.adjacency(i, j, t) != 0.0) edges.emplace_back(i, j);
        const Index n_rewire =
            static_cast<Index>(std::llround(level * static_cast<double>(edges.size())));
        if (n_rewire == 0) continue;
        std::shuffle(edges.begin(), edges.end(), rng);
        std::uniform_int_distribution<Index> pick(0, m - 1);
        for (Index k = 0; k < n_rewire; ++k) {
            auto [i, j] = edges[k];
            out.adjacency(i, j, t) = 0.0;
            out.adjacency(j, i, t) = 0.0;
            // draw a fresh non-edge
            for (;;) {
                Index a = pick(rng), b = pick(rng);
                if (a == b || out.adjacency(a, b, t) != 0.0) continue;
                out.adjacency(a, b, t) = 1.0;
                out.adjacency(b, a, t) = 1.0;
                break;
            }
        }
    }
    return out;
}

ObservedTensor sample_observations(const RTensor& x, const ObservationModel& model) {
    const Index total = x.size();
    Index n = model.count > 0
                  ? model.count
                  : static_cast<Index>(model.sample_ratio * static_cast<double>(total));
    if (model.count == 0 && (model.sample_ratio <= 0.0 || model.sample_ratio > 1.0))
        throw std::invalid_argument("sample_observations: ratio must be in (0, 1]");
    if (n <= 0) throw std::invalid_argument("sample_observations: zero samples");
    if (model.sigma < 0.0)
        throw std::invalid_argument("sample_observations: sigma must be >= 0");

    std::mt19937_64 rng(model.seed);
    std::normal_distribution<double> randn(0.0, 1.0);
    ObservedTensor obs{x.n1(), x.n2(), x.n3(), {}};

    auto noisy = [&](Index lin) {
        double v = x.data()[lin];
        if (model.noise_kind == NoiseKind::gaussian && model.sigma > 0.0)
            v += model.sigma * randn(rng);
        return v;
    };
    auto unflatten = [&](Index lin) {
        const Index i1 = lin % x.n1();
        const Index i2 = (lin / x.n1()) % x.n2();
        const Index i3 = lin / (x.n1() * x.n2());
        return Observation{i1, i2, i3, 0.0};
    };

    if (model.with_replacement) {
        // i.i.d. draws; repeated triples are collapsed to their mean so the
        // observation set stays a valid mask.
        std::uniform_int_distribution<Index> pick(0, total - 1);
        std::unordered_map<Index, std::pair<double, Index>> acc;
        for (Index k = 0; k < n; ++k) {
            const Index lin = pick(rng);
            auto& [sum, cnt] = acc[lin];
            sum += noisy(lin);
            ++cnt;
        }
        obs.entries.reserve(acc.size());
        for (const auto& [lin, sc] : acc) {
            Observation o = unflatten(lin);
            o.value = sc.first / static_cast<double>(sc.second);
            obs.entries.push_back(o);
        }
    } else {
        if (n > total) throw std::invalid_argument("sample_observations: N > entries");
        std::vector<Index> idx(total);
        std::iota(idx.begin(), idx.end(), Index(0));
        for (Index k = 0; k < n; ++k) {
            std::uniform_int_distribution<Index> pick(k, total - 1);
            std::swap(idx[k], idx[pick(rng)]);
        }
        obs.entries.reserve(n);
        for (Index k = 0; k < n; ++k) {
            Observation o = unflatten(idx[k]);
            o.value = noisy(idx[k]);
            obs.entries.push_back(o);
        }
    }
    obs.validate();
    return obs;
}

std::vector<Observation> test_entries(const RTensor& x, const ObservedTensor& obs) {
    std::vector<char> mask(static_cast<size_t>(x.size()), 0);
    for (const Observation& o : obs.entries)
        mask[static_cast<size_t>(o.i1 + x.n1() * (o.i2 + x.n2() * o.i3))] = 1;
    std::vector<Observation> out;
    for (Index lin = 0; lin < x.size(); ++lin) {
        if (mask[static_cast<size_t>(lin)]) continue;
        const Index i1 = lin % x.n1();
        const Index i2 = (lin / x.n1()) % x.n2();
        const Index i3 = lin / (x.n1() * x.n2());
        out.push_back({i1, i2, i3, x.data()[lin]});
    }
    return out;
}

}  // namespace gtc
