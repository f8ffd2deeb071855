#include "gtc/theory.hpp"

#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gtc {

namespace {

RTensor identity_hat(Index n, Index n3) {
    RTensor out(n, n, n3);
    for (Index t = 0; t < n3; ++t) out.slice(t) = Eigen::MatrixXd::Identity(n, n);
    return out;
}

// One side of the pair: hat slices of U S^{-1/2} and S^{1/2} U^T.
void side_from_laplacian(const LaplacianTensor* lap, double lambda_g, double lambda_1,
                         Index n, Index n3, double floor_rel, RTensor& a_hat,
                         RTensor& a_inv_hat) {
    a_hat = RTensor(n, n, n3);
    a_inv_hat = RTensor(n, n, n3);
    for (Index t = 0; t < n3; ++t) {
        Eigen::MatrixXd l = lap ? Eigen::MatrixXd(lambda_g * lap->laplacian.slice(t))
                                : Eigen::MatrixXd::Zero(n, n);
        l.diagonal().array() += lambda_1;
        const double asym = (l - l.transpose()).norm();
        if (asym > 1e-10 * std::max(1.0, l.norm()))
            throw std::invalid_argument("weight pair: Laplacian slice not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(l);
        Eigen::VectorXd ev = eig.eigenvalues();
        const double floor = floor_rel * std::max(1.0, ev.maxCoeff());
        ev = ev.cwiseMax(floor);
        const Eigen::MatrixXd& u = eig.eigenvectors();
        a_hat.slice(t) = u * ev.cwiseSqrt().cwiseInverse().asDiagonal();
        a_inv_hat.slice(t) = ev.cwiseSqrt().asDiagonal() * u.transpose();
    }
}

bool is_zero_laplacian(const LaplacianTensor* lap) {
    return lap == nullptr || lap->laplacian.frobenius_norm() == 0.0;
}

CTensor weighted_hat(const RTensor& x, const WeightPair& pair, bool inverse) {
    const Transform& m = *pair.transform;
    CTensor x_hat = m.to_hat(x);
    CTensor y(x.n1(), x.n2(), x.n3());
    for (Index t = 0; t < x.n3(); ++t) {
        if (inverse)  // A^{-1} X B^{-T}
            y.slice(t) = pair.a_inv_hat.slice(t) * x_hat.slice(t) *
                         pair.b_inv_hat.slice(t).transpose();
        else  // A^T X B
            y.slice(t) =
                pair.a_hat.slice(t).transpose() * x_hat.slice(t) * pair.b_hat.slice(t);
    }
    return y;
}

}  // namespace

WeightPair WeightPair::identities(Index n1, Index n2, const Transform& m) {
    WeightPair p;
    p.a_hat = identity_hat(n1, m.size());
    p.a_inv_hat = p.a_hat;
    p.b_hat = identity_hat(n2, m.size());
    p.b_inv_hat = p.b_hat;
    p.transform = &m;
    return p;
}

WeightPair weight_pair_from_laplacians(const LaplacianTensor* l_w,
                                       const LaplacianTensor* l_h, double lambda_g,
                                       double lambda_1, const Transform& m,
                                       double floor_rel) {
    if (lambda_1 <= 0)
        throw std::invalid_argument("weight pair: lambda_1 must be positive");
    WeightPair p;
    p.transform = &m;
    const Index n3 = m.size();
    auto build = [&](const LaplacianTensor* lap, Index n, RTensor& a, RTensor& ai) {
        side_from_laplacian(is_zero_laplacian(lap) ? nullptr : lap, lambda_g, lambda_1,
                            n, n3, floor_rel, a, ai);
    };
    if (l_w == nullptr && l_h == nullptr)
        throw std::invalid_argument("weight pair: at least one Laplacian required");
    const Index n1 = l_w ? l_w->laplacian.n1() : l_h->laplacian.n1();
    const Index n2 = l_h ? l_h->laplacian.n1() : l_w->laplacian.n1();
    build(l_w, n1, p.a_hat, p.a_inv_hat);
    build(l_h, n2, p.b_hat, p.b_inv_hat);
    return p;
}

double weighted_nuclear_norm(const RTensor& x, const WeightPair& pair) {
    CTensor y = weighted_hat(x, pair, true);
    double s = 0;
    for (Index t = 0; t < y.n3(); ++t) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(y.slice(t));
        s += svd.singularValues().sum();
    }
    return s / pair.transform->scale();
}

double weighted_spectral_norm(const RTensor& x, const WeightPair& pair) {
    CTensor y = weighted_hat(x, pair, false);
    double s = 0;
    for (Index t = 0; t < y.n3(); ++t) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(y.slice(t));
        s = std::max(s, svd.singularValues()(0));
    }
    return s;
}

double regularizer_weighted_frobenius_check(const RTensor& w, const LaplacianTensor* l_w,
                                            double lambda_g, double lambda_1,
                                            const WeightPair& pair) {
    const Transform& m = *pair.transform;
    CTensor w_hat = m.to_hat(w);
    double lhs = 0, rhs = 0;
    for (Index t = 0; t < m.size(); ++t) {
        Eigen::MatrixXd l = l_w ? Eigen::MatrixXd(lambda_g * l_w->laplacian.slice(t))
                                : Eigen::MatrixXd::Zero(w.n1(), w.n1());
        l.diagonal().array() += lambda_1;
        const auto ws = w_hat.slice(t);
        lhs += (ws.adjoint() * l * ws).trace().real();
        rhs += (pair.a_inv_hat.slice(t) * ws).squaredNorm();
    }
    return std::abs(lhs - rhs) / m.scale();
}

FactorizationBoundReport factorization_bound_check(const RTensor& x,
                                                   const WeightPair& pair, Index rank,
                                                   Index trials, std::uint64_t seed,
                                                   double tol) {
    const Transform& m = *pair.transform;
    const Index n3 = m.size();
    const double c = m.scale();
    FactorizationBoundReport rep;
    rep.weighted_nuclear = weighted_nuclear_norm(x, pair);

    // balanced factorization from the weighted t-SVD:
    //   W = A * U * S^{1/2}, H = B * V * S^{1/2}
    CTensor y = weighted_hat(x, pair, true);
    CTensor w_hat(x.n1(), rank, n3), h_hat(x.n2(), rank, n3);
    for (Index t = 0; t < n3; ++t) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(y.slice(t),
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Index k = std::min<Index>(rank, svd.singularValues().size());
        Eigen::VectorXd shalf = svd.singularValues().head(k).cwiseSqrt();
        w_hat.slice(t).leftCols(k) =
            pair.a_hat.slice(t) * svd.matrixU().leftCols(k) * shalf.asDiagonal();
        h_hat.slice(t).leftCols(k) =
            pair.b_hat.slice(t) * svd.matrixV().leftCols(k) * shalf.asDiagonal();
    }
    auto pair_value = [&](const CTensor& wh, const CTensor& hh) {
        double s = 0;
        for (Index t = 0; t < n3; ++t) {
            s += (pair.a_inv_hat.slice(t) * wh.slice(t)).squaredNorm();
            s += (pair.b_inv_hat.slice(t) * hh.slice(t)).squaredNorm();
        }
        return 0.5 * s / c;
    };
    const double attained = pair_value(w_hat, h_hat);
    rep.attained_rel_err =
        std::abs(attained - rep.weighted_nuclear) / (1.0 + rep.weighted_nuclear);

    // random reparameterizations W G, H G^{-H} keep the product fixed
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> randn(0.0, 1.0);
    double worst = 0;
    for (Index trial = 0; trial < trials; ++trial) {
        CTensor wg(x.n1(), rank, n3), hg(x.n2(), rank, n3);
        for (Index t = 0; t < n3; ++t) {
            Eigen::MatrixXcd g(rank, rank);
            for (Index i = 0; i < rank; ++i)
                for (Index j = 0; j < rank; ++j)
                    g(i, j) = std::complex<double>(randn(rng), randn(rng));
            g += 0.5 * Eigen::MatrixXcd::Identity(rank, rank);  // keep well-conditioned
            wg.slice(t) = w_hat.slice(t) * g;
            hg.slice(t) = h_hat.slice(t) * g.inverse().adjoint();
        }
        worst = std::max(worst, rep.weighted_nuclear - pair_value(wg, hg));
    }
    rep.worst_lower_gap = worst;
    rep.ok = rep.attained_rel_err <= tol && worst <= tol * (1.0 + rep.weighted_nuclear);
    return rep;
}

AlphaMeasure alpha_measure(const RTensor& x_true, const WeightPair& pair) {
    AlphaMeasure a;
    a.alpha_star = x_true.inf_norm();
    CTensor y = pair.transform->from_hat_complex(weighted_hat(x_true, pair, true));
    a.alpha = y.inf_norm();
    return a;
}

ScalingReport error_scaling_experiment(const ScalingConfig& cfg) {
    ScalingReport rep;
    const double total = static_cast<double>(cfg.m * cfg.n * cfg.T);
    for (Index n_obs : cfg.n_grid) {
        std::vector<double> errs;
        for (Index s = 0; s < cfg.seeds; ++s) {
            const std::uint64_t seed = cfg.base_seed + 1000 * s;
            Transform m = Transform::dft(cfg.T);
            RTensor x = lowrank_tensor(cfg.m, cfg.n, cfg.T, cfg.rank, m, seed);
            ObservationModel om;
            om.count = n_obs;
            om.sigma = cfg.sigma;
            om.with_replacement = cfg.with_replacement;
            om.seed = seed + 1;
            ObservedTensor obs = sample_observations(x, om);
            SolverConfig sc = cfg.solver;
            sc.rank = cfg.rank;
            sc.lambda_g = 0.0;
            sc.ss = 0;
            sc.seed = seed + 2;
            auto [xhat, diag] = solve(obs, std::nullopt, std::nullopt, sc);
            double err = 0;
            for (Index i = 0; i < x.size(); ++i) {
                const double d = xhat.data()[i] - x.data()[i];
                err += d * d;
            }
            errs.push_back(err / total);
        }
        std::sort(errs.begin(), errs.end());
        rep.rows.push_back({n_obs, errs[errs.size() / 2]});
    }
    // least squares slope of log(err) on log(N)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rep.rows.size());
    for (const ScalingRow& r : rep.rows) {
        const double lx = std::log(static_cast<double>(r.n_observations));
        const double ly = std::log(r.per_entry_sq_error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

}  // namespace gtc
