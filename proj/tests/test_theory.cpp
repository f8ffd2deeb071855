// Weighted-norm theory probes: weight construction from Laplacians, the
// regularizer / weighted-Frobenius identity, the factorization bound, norm
// duality, the alpha complexity measure, and the error-scaling experiment.

#include <doctest.h>

#include <random>

#include "gtc/theory.hpp"

using namespace gtc;

namespace {

RTensor random_tensor(Index n1, Index n2, Index n3, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> randn(0.0, 1.0);
    RTensor x(n1, n2, n3);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = randn(rng);
    return x;
}

DynamicGraph random_graph(Index m, Index T, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution edge(density);
    std::vector<EdgeEvent> events;
    for (Index t = 0; t < T; ++t)
        for (Index i = 0; i < m; ++i)
            for (Index j = i + 1; j < m; ++j)
                if (edge(rng)) events.push_back({i, j, t});
    return from_edge_events(events, m, T);
}

WeightPair random_weights(Index n1, Index n2, Index T, const Transform& m,
                          std::uint64_t seed) {
    DynamicGraph g_w = random_graph(n1, T, 0.4, seed);
    DynamicGraph g_h = random_graph(n2, T, 0.4, seed + 1);
    LaplacianTensor l_w = laplacian_tensor(g_w, m.block_size());
    LaplacianTensor l_h = laplacian_tensor(g_h, m.block_size());
    return weight_pair_from_laplacians(&l_w, &l_h, 0.5, 0.2, m);
}

}  // namespace

TEST_CASE("weight pair: identity convention and definitional round trips") {
    Transform m = Transform::dft(4);
    WeightPair ident = WeightPair::identities(5, 4, m);
    for (Index t = 0; t < 4; ++t) {
        CHECK((Eigen::MatrixXd(ident.a_hat.slice(t)) -
               Eigen::MatrixXd::Identity(5, 5))
                  .norm() == 0.0);
        CHECK((Eigen::MatrixXd(ident.b_inv_hat.slice(t)) -
               Eigen::MatrixXd::Identity(4, 4))
                  .norm() == 0.0);
    }

    // zero Laplacian with lambda_1 = 1 degenerates to the identity weights
    DynamicGraph edgeless5 = from_edge_events({}, 5, 4);
    LaplacianTensor zl = laplacian_tensor(edgeless5, 4);
    WeightPair zero = weight_pair_from_laplacians(&zl, nullptr, 0.7, 1.0, m);
    for (Index t = 0; t < 4; ++t)
        CHECK((Eigen::MatrixXd(zero.a_hat.slice(t)) -
               Eigen::MatrixXd::Identity(5, 5))
                  .norm() <= 1e-12);
    RTensor probe = random_tensor(5, 4, 4, 1);
    CHECK(weighted_nuclear_norm(probe, zero) ==
          doctest::Approx(weighted_nuclear_norm(probe, ident)).epsilon(1e-12));

    // A_hat * A_inv_hat = I per slice, and A^{-T} A^{-1} recovers L_hat
    DynamicGraph g_w = random_graph(6, 4, 0.5, 3);
    DynamicGraph g_h = random_graph(5, 4, 0.5, 4);
    LaplacianTensor l_w = laplacian_tensor(g_w, 4);
    LaplacianTensor l_h = laplacian_tensor(g_h, 4);
    const double lg = 0.3, l1 = 0.1;
    WeightPair pair = weight_pair_from_laplacians(&l_w, &l_h, lg, l1, m);
    for (Index t = 0; t < 4; ++t) {
        Eigen::MatrixXd a = pair.a_hat.slice(t);
        Eigen::MatrixXd ai = pair.a_inv_hat.slice(t);
        CHECK((a * ai - Eigen::MatrixXd::Identity(6, 6)).norm() <= 1e-8);
        Eigen::MatrixXd l_hat = combined_hat_slice(l_w, t, lg, l1);
        CHECK((ai.transpose() * ai - l_hat).norm() <= 1e-8 * (1.0 + l_hat.norm()));
    }

    CHECK_THROWS_AS(weight_pair_from_laplacians(&l_w, &l_h, lg, 0.0, m),
                    std::invalid_argument);
}

TEST_CASE("weight pair: diagonal slice oracle") {
    // A combined slice diag(1,4) must give A_hat = diag(1, 1/2) up to
    // column order and sign. Build it from a 2-vertex static graph scaled so
    // lambda_g * LAP + lambda_1 * I = diag(...) is not possible exactly (LAP
    // has zero row sums), so use the zero graph and check eigenvalue scaling:
    // L = lambda_1 * I has A_hat = lambda_1^{-1/2} * I.
    Transform m = Transform::identity(2);
    DynamicGraph edgeless = from_edge_events({}, 2, 2);
    LaplacianTensor l = laplacian_tensor(edgeless, 1);
    WeightPair pair = weight_pair_from_laplacians(&l, &l, 0.5, 4.0, m);
    for (Index t = 0; t < 2; ++t)
        CHECK((Eigen::MatrixXd(pair.a_hat.slice(t)) -
               0.5 * Eigen::MatrixXd::Identity(2, 2))
                  .norm() <= 1e-12);

    // one edge at each period: combined slice = lambda_1 I + lambda_g (D - A),
    // eigenvalues lambda_1 and lambda_1 + 2 lambda_g
    DynamicGraph one = from_edge_events({{0, 1, 0}, {0, 1, 1}}, 2, 2);
    LaplacianTensor l2 = laplacian_tensor(one, 1);
    WeightPair p2 = weight_pair_from_laplacians(&l2, &l2, 1.5, 1.0, m);
    for (Index t = 0; t < 2; ++t) {
        Eigen::MatrixXd prod = Eigen::MatrixXd(p2.a_hat.slice(t)) *
                               Eigen::MatrixXd(p2.a_hat.slice(t)).transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(prod);
        CHECK(eig.eigenvalues()(0) == doctest::Approx(1.0 / 4.0).epsilon(1e-10));
        CHECK(eig.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("weighted nuclear norm: identity pair, zero input, slice oracle") {
    Transform m = Transform::dft(4);
    RTensor x = random_tensor(6, 5, 4, 11);
    WeightPair ident = WeightPair::identities(6, 5, m);
    CHECK(weighted_nuclear_norm(x, ident) ==
          doctest::Approx(tensor_nuclear_norm(x, m)).epsilon(1e-10));
    CHECK(weighted_nuclear_norm(RTensor(6, 5, 4), ident) == 0.0);

    WeightPair pair = random_weights(6, 5, 4, m, 12);
    CTensor x_hat = m.to_hat(x);
    double want = 0;
    for (Index t = 0; t < 4; ++t) {
        Eigen::MatrixXcd z = Eigen::MatrixXd(pair.a_inv_hat.slice(t)) *
                             x_hat.slice(t) *
                             Eigen::MatrixXd(pair.b_inv_hat.slice(t)).transpose();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(z);
        want += svd.singularValues().sum();
    }
    want /= m.scale();
    CHECK(weighted_nuclear_norm(x, pair) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("regularizer equals the weighted Frobenius norm") {
    std::mt19937_64 seeds(21);
    for (int rep = 0; rep < 100; ++rep) {
        const Index T = 8;
        const Index ss = std::vector<Index>{1, 2, 4, 8}[rep % 4];
        Transform m = Transform::block_dft(T, ss);
        DynamicGraph g = random_graph(6, T, 0.4, seeds());
        LaplacianTensor l = laplacian_tensor(g, ss);
        RTensor w = random_tensor(6, 3, T, seeds());
        const double lg = 0.4, l1 = 0.15;
        WeightPair pair = weight_pair_from_laplacians(&l, nullptr, lg, l1, m);
        const double dev = regularizer_weighted_frobenius_check(w, &l, lg, l1, pair);
        // scale of the regularizer itself for the relative comparison
        const double value = lg * smoothness_analytic(l, w, m) +
                             l1 * w.frobenius_norm() * w.frobenius_norm();
        CHECK(dev <= 1e-8 * (1.0 + value));
    }

    // w = 0 and identity L give exactly zero deviation
    Transform m = Transform::dft(4);
    WeightPair ident = WeightPair::identities(6, 5, m);
    CHECK(regularizer_weighted_frobenius_check(RTensor(6, 3, 4), nullptr, 0.0, 1.0,
                                               ident) <= 1e-14);
    RTensor w = random_tensor(6, 3, 4, 22);
    CHECK(regularizer_weighted_frobenius_check(w, nullptr, 0.0, 1.0, ident) <=
          1e-9 * (1.0 + w.frobenius_norm() * w.frobenius_norm()));
}

TEST_CASE("factorization bound: matrix case, random weights, homogeneity") {
    // classical matrix identity: ||x||_* = min (||W||^2 + ||H||^2)/2
    {
        Transform m1 = Transform::identity(1);
        RTensor x = random_tensor(5, 4, 1, 31);
        WeightPair ident = WeightPair::identities(5, 4, m1);
        FactorizationBoundReport rep =
            factorization_bound_check(x, ident, 4, 200, 32);
        CHECK(rep.ok);
        CHECK(rep.weighted_nuclear ==
              doctest::Approx(tensor_nuclear_norm(x, m1)).epsilon(1e-10));
        CHECK(rep.attained_rel_err <= 1e-6);
        CHECK(rep.worst_lower_gap <= 1e-6);
    }

    Transform m = Transform::dft(4);
    RTensor p = random_tensor(8, 3, 4, 33);
    RTensor q = random_tensor(7, 3, 4, 34);
    RTensor x = t_product(p, conj_transpose(q, m), m);
    WeightPair pair = random_weights(8, 7, 4, m, 35);
    FactorizationBoundReport rep = factorization_bound_check(x, pair, 3, 200, 36);
    CHECK(rep.ok);
    CHECK(rep.attained_rel_err <= 1e-6);
    CHECK(rep.worst_lower_gap <= 1e-6);

    RTensor x2 = x;
    for (Index i = 0; i < x2.size(); ++i) x2.data()[i] *= 2.0;
    FactorizationBoundReport rep2 = factorization_bound_check(x2, pair, 3, 50, 37);
    CHECK(rep2.weighted_nuclear ==
          doctest::Approx(2.0 * rep.weighted_nuclear).epsilon(1e-9));
    CHECK(rep2.ok);
}

TEST_CASE("weighted nuclear/spectral duality with an aligned pair") {
    // real orthogonal blocks keep every hat slice real, so the aligned dual
    // witness can be assembled slice-wise and mapped back exactly
    Eigen::MatrixXd rot(2, 2);
    rot << std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4);
    Transform m = Transform::block_orthogonal(4, rot);
    WeightPair pair = random_weights(6, 5, 4, m, 41);

    std::mt19937_64 seeds(42);
    for (int rep = 0; rep < 50; ++rep) {
        RTensor x = random_tensor(6, 5, 4, seeds());
        RTensor y = random_tensor(6, 5, 4, seeds());
        CHECK(inner(x, y) <= weighted_nuclear_norm(x, pair) *
                                     weighted_spectral_norm(y, pair) +
                                 1e-8);
    }

    RTensor x = random_tensor(6, 5, 4, 43);
    CTensor x_hat = m.to_hat(x);
    CTensor y_hat(6, 5, 4);
    for (Index t = 0; t < 4; ++t) {
        Eigen::MatrixXd ai = pair.a_inv_hat.slice(t);
        Eigen::MatrixXd bi = pair.b_inv_hat.slice(t);
        Eigen::MatrixXd z = ai * x_hat.slice(t).real() * bi.transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            z, Eigen::ComputeThinU | Eigen::ComputeThinV);
        // A^T y B = U V^T  =>  y = A^{-T} U V^T B^{-1}
        y_hat.slice(t) = (ai.transpose() * svd.matrixU() *
                          svd.matrixV().transpose() * bi)
                             .cast<std::complex<double>>();
    }
    RTensor y = m.from_hat(y_hat);
    const double lhs = inner(x, y);
    const double rhs =
        weighted_nuclear_norm(x, pair) * weighted_spectral_norm(y, pair);
    CHECK(lhs / rhs >= 0.999);
}

TEST_CASE("alpha measure: identity pair and zero input") {
    Transform m = Transform::dft(4);
    RTensor x = random_tensor(6, 5, 4, 51);
    WeightPair ident = WeightPair::identities(6, 5, m);
    AlphaMeasure a = alpha_measure(x, ident);
    CHECK(a.alpha == doctest::Approx(x.inf_norm()).epsilon(1e-10));
    CHECK(a.alpha_star == x.inf_norm());
    AlphaMeasure z = alpha_measure(RTensor(6, 5, 4), ident);
    CHECK(z.alpha == 0.0);
    CHECK(z.alpha_star == 0.0);
}

TEST_CASE("error scaling: more observations reduce per-entry error") {
    ScalingConfig cfg;
    cfg.m = 20;
    cfg.n = 20;
    cfg.T = 4;
    cfg.rank = 2;
    cfg.n_grid = {500, 1000};
    cfg.sigma = 1.0;
    cfg.seeds = 5;
    cfg.solver.max_iter = 300;
    ScalingReport rep = error_scaling_experiment(cfg);
    REQUIRE(rep.rows.size() == 2);
    // doubling N reduces the per-entry squared error decisively; the
    // calibrated [-1.3, -0.7] slope band is checked at the preset grid in
    // the acceptance suite, this small instance only probes the direction
    const double ratio = rep.rows[1].per_entry_sq_error / rep.rows[0].per_entry_sq_error;
    CHECK(rep.rows[0].per_entry_sq_error > 0.0);
    CHECK(ratio < 0.7);
    CHECK(rep.slope < -0.5);

    // sigma scaling at fixed N: error^2 grows with sigma^2 up to constants
    ScalingConfig c1 = cfg;
    c1.n_grid = {800};
    c1.seeds = 3;
    ScalingConfig c2 = c1;
    c2.sigma = 2.0;
    const double e1 = error_scaling_experiment(c1).rows[0].per_entry_sq_error;
    const double e2 = error_scaling_experiment(c2).rows[0].per_entry_sq_error;
    CHECK(e2 / e1 >= 1.5);
    CHECK(e2 / e1 <= 8.0);
}
