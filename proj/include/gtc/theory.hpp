// Numerical probes of the regularizer / weighted-nuclear-norm equivalence,
// the factorization characterization of the weighted atomic norm, the
// graph complexity measure alpha, and the error-scaling trend.

#ifndef GTC_THEORY_HPP
#define GTC_THEORY_HPP

#include "gtc/datagen.hpp"

namespace gtc {

// Weight tensors A = U S^{-1/2}, B likewise, derived from the combined
// Laplacians. Slices are kept in the transform domain, where they are real.
struct WeightPair {
    RTensor a_hat, a_inv_hat;  // n1 x n1 x n3
    RTensor b_hat, b_inv_hat;  // n2 x n2 x n3
    const Transform* transform = nullptr;

    static WeightPair identities(Index n1, Index n2, const Transform& m);
};

// Per slice: eigendecompose lambda_g * LAP + lambda_1 * I and form U S^{-1/2}.
// A null/zero Laplacian falls back to the lambda_1-scaled identity (the plain
// identity when lambda_1 = 1). Eigenvalues below floor_rel * max are clamped.
WeightPair weight_pair_from_laplacians(const LaplacianTensor* l_w,
                                       const LaplacianTensor* l_h, double lambda_g,
                                       double lambda_1, const Transform& m,
                                       double floor_rel = 1e-12);

// ||A^{-1} *_M x *_M B^{-T}||_*
double weighted_nuclear_norm(const RTensor& x, const WeightPair& pair);

// ||A^T *_M x *_M B|| (the dual of the weighted nuclear norm)
double weighted_spectral_norm(const RTensor& x, const WeightPair& pair);

// | <L_W, w *_M w^T> - ||A^{-1} *_M w||_F^2 |
double regularizer_weighted_frobenius_check(const RTensor& w, const LaplacianTensor* l_w,
                                            double lambda_g, double lambda_1,
                                            const WeightPair& pair);

struct FactorizationBoundReport {
    double weighted_nuclear = 0;
    double worst_lower_gap = 0;   // max over trials of (wnn - factor value), <= tol
    double attained_rel_err = 0;  // |balanced value - wnn| / (1 + wnn)
    bool ok = false;
};

// Checks that random factorizations of x never beat the weighted nuclear norm
// and that the balanced factorization from the weighted t-SVD attains it.
FactorizationBoundReport factorization_bound_check(const RTensor& x,
                                                   const WeightPair& pair, Index rank,
                                                   Index trials, std::uint64_t seed,
                                                   double tol = 1e-6);

struct AlphaMeasure {
    double alpha = 0;       // ||A^{-1} *_M x *_M B^{-T}||_inf
    double alpha_star = 0;  // ||x||_inf
};

AlphaMeasure alpha_measure(const RTensor& x_true, const WeightPair& pair);

struct ScalingRow {
    Index n_observations = 0;
    double per_entry_sq_error = 0;  // median over seeds
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double slope = 0;  // least-squares slope of log err^2 vs log N
};

struct ScalingConfig {
    Index m = 40, n = 40, T = 8, rank = 2;
    std::vector<Index> n_grid = {8000, 16000, 32000};
    double sigma = 1.0;
    Index seeds = 3;
    std::uint64_t base_seed = 7;
    bool with_replacement = false;
    SolverConfig solver;
};

ScalingReport error_scaling_experiment(const ScalingConfig& cfg);

}  // namespace gtc

#endif  // GTC_THEORY_HPP
