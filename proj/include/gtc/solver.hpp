// ADMM solver for graph-regularized low-tubal-rank tensor completion.
//
// Minimizes 1/2 ||E - W *_M H^T||_F^2
//           + 1/2 (<L_W, A *_M A^T> + <L_H, B *_M B^T>)
// subject to A = W, B = H, P_Omega(E) = P_Omega(X),
// where L = lambda_g * LAP~ + lambda_1 * I combines the dynamic-graph
// Laplacian tensor with Tikhonov damping. Subproblems are independent
// per transform-domain slice.

#ifndef GTC_SOLVER_HPP
#define GTC_SOLVER_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gtc/dynamic_graph.hpp"
#include "gtc/tsvd.hpp"

namespace gtc {

struct Observation {
    Index i1, i2, i3;  // 0-based
    double value;
};

struct ObservedTensor {
    Index n1 = 0, n2 = 0, n3 = 0;
    std::vector<Observation> entries;

    void validate() const;  // range check, duplicate triples rejected
    double frobenius_norm() const;
    RTensor to_dense() const;  // zeros off the mask
};

enum class SolverTransform { dft, identity };

struct SolverConfig {
    Index rank = 5;
    double lambda_g = 0.001;
    double lambda_1 = 0.001;
    double beta = 1.0;
    double gamma = 1.0;
    Index ss = 0;  // 0 means ss = n3
    SolverTransform transform = SolverTransform::dft;
    double cg_tol = 1e-10;
    Index cg_max_iter = 1000;
    Index cg_direct_threshold = 64;  // direct SPD solve at or below this size
    Index max_iter = 500;
    double stop_tol = 1e-6;
    std::uint64_t seed = 0;

    void validate(Index n3) const;
};

struct Diagnostics {
    std::vector<double> objective;
    std::vector<double> aug_lagrangian;
    std::vector<double> res_w, res_h, res_e;
    std::vector<double> u_k;
    Index iterations = 0;
    bool converged = false;

    // One record per iteration: iter,F,res_w,res_h,res_e,u_k
    void write_csv(const std::string& path) const;
    std::string to_csv() const;
};

struct CgFailure : std::runtime_error {
    double last_residual;
    CgFailure(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
};

// Hermitian positive definite CG; returns iterations used.
Index hermitian_cg(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                   const Eigen::VectorXcd& b, Eigen::VectorXcd& x, double tol,
                   Index max_iter);

class AdmmSolver {
public:
    AdmmSolver(ObservedTensor observed, std::optional<DynamicGraph> g_w,
               std::optional<DynamicGraph> g_h, SolverConfig config);

    // One subproblem step each; run() calls them in algorithm order.
    void step_w();
    void step_h();
    void step_a();
    void step_b();
    void step_e();
    void step_multipliers();
    void iterate_once();

    std::pair<RTensor, Diagnostics> run();

    double objective() const;
    double aug_lagrangian() const;
    double residual_w() const;
    double residual_h() const;
    double residual_e() const;

    RTensor completed() const;  // W *_M H^T
    const Transform& transform() const { return *m_; }

    // Original-domain iterates (inverse-transformed on demand).
    RTensor w() const;
    RTensor h() const;
    RTensor a() const;
    RTensor b() const;
    RTensor e() const;
    RTensor mult_w() const;
    RTensor mult_h() const;

    // Transform-domain iterates (the stored representation).
    const CTensor& w_hat() const { return w_hat_; }
    const CTensor& h_hat() const { return h_hat_; }
    const CTensor& a_hat() const { return a_hat_; }
    const CTensor& b_hat() const { return b_hat_; }
    const CTensor& e_hat() const { return e_hat_; }
    const std::vector<double>& mult_e() const { return mult_e_; }

    // Test hooks: overwrite iterates from original-domain tensors.
    void set_w(const RTensor& w);
    void set_h(const RTensor& h);
    void set_a(const RTensor& a);
    void set_b(const RTensor& b);
    void set_e(const RTensor& e);
    void set_mult_w(const RTensor& lw);
    void set_mult_h(const RTensor& lh);
    void set_mult_e(const std::vector<double>& le);

    // Transform-domain slice of the combined Laplacian for either side.
    Eigen::MatrixXd l_w_hat_slice(Index t) const;
    Eigen::MatrixXd l_h_hat_slice(Index t) const;

    // Theorem-style conservative penalty bound.
    double beta_theory_bound() const;

private:
    void rebuild_factorizations();
    // Solve (l + beta I) X = rhs for one slice, direct or CG per config.
    Eigen::MatrixXcd solve_side_system(const Eigen::MatrixXd& l,
                                       const Eigen::LLT<Eigen::MatrixXd>& llt,
                                       const Eigen::MatrixXcd& rhs) const;
    CTensor product_wh_hat() const;
    // Values of the inverse-transformed tensor at the observed triples.
    std::vector<double> values_at_mask(const CTensor& hat) const;

    ObservedTensor observed_;
    SolverConfig cfg_;
    std::unique_ptr<Transform> m_;
    Index ss_;

    // lambda_g * LAP slices (without the lambda_1 diagonal); empty when no graph
    std::optional<LaplacianTensor> lap_w_, lap_h_;

    // per-slice Cholesky of (L_hat + beta I), reused across iterations
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_w_, llt_h_;

    // Representative slices: (t, mirror) pairs with mirror >= t when the
    // transform has conjugate-symmetric hats, (t, -1) otherwise. Step updates
    // compute only representatives and write conjugates to mirrors, which
    // halves the work and keeps the iterates exactly conjugate-symmetric.
    std::vector<std::pair<Index, Index>> slice_reps_;

    CTensor w_hat_, h_hat_, a_hat_, b_hat_;
    CTensor mult_w_hat_, mult_h_hat_;
    // E kept in the transform domain; its values on the observation mask are
    // mirrored in e_obs_ (off the mask E always equals the last W *_M H^T).
    CTensor e_hat_;
    std::vector<double> e_obs_;   // aligned with observed_.entries
    std::vector<double> mult_e_;  // aligned with observed_.entries
    Index iter_ = 0;
};

// Convenience wrapper: build, run, return completed tensor and diagnostics.
std::pair<RTensor, Diagnostics> solve(const ObservedTensor& observed,
                                      std::optional<DynamicGraph> g_w,
                                      std::optional<DynamicGraph> g_h,
                                      const SolverConfig& config);

}  // namespace gtc

#endif  // GTC_SOLVER_HPP
