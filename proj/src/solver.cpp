#include "gtc/solver.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace gtc {

void ObservedTensor::validate() const {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0)
        throw std::invalid_argument("ObservedTensor: dimensions must be positive");
    if (entries.empty()) throw std::invalid_argument("no observations");
    std::set<std::tuple<Index, Index, Index>> seen;
    for (const Observation& o : entries) {
        if (o.i1 < 0 || o.i1 >= n1 || o.i2 < 0 || o.i2 >= n2 || o.i3 < 0 || o.i3 >= n3)
            throw std::invalid_argument("ObservedTensor: index out of range");
        if (!seen.insert({o.i1, o.i2, o.i3}).second)
            throw std::invalid_argument("ObservedTensor: duplicate index triple");
    }
}

double ObservedTensor::frobenius_norm() const {
    double s = 0;
    for (const Observation& o : entries) s += o.value * o.value;
    return std::sqrt(s);
}

RTensor ObservedTensor::to_dense() const {
    RTensor x(n1, n2, n3);
    for (const Observation& o : entries) x(o.i1, o.i2, o.i3) = o.value;
    return x;
}

void SolverConfig::validate(Index n3) const {
    if (rank < 1) throw std::invalid_argument("SolverConfig: rank must be >= 1");
    if (beta <= 0) throw std::invalid_argument("SolverConfig: beta must be positive");
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    if (gamma <= 0 || gamma > golden)
        throw std::invalid_argument("SolverConfig: gamma must be in (0, (1+sqrt(5))/2]");
    const Index s = ss == 0 ? n3 : ss;
    if (s <= 0 || n3 % s != 0)
        throw std::invalid_argument("SolverConfig: ss must divide n3");
    if (cg_tol <= 0 || stop_tol <= 0)
        throw std::invalid_argument("SolverConfig: tolerances must be positive");
    if (max_iter < 1 || cg_max_iter < 1)
        throw std::invalid_argument("SolverConfig: iteration limits must be >= 1");
}

std::string Diagnostics::to_csv() const {
    std::ostringstream out;
    out << "iter,F,res_w,res_h,res_e,u_k\n";
    out.precision(17);
    for (Index k = 0; k < iterations; ++k)
        out << k + 1 << ',' << objective[k] << ',' << res_w[k] << ',' << res_h[k]
            << ',' << res_e[k] << ',' << u_k[k] << '\n';
    return out.str();
}

void Diagnostics::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open diagnostics file: " + path);
    f << to_csv();
}

Index hermitian_cg(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                   const Eigen::VectorXcd& b, Eigen::VectorXcd& x, double tol,
                   Index max_iter) {
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        x.setZero();
        return 0;
    }
    Eigen::VectorXcd r = b - apply(x);
    Eigen::VectorXcd p = r;
    double rs = r.squaredNorm();
    for (Index it = 0; it < max_iter; ++it) {
        if (std::sqrt(rs) <= tol * bnorm) return it;
        Eigen::VectorXcd q = apply(p);
        const double alpha = rs / p.dot(q).real();
        x += alpha * p;
        r -= alpha * q;
        const double rs_new = r.squaredNorm();
        p = r + (rs_new / rs) * p;
        rs = rs_new;
    }
    if (std::sqrt(rs) <= tol * bnorm) return max_iter;
    throw CgFailure("conjugate gradient did not converge", std::sqrt(rs) / bnorm);
}

namespace {

// Solve X G = rhs for Hermitian positive definite G (direct or CG).
Eigen::MatrixXcd solve_right_hermitian(const Eigen::MatrixXcd& g,
                                       const Eigen::MatrixXcd& rhs,
                                       const SolverConfig& cfg) {
    if (g.rows() <= cfg.cg_direct_threshold) {
        Eigen::LLT<Eigen::MatrixXcd> llt(g);
        return llt.solve(rhs.adjoint()).adjoint();
    }
    Eigen::MatrixXcd xa(g.rows(), rhs.rows());
    auto apply = [&](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(g * v); };
    for (Index c = 0; c < rhs.rows(); ++c) {
        Eigen::VectorXcd col = Eigen::VectorXcd::Zero(g.rows());
        hermitian_cg(apply, rhs.row(c).adjoint(), col, cfg.cg_tol, cfg.cg_max_iter);
        xa.col(c) = col;
    }
    return xa.adjoint();
}

}  // namespace

AdmmSolver::AdmmSolver(ObservedTensor observed, std::optional<DynamicGraph> g_w,
                       std::optional<DynamicGraph> g_h, SolverConfig config)
    : observed_(std::move(observed)), cfg_(config) {
    observed_.validate();
    cfg_.validate(observed_.n3);
    const Index n1 = observed_.n1, n2 = observed_.n2, n3 = observed_.n3;
    ss_ = cfg_.ss == 0 ? n3 : cfg_.ss;
    m_ = std::make_unique<Transform>(cfg_.transform == SolverTransform::identity
                                         ? Transform::identity(n3)
                                         : Transform::block_dft(n3, ss_));
    if (g_w) {
        if (g_w->vertex_count != n1 || g_w->period_count != n3)
            throw std::invalid_argument("solver: row graph does not match tensor dims");
        lap_w_ = laplacian_tensor(*g_w, ss_);
    }
    if (g_h) {
        if (g_h->vertex_count != n2 || g_h->period_count != n3)
            throw std::invalid_argument("solver: column graph does not match tensor dims");
        lap_h_ = laplacian_tensor(*g_h, ss_);
    }

    std::mt19937_64 rng(cfg_.seed);
    std::normal_distribution<double> randn(0.0, 1.0);
    RTensor w0(n1, cfg_.rank, n3), h0(n2, cfg_.rank, n3);
    for (Index i = 0; i < w0.size(); ++i) w0.data()[i] = randn(rng);
    for (Index i = 0; i < h0.size(); ++i) h0.data()[i] = randn(rng);
    w_hat_ = m_->to_hat(w0);
    h_hat_ = m_->to_hat(h0);
    a_hat_ = w_hat_;
    b_hat_ = h_hat_;
    e_hat_ = m_->to_hat(observed_.to_dense());
    e_obs_.resize(observed_.entries.size());
    for (size_t k = 0; k < observed_.entries.size(); ++k)
        e_obs_[k] = observed_.entries[k].value;
    slice_reps_.reserve(n3);
    if (m_->hermitian_hat()) {
        for (Index t = 0; t < n3; ++t)
            if (const Index mt = m_->mirror_slice(t); mt >= t)
                slice_reps_.emplace_back(t, mt);
    } else {
        for (Index t = 0; t < n3; ++t) slice_reps_.emplace_back(t, Index{-1});
    }
    mult_w_hat_ = CTensor(n1, cfg_.rank, n3);
    mult_h_hat_ = CTensor(n2, cfg_.rank, n3);
    mult_e_.assign(observed_.entries.size(), 0.0);
    rebuild_factorizations();
}

Eigen::MatrixXd AdmmSolver::l_w_hat_slice(Index t) const {
    Eigen::MatrixXd l = lap_w_ ? Eigen::MatrixXd(cfg_.lambda_g * lap_w_->laplacian.slice(t))
                               : Eigen::MatrixXd::Zero(observed_.n1, observed_.n1);
    l.diagonal().array() += cfg_.lambda_1;
    return l;
}

Eigen::MatrixXd AdmmSolver::l_h_hat_slice(Index t) const {
    Eigen::MatrixXd l = lap_h_ ? Eigen::MatrixXd(cfg_.lambda_g * lap_h_->laplacian.slice(t))
                               : Eigen::MatrixXd::Zero(observed_.n2, observed_.n2);
    l.diagonal().array() += cfg_.lambda_1;
    return l;
}

void AdmmSolver::rebuild_factorizations() {
    const Index n3 = observed_.n3;
    llt_w_.clear();
    llt_h_.clear();
    if (observed_.n1 <= cfg_.cg_direct_threshold) {
        llt_w_.reserve(n3);
        for (Index t = 0; t < n3; ++t) {
            Eigen::MatrixXd k = l_w_hat_slice(t);
            k.diagonal().array() += cfg_.beta;
            llt_w_.emplace_back(k);
        }
    }
    if (observed_.n2 <= cfg_.cg_direct_threshold) {
        llt_h_.reserve(n3);
        for (Index t = 0; t < n3; ++t) {
            Eigen::MatrixXd k = l_h_hat_slice(t);
            k.diagonal().array() += cfg_.beta;
            llt_h_.emplace_back(k);
        }
    }
}

Eigen::MatrixXcd AdmmSolver::solve_side_system(const Eigen::MatrixXd& l,
                                               const Eigen::LLT<Eigen::MatrixXd>& llt,
                                               const Eigen::MatrixXcd& rhs) const {
    if (l.rows() == 0) {  // direct path, prefactored
        Eigen::MatrixXcd x(rhs.rows(), rhs.cols());
        x.real() = llt.solve(rhs.real());
        x.imag() = llt.solve(rhs.imag());
        return x;
    }
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(rhs.rows(), rhs.cols());
    auto apply = [&](const Eigen::VectorXcd& v) {
        return Eigen::VectorXcd(l * v + cfg_.beta * v);
    };
    for (Index c = 0; c < rhs.cols(); ++c) {
        Eigen::VectorXcd col = x.col(c);
        hermitian_cg(apply, rhs.col(c), col, cfg_.cg_tol, cfg_.cg_max_iter);
        x.col(c) = col;
    }
    return x;
}

CTensor AdmmSolver::product_wh_hat() const {
    CTensor c(w_hat_.n1(), h_hat_.n1(), w_hat_.n3());
    for (const auto& [t, mt] : slice_reps_) {
        c.slice(t).noalias() = w_hat_.slice(t) * h_hat_.slice(t).adjoint();
        if (mt == t)
            c.slice(t).imag().setZero();
        else if (mt > t)
            c.slice(mt) = c.slice(t).conjugate();
    }
    return c;
}

std::vector<double> AdmmSolver::values_at_mask(const CTensor& hat) const {
    const Eigen::MatrixXcd& inv = m_->inverse_matrix();
    const Index bs = m_->block_size();
    std::vector<double> out(observed_.entries.size());
    for (size_t k = 0; k < observed_.entries.size(); ++k) {
        const Observation& o = observed_.entries[k];
        const Index t0 = (o.i3 / bs) * bs;
        std::complex<double> v = 0;
        for (Index t = t0; t < t0 + bs; ++t) v += hat(o.i1, o.i2, t) * inv(o.i3, t);
        out[k] = v.real();
    }
    return out;
}

namespace {

// Complete a representative-slice update: self-paired slices are projected
// real, mirrored slices filled with the conjugate of the representative.
void finish_pair(CTensor& x, Index t, Index mt) {
    if (mt == t)
        x.slice(t).imag().setZero();
    else if (mt > t)
        x.slice(mt) = x.slice(t).conjugate();
}

}  // namespace

void AdmmSolver::step_w() {
    const CTensor& e_hat = e_hat_;
    for (const auto& [t, mt] : slice_reps_) {
        const auto h = h_hat_.slice(t);
        Eigen::MatrixXcd gram = h.adjoint() * h;
        gram.diagonal().array() += cfg_.beta;
        Eigen::MatrixXcd rhs = cfg_.beta * a_hat_.slice(t) - mult_w_hat_.slice(t) +
                               e_hat.slice(t) * h;
        w_hat_.slice(t) = solve_right_hermitian(gram, rhs, cfg_);
        finish_pair(w_hat_, t, mt);
    }
}

void AdmmSolver::step_h() {
    const CTensor& e_hat = e_hat_;
    for (const auto& [t, mt] : slice_reps_) {
        const auto w = w_hat_.slice(t);
        Eigen::MatrixXcd gram = w.adjoint() * w;
        gram.diagonal().array() += cfg_.beta;
        Eigen::MatrixXcd rhs = cfg_.beta * b_hat_.slice(t) - mult_h_hat_.slice(t) +
                               e_hat.slice(t).adjoint() * w;
        h_hat_.slice(t) = solve_right_hermitian(gram, rhs, cfg_);
        finish_pair(h_hat_, t, mt);
    }
}

void AdmmSolver::step_a() {
    const bool direct = !llt_w_.empty();
    for (const auto& [t, mt] : slice_reps_) {
        Eigen::MatrixXcd rhs = cfg_.beta * w_hat_.slice(t) + mult_w_hat_.slice(t);
        a_hat_.slice(t) = direct
                              ? solve_side_system(Eigen::MatrixXd(), llt_w_[t], rhs)
                              : solve_side_system(l_w_hat_slice(t),
                                                  Eigen::LLT<Eigen::MatrixXd>(), rhs);
        finish_pair(a_hat_, t, mt);
    }
}

void AdmmSolver::step_b() {
    const bool direct = !llt_h_.empty();
    for (const auto& [t, mt] : slice_reps_) {
        Eigen::MatrixXcd rhs = cfg_.beta * h_hat_.slice(t) + mult_h_hat_.slice(t);
        b_hat_.slice(t) = direct
                              ? solve_side_system(Eigen::MatrixXd(), llt_h_[t], rhs)
                              : solve_side_system(l_h_hat_slice(t),
                                                  Eigen::LLT<Eigen::MatrixXd>(), rhs);
        finish_pair(b_hat_, t, mt);
    }
}

void AdmmSolver::step_e() {
    // Off the mask the minimizer is exactly W *_M H^T, so E is stored as
    // that product plus a sparse correction on the observed triples.
    e_hat_ = product_wh_hat();
    const std::vector<double> wht = values_at_mask(e_hat_);
    const Eigen::MatrixXcd& fwd = m_->matrix();
    const Index bs = m_->block_size();
    const double denom = 1.0 + cfg_.beta;
    for (size_t k = 0; k < observed_.entries.size(); ++k) {
        const Observation& o = observed_.entries[k];
        e_obs_[k] = (cfg_.beta * o.value + mult_e_[k] + wht[k]) / denom;
        const double d = e_obs_[k] - wht[k];
        const Index t0 = (o.i3 / bs) * bs;
        for (Index t = t0; t < t0 + bs; ++t) e_hat_(o.i1, o.i2, t) += d * fwd(t, o.i3);
    }
}

void AdmmSolver::step_multipliers() {
    const double gb = cfg_.gamma * cfg_.beta;
    for (Index i = 0; i < w_hat_.size(); ++i)
        mult_w_hat_.data()[i] -= gb * (a_hat_.data()[i] - w_hat_.data()[i]);
    for (Index i = 0; i < h_hat_.size(); ++i)
        mult_h_hat_.data()[i] -= gb * (b_hat_.data()[i] - h_hat_.data()[i]);
    for (size_t k = 0; k < observed_.entries.size(); ++k)
        mult_e_[k] -= gb * (e_obs_[k] - observed_.entries[k].value);
}

void AdmmSolver::iterate_once() {
    step_w();
    step_h();
    step_a();
    step_b();
    step_e();
    step_multipliers();
    ++iter_;
}

namespace {
double hat_diff_sq(const CTensor& x, const CTensor& y) {
    double s = 0;
    for (Index i = 0; i < x.size(); ++i) s += std::norm(x.data()[i] - y.data()[i]);
    return s;
}
double hat_diff_norm(const CTensor& x, const CTensor& y, double c) {
    return std::sqrt(hat_diff_sq(x, y) / c);
}
}  // namespace

double AdmmSolver::residual_w() const {
    return hat_diff_norm(a_hat_, w_hat_, m_->scale());
}
double AdmmSolver::residual_h() const {
    return hat_diff_norm(b_hat_, h_hat_, m_->scale());
}
double AdmmSolver::residual_e() const {
    double s = 0;
    for (size_t k = 0; k < observed_.entries.size(); ++k) {
        const double d = e_obs_[k] - observed_.entries[k].value;
        s += d * d;
    }
    return std::sqrt(s);
}

double AdmmSolver::objective() const {
    const double fit = hat_diff_sq(e_hat_, product_wh_hat()) / m_->scale();
    double reg = 0;
    for (Index t = 0; t < observed_.n3; ++t) {
        const auto a = a_hat_.slice(t);
        const auto b = b_hat_.slice(t);
        reg += (a.adjoint() * l_w_hat_slice(t) * a).trace().real();
        reg += (b.adjoint() * l_h_hat_slice(t) * b).trace().real();
    }
    return 0.5 * fit + 0.5 * reg / m_->scale();
}

double AdmmSolver::aug_lagrangian() const {
    const double c = m_->scale();
    double pen = 0;
    for (Index i = 0; i < w_hat_.size(); ++i)
        pen += std::norm(a_hat_.data()[i] - w_hat_.data()[i] -
                         mult_w_hat_.data()[i] / cfg_.beta);
    for (Index i = 0; i < h_hat_.size(); ++i)
        pen += std::norm(b_hat_.data()[i] - h_hat_.data()[i] -
                         mult_h_hat_.data()[i] / cfg_.beta);
    pen /= c;
    for (size_t k = 0; k < observed_.entries.size(); ++k) {
        const double d =
            e_obs_[k] - observed_.entries[k].value - mult_e_[k] / cfg_.beta;
        pen += d * d;
    }
    return objective() + 0.5 * cfg_.beta * pen;
}

std::pair<RTensor, Diagnostics> AdmmSolver::run() {
    Diagnostics diag;
    const double scale = std::max(observed_.frobenius_norm(), 1e-300);
    double u = std::numeric_limits<double>::infinity();
    CTensor w_prev = w_hat_, h_prev = h_hat_, a_prev = a_hat_, b_prev = b_hat_;
    std::vector<double> e_prev = e_obs_;
    bool retried = false;
    for (Index k = 0; k < cfg_.max_iter; ++k) {
        try {
            iterate_once();
        } catch (const CgFailure&) {
            if (retried) throw;
            retried = true;
            cfg_.cg_max_iter *= 2;
            iterate_once();
        }
        const double c = m_->scale();
        double step = (hat_diff_sq(w_hat_, w_prev) + hat_diff_sq(h_hat_, h_prev) +
                       hat_diff_sq(a_hat_, a_prev) + hat_diff_sq(b_hat_, b_prev)) /
                      c;
        double de = 0;
        for (size_t k = 0; k < e_obs_.size(); ++k) {
            const double d = e_obs_[k] - e_prev[k];
            de += d * d;
        }
        step += de;
        u = std::min(u, step);
        w_prev = w_hat_;
        h_prev = h_hat_;
        a_prev = a_hat_;
        b_prev = b_hat_;
        e_prev = e_obs_;

        diag.objective.push_back(objective());
        diag.aug_lagrangian.push_back(aug_lagrangian());
        diag.res_w.push_back(residual_w());
        diag.res_h.push_back(residual_h());
        diag.res_e.push_back(residual_e());
        diag.u_k.push_back(u);
        diag.iterations = static_cast<Index>(diag.objective.size());

        if (diag.res_w.back() <= cfg_.stop_tol * scale &&
            diag.res_h.back() <= cfg_.stop_tol * scale &&
            diag.res_e.back() <= cfg_.stop_tol * scale) {
            diag.converged = true;
            break;
        }
    }
    return {completed(), std::move(diag)};
}

RTensor AdmmSolver::completed() const { return m_->from_hat(product_wh_hat()); }

RTensor AdmmSolver::w() const { return m_->from_hat(w_hat_); }
RTensor AdmmSolver::h() const { return m_->from_hat(h_hat_); }
RTensor AdmmSolver::a() const { return m_->from_hat(a_hat_); }
RTensor AdmmSolver::b() const { return m_->from_hat(b_hat_); }
RTensor AdmmSolver::mult_w() const { return m_->from_hat(mult_w_hat_); }
RTensor AdmmSolver::mult_h() const { return m_->from_hat(mult_h_hat_); }

void AdmmSolver::set_w(const RTensor& w) { w_hat_ = m_->to_hat(w); }
void AdmmSolver::set_h(const RTensor& h) { h_hat_ = m_->to_hat(h); }
void AdmmSolver::set_a(const RTensor& a) { a_hat_ = m_->to_hat(a); }
void AdmmSolver::set_b(const RTensor& b) { b_hat_ = m_->to_hat(b); }
RTensor AdmmSolver::e() const { return m_->from_hat(e_hat_); }

void AdmmSolver::set_e(const RTensor& e) {
    e_hat_ = m_->to_hat(e);
    for (size_t k = 0; k < observed_.entries.size(); ++k) {
        const Observation& o = observed_.entries[k];
        e_obs_[k] = e(o.i1, o.i2, o.i3);
    }
}
void AdmmSolver::set_mult_w(const RTensor& lw) { mult_w_hat_ = m_->to_hat(lw); }
void AdmmSolver::set_mult_h(const RTensor& lh) { mult_h_hat_ = m_->to_hat(lh); }
void AdmmSolver::set_mult_e(const std::vector<double>& le) {
    if (le.size() != observed_.entries.size())
        throw std::invalid_argument("mult_e must align with observations");
    mult_e_ = le;
}

double AdmmSolver::beta_theory_bound() const {
    double tr = 0;
    for (Index t = 0; t < observed_.n3; ++t)
        tr += l_w_hat_slice(t).trace() + l_h_hat_slice(t).trace();
    return static_cast<double>(cfg_.rank) * cfg_.rank *
           static_cast<double>(observed_.n1 + observed_.n2) *
           static_cast<double>(observed_.n3) * tr;
}

std::pair<RTensor, Diagnostics> solve(const ObservedTensor& observed,
                                      std::optional<DynamicGraph> g_w,
                                      std::optional<DynamicGraph> g_h,
                                      const SolverConfig& config) {
    AdmmSolver solver(observed, std::move(g_w), std::move(g_h), config);
    return solver.run();
}

}  // namespace gtc
