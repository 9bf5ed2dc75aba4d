#include "relsmooth/problems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "relsmooth/errors.hpp"

namespace relsmooth {

// --- Objective defaults ----------------------------------------------------

void Objective::partial_gradient(const Vector& x, const CoordinateSet& coords, Vector& out) const {
    const Vector g = gradient(x);
    for (Index i : coords) {
        out[i] = g[i];
    }
}

Vector Objective::stochastic_gradient(const Vector& x, Rng& rng) const {
    const Index m = num_terms();
    if (m <= 0) {
        throw OracleUnavailable("objective defines no stochastic oracle");
    }
    std::uniform_int_distribution<Index> pick(0, m - 1);
    return term_gradient(x, pick(rng));
}

Vector Objective::term_gradient(const Vector&, Index) const {
    throw OracleUnavailable("objective is not a finite sum");
}

Vector Problem::strong_convexity_vector() const {
    if (cert.w) {
        return *cert.w;
    }
    return Vector::Constant(dimension(), cert.mu);
}

namespace {

void require_dim(const Vector& x, Index n, const char* what) {
    if (x.size() != n) {
        std::ostringstream os;
        os << what << ": expected dimension " << n << ", got " << x.size();
        throw DimensionMismatch(os.str());
    }
}

void require_positive(const Vector& x, const char* what) {
    for (Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(x[i])) {
            std::ostringstream os;
            os << what << ": x[" << i << "] = " << x[i] << " is outside x > 0";
            throw DomainError(os.str());
        }
    }
}

struct Spectrum {
    double min;
    double max;
};

Spectrum symmetric_spectrum(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw DataError("eigenvalue computation failed");
    }
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

void require_symmetric_psd(const Matrix& M, const char* what, Spectrum& spec) {
    if (M.rows() != M.cols() || M.rows() == 0) {
        throw DimensionMismatch(std::string(what) + ": matrix must be square and nonempty");
    }
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw DataError(std::string(what) + ": matrix is not symmetric");
    }
    spec = symmetric_spectrum(0.5 * (M + M.transpose()));
    if (spec.min < -1e-10 * scale) {
        throw DataError(std::string(what) + ": matrix is not positive semidefinite");
    }
    spec.min = std::max(spec.min, 0.0);
}

// --- quadratic plus quartic --------------------------------------------------

class QuadQuartic final : public Objective {
public:
    QuadQuartic(Matrix M, double a) : M_(std::move(M)), a_(a) {}

    Index dimension() const override { return M_.rows(); }
    bool in_domain(const Vector& x) const override {
        return x.size() == dimension() && x.allFinite();
    }
    double value(const Vector& x) const override {
        require_dim(x, dimension(), "quad_quartic");
        return 0.5 * x.dot(M_ * x) + a_ * x.array().pow(4).sum();
    }
    Vector gradient(const Vector& x) const override {
        require_dim(x, dimension(), "quad_quartic");
        return M_ * x + (4.0 * a_) * x.array().cube().matrix();
    }
    void partial_gradient(const Vector& x, const CoordinateSet& coords, Vector& out) const override {
        require_dim(x, dimension(), "quad_quartic");
        for (Index i : coords) {
            out[i] = M_.col(i).dot(x) + 4.0 * a_ * x[i] * x[i] * x[i];
        }
    }

private:
    Matrix M_;
    double a_;
};

// --- Poisson ---------------------------------------------------------------

class PoissonKL final : public Objective {
public:
    PoissonKL(Matrix A, Vector b, double mu_reg) : A_(std::move(A)), b_(std::move(b)), mu_(mu_reg) {}

    Index dimension() const override { return A_.cols(); }
    Index num_terms() const override { return A_.rows(); }
    bool has_stochastic_oracle() const override { return true; }
    bool in_domain(const Vector& x) const override {
        return x.size() == dimension() && (x.array() > 0.0).all() && x.allFinite();
    }

    double value(const Vector& x) const override {
        check(x);
        const Vector ax = A_ * x;
        double total = 0.0;
        for (Index i = 0; i < ax.size(); ++i) {
            total += b_[i] * std::log(b_[i] / ax[i]) + ax[i] - b_[i];
        }
        if (mu_ > 0.0) {
            total -= mu_ * x.array().log().sum();
        }
        return total;
    }

    Vector gradient(const Vector& x) const override {
        check(x);
        Vector g = A_.transpose() * residual(x);
        if (mu_ > 0.0) {
            g.array() -= mu_ / x.array();
        }
        return g;
    }

    void partial_gradient(const Vector& x, const CoordinateSet& coords, Vector& out) const override {
        check(x);
        const Vector r = residual(x);
        for (Index i : coords) {
            out[i] = A_.col(i).dot(r) - (mu_ > 0.0 ? mu_ / x[i] : 0.0);
        }
    }

    Vector term_gradient(const Vector& x, Index i) const override {
        check(x);
        const double ax = A_.row(i).dot(x);
        const double m = static_cast<double>(A_.rows());
        Vector g = (m * (1.0 - b_[i] / ax)) * A_.row(i).transpose();
        if (mu_ > 0.0) {
            g.array() -= mu_ / x.array();
        }
        return g;
    }

private:
    void check(const Vector& x) const {
        require_dim(x, dimension(), "poisson");
        require_positive(x, "poisson");
    }
    Vector residual(const Vector& x) const {
        return (1.0 - b_.array() / (A_ * x).array()).matrix();
    }

    Matrix A_;
    Vector b_;
    double mu_;
};

// --- D-optimal design ------------------------------------------------------

class DOptimal final : public Objective {
public:
    explicit DOptimal(Matrix H) : H_(std::move(H)) {}

    Index dimension() const override { return H_.cols(); }
    bool in_domain(const Vector& x) const override {
        return x.size() == dimension() && (x.array() > 0.0).all() && x.allFinite();
    }

    double value(const Vector& x) const override {
        const auto llt = factor(x);
        return -2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }

    Vector gradient(const Vector& x) const override {
        const auto llt = factor(x);
        const Matrix Y = llt.matrixL().solve(H_);
        return -Y.colwise().squaredNorm().transpose();
    }

    void partial_gradient(const Vector& x, const CoordinateSet& coords, Vector& out) const override {
        const auto llt = factor(x);
        for (Index i : coords) {
            const Vector y = llt.matrixL().solve(H_.col(i));
            out[i] = -y.squaredNorm();
        }
    }

private:
    Eigen::LLT<Matrix> factor(const Vector& x) const {
        require_dim(x, dimension(), "d_optimal_design");
        require_positive(x, "d_optimal_design");
        const Matrix S = H_ * x.asDiagonal() * H_.transpose();
        Eigen::LLT<Matrix> llt(S);
        if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
            throw SingularError("d_optimal_design: H Diag(x) H' is numerically singular");
        }
        return llt;
    }

    Matrix H_;
};

// --- noisy quadratic -------------------------------------------------------

class NoisyQuadratic final : public Objective {
public:
    NoisyQuadratic(Matrix M, Vector c, double noise) : M_(std::move(M)), c_(std::move(c)), noise_(noise) {}

    Index dimension() const override { return M_.rows(); }
    bool has_stochastic_oracle() const override { return true; }
    bool in_domain(const Vector& x) const override {
        return x.size() == dimension() && x.allFinite();
    }
    double value(const Vector& x) const override {
        require_dim(x, dimension(), "noisy_quadratic");
        const Vector d = x - c_;
        return 0.5 * d.dot(M_ * d);
    }
    Vector gradient(const Vector& x) const override {
        require_dim(x, dimension(), "noisy_quadratic");
        return M_ * (x - c_);
    }
    void partial_gradient(const Vector& x, const CoordinateSet& coords, Vector& out) const override {
        require_dim(x, dimension(), "noisy_quadratic");
        const Vector d = x - c_;
        for (Index i : coords) {
            out[i] = M_.col(i).dot(d);
        }
    }
    Vector stochastic_gradient(const Vector& x, Rng& rng) const override {
        Vector g = gradient(x);
        if (noise_ > 0.0) {
            std::normal_distribution<double> xi(0.0, noise_);
            for (Index i = 0; i < g.size(); ++i) {
                g[i] += xi(rng);
            }
        }
        return g;
    }

private:
    Matrix M_;
    Vector c_;
    double noise_;
};

void validate_poisson(const Matrix& A, const Vector& b) {
    if (A.rows() == 0 || A.cols() == 0) {
        throw DataError("poisson: empty matrix");
    }
    if (b.size() != A.rows()) {
        throw DimensionMismatch("poisson: b must have one entry per row of A");
    }
    if ((A.array() < 0.0).any() || !A.allFinite()) {
        throw DataError("poisson: A must be entrywise nonnegative and finite");
    }
    for (Index i = 0; i < A.rows(); ++i) {
        if (!(A.row(i).sum() > 0.0)) {
            std::ostringstream os;
            os << "poisson: row " << i << " of A is zero";
            throw DataError(os.str());
        }
    }
    if (!(b.array() > 0.0).all() || !b.allFinite()) {
        throw DataError("poisson: b must be strictly positive");
    }
}

EsoRule constant_eso(double value) {
    return [value](const Sampling& s) -> std::optional<Vector> {
        return Vector::Constant(s.dimension(), value);
    };
}

double scalar_or(const ProblemData& d, const std::string& key, double fallback) {
    const auto it = d.scalars.find(key);
    return it == d.scalars.end() ? fallback : it->second;
}

double scalar_required(const ProblemData& d, const std::string& key) {
    const auto it = d.scalars.find(key);
    if (it == d.scalars.end()) {
        throw InvalidParams(d.builder + ": missing scalar '" + key + "'");
    }
    return it->second;
}

}  // namespace

// --- ESO certificates --------------------------------------------------------

EsoCertificate make_eso(const Sampling& s, Vector v, const std::optional<Vector>& w) {
    if (v.size() != s.dimension()) {
        throw DimensionMismatch("ESO vector dimension differs from the sampling");
    }
    if (!(v.array() > 0.0).all() || !v.allFinite()) {
        throw CertificateError("ESO vector must be strictly positive and finite");
    }
    EsoCertificate c{s, std::move(v), std::nullopt};
    if (w) {
        if (w->size() != c.v.size()) {
            throw DimensionMismatch("strong convexity vector dimension differs from v");
        }
        const double delta = (w->array() / c.v.array()).minCoeff();
        if (delta < 0.0) {
            throw CertificateError("strong convexity vector must be nonnegative");
        }
        if (delta > 1.0 + 1e-12) {
            throw CertificateError("min w/v exceeds 1; the certificates are inconsistent");
        }
        c.delta = std::min(delta, 1.0);
    }
    return c;
}

EsoCertificate make_eso(const Problem& p, const Sampling& s) {
    if (s.dimension() != p.dimension()) {
        throw DimensionMismatch("sampling dimension differs from the problem");
    }
    std::optional<Vector> v = p.eso_rule ? p.eso_rule(s) : std::nullopt;
    if (!v) {
        throw CertificateError(p.name + ": no ESO vector known for this sampling");
    }
    return make_eso(s, std::move(*v), p.strong_convexity_vector());
}

// --- builders ----------------------------------------------------------------

Problem quad_quartic(const Matrix& M, double a, std::optional<double> reference_quartic) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidParams("quad_quartic: quartic coefficient must be positive");
    }
    const double b = reference_quartic.value_or(a);
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw InvalidParams("quad_quartic: reference quartic coefficient must be positive");
    }
    Spectrum spec{};
    require_symmetric_psd(M, "quad_quartic", spec);
    for (Index i = 0; i < M.rows(); ++i) {
        if (M(i, i) > 1.0 + 1e-9) {
            std::ostringstream os;
            os << "quad_quartic: M(" << i << "," << i << ") = " << M(i, i)
               << " exceeds 1; normalize M by its largest eigenvalue";
            throw CertificateError(os.str());
        }
    }
    const Index n = M.rows();
    const double ratio = a / b;

    Problem p{"quad_quartic",
              std::make_shared<QuadQuartic>(M, a),
              ReferenceFunction::uniform(n, Component::quadratic_plus_quartic(b)),
              FeasibleSet::full_space(),
              {},
              {},
              {"quad_quartic", M, Vector(), {{"a", a}, {"reference_quartic", b}}}};
    p.cert.L = std::max(ratio, spec.max);
    p.cert.mu = std::min(spec.min, ratio);
    p.cert.f_star = 0.0;
    p.cert.x_star = Vector::Zero(n);

    // tau-nice: E[q_S' M q_S] = p((1 - beta) sum M_ii q_i^2 + beta q'Mq),
    // beta = (tau - 1)/(n - 1); the quartic part is separable and needs v_i b >= a.
    const Vector diag = M.diagonal();
    const double lmax = spec.max;
    p.eso_rule = [diag, lmax, ratio](const Sampling& s) -> std::optional<Vector> {
        const Index nn = s.dimension();
        const double beta =
            nn > 1 ? static_cast<double>(s.tau() - 1) / static_cast<double>(nn - 1) : 0.0;
        Vector v = ((1.0 - beta) * diag.array() + beta * lmax).matrix();
        return v.cwiseMax(ratio);
    };
    return p;
}

ProblemData quad_quartic_instance(Index n, std::uint64_t seed, double a, double reference_quartic) {
    if (n < 1) {
        throw InvalidParams("quad_quartic_instance: n must be positive");
    }
    Rng rng = make_stream(seed, 0x5151);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix A(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            A(i, j) = normal(rng);
        }
    }
    Matrix M = A.transpose() * A;
    M = 0.5 * (M + M.transpose());
    M /= symmetric_spectrum(M).max;
    return {"quad_quartic", M, Vector(), {{"a", a}, {"reference_quartic", reference_quartic}}};
}

double quad_quartic_sublevel_smoothness(const Problem& p, const Vector& x0) {
    if (p.data.builder != "quad_quartic" || !p.data.scalars.count("a")) {
        throw InvalidParams("quad_quartic_sublevel_smoothness: problem is not a quad_quartic instance");
    }
    const double a = p.data.scalars.at("a");
    return symmetric_spectrum(p.data.matrix).max + 12.0 * std::sqrt(a * p.value(x0));
}

Vector normal_start(Index n, double scale, std::uint64_t seed) {
    Rng rng = make_stream(seed, 0x7777);
    std::normal_distribution<double> normal(0.0, scale);
    Vector x(n);
    for (Index i = 0; i < n; ++i) {
        x[i] = normal(rng);
    }
    return x;
}

Problem poisson_kl(const Matrix& A, const Vector& b) {
    validate_poisson(A, b);
    const Index n = A.cols();
    const double L = b.sum();
    Problem p{"poisson_kl",
              std::make_shared<PoissonKL>(A, b, 0.0),
              ReferenceFunction::uniform(n, Component::burg_log()),
              FeasibleSet::positive_orthant(),
              {},
              constant_eso(L),
              {"poisson_kl", A, b, {}}};
    p.cert.L = L;
    p.cert.mu = 0.0;
    return p;
}

Problem regularized_poisson(const Matrix& A, const Vector& b, double mu_reg) {
    if (!(mu_reg >= 0.0) || !std::isfinite(mu_reg)) {
        throw InvalidParams("regularized_poisson: mu_reg must be nonnegative");
    }
    if (mu_reg == 0.0) {
        return poisson_kl(A, b);
    }
    validate_poisson(A, b);
    const Index n = A.cols();
    const double L = b.sum() + mu_reg;
    Problem p{"regularized_poisson",
              std::make_shared<PoissonKL>(A, b, mu_reg),
              ReferenceFunction::uniform(n, Component::burg_log()),
              FeasibleSet::positive_orthant(),
              {},
              constant_eso(L),
              {"regularized_poisson", A, b, {{"mu_reg", mu_reg}}}};
    p.cert.L = L;
    p.cert.mu = mu_reg;
    return p;
}

ProblemData poisson_instance(Index m, Index n, std::uint64_t seed, double mu_reg) {
    if (m < 1 || n < 1) {
        throw InvalidParams("poisson_instance: shape must be positive");
    }
    Rng rng = make_stream(seed, 0x9090);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix A(m, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            A(i, j) = std::abs(normal(rng));
        }
    }
    Vector b(m);
    for (Index i = 0; i < m; ++i) {
        b[i] = std::abs(normal(rng));
    }
    ProblemData d{mu_reg > 0.0 ? "regularized_poisson" : "poisson_kl", A, b, {}};
    if (mu_reg > 0.0) {
        d.scalars["mu_reg"] = mu_reg;
    }
    return d;
}

Problem d_optimal_design(const Matrix& H) {
    if (H.rows() < 1 || H.cols() < H.rows() + 1) {
        throw DataError("d_optimal_design: need H of shape m x n with n >= m + 1");
    }
    if (!H.allFinite()) {
        throw DataError("d_optimal_design: H has non-finite entries");
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(H.transpose());
    if (qr.rank() < H.rows()) {
        throw DataError("d_optimal_design: H must have full row rank");
    }
    const Index n = H.cols();
    Problem p{"d_optimal_design",
              std::make_shared<DOptimal>(H),
              ReferenceFunction::uniform(n, Component::burg_log()),
              FeasibleSet::simplex(),
              {},
              constant_eso(1.0),
              {"d_optimal_design", H, Vector(), {}}};
    p.cert.L = 1.0;
    p.cert.mu = 0.0;
    return p;
}

Problem noisy_quadratic(const Matrix& M, const Vector& center, double noise_std) {
    Spectrum spec{};
    require_symmetric_psd(M, "noisy_quadratic", spec);
    if (center.size() != M.rows()) {
        throw DimensionMismatch("noisy_quadratic: center dimension differs from M");
    }
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw InvalidParams("noisy_quadratic: noise_std must be nonnegative");
    }
    if (!(spec.max > 0.0)) {
        throw DataError("noisy_quadratic: M must be nonzero");
    }
    const Index n = M.rows();
    Problem p{"noisy_quadratic",
              std::make_shared<NoisyQuadratic>(M, center, noise_std),
              ReferenceFunction::uniform(n, Component::squared_half()),
              FeasibleSet::full_space(),
              {},
              {},
              {"noisy_quadratic", M, center, {{"noise_std", noise_std}}}};
    p.cert.L = spec.max;
    p.cert.mu = spec.min;
    p.cert.sigma2 = static_cast<double>(n) * noise_std * noise_std;
    p.cert.f_star = 0.0;
    p.cert.x_star = center;
    const Vector diag = M.diagonal();
    const double lmax = spec.max;
    p.eso_rule = [diag, lmax](const Sampling& s) -> std::optional<Vector> {
        const Index nn = s.dimension();
        const double beta =
            nn > 1 ? static_cast<double>(s.tau() - 1) / static_cast<double>(nn - 1) : 0.0;
        Vector v = ((1.0 - beta) * diag.array() + beta * lmax).matrix();
        // zero diagonal entries would give a degenerate certificate
        return v.cwiseMax(1e-12 * lmax);
    };
    return p;
}

Problem build_problem(const ProblemData& d) {
    if (d.builder == "quad_quartic") {
        return quad_quartic(d.matrix, scalar_required(d, "a"),
                            scalar_or(d, "reference_quartic", scalar_required(d, "a")));
    }
    if (d.builder == "poisson_kl") {
        return poisson_kl(d.matrix, d.vector);
    }
    if (d.builder == "regularized_poisson") {
        return regularized_poisson(d.matrix, d.vector, scalar_required(d, "mu_reg"));
    }
    if (d.builder == "d_optimal_design") {
        return d_optimal_design(d.matrix);
    }
    if (d.builder == "noisy_quadratic") {
        return noisy_quadratic(d.matrix, d.vector, scalar_required(d, "noise_std"));
    }
    throw InvalidParams("unknown problem builder '" + d.builder + "'");
}

Vector stochastic_grad(const Problem& p, const Vector& x, int tau, Rng& rng) {
    if (tau < 1) {
        throw InvalidParams("stochastic_grad: minibatch size must be at least 1");
    }
    if (!p.f->has_stochastic_oracle()) {
        throw OracleUnavailable(p.name + ": no stochastic oracle");
    }
    Vector g = p.f->stochastic_gradient(x, rng);
    for (int j = 1; j < tau; ++j) {
        g += p.f->stochastic_gradient(x, rng);
    }
    if (tau > 1) {
        g /= static_cast<double>(tau);
    }
    return g;
}

NoiseEstimate estimate_sigma2(const Problem& p, const Vector& x, int draws, Rng& rng) {
    if (draws < 1) {
        throw InvalidParams("estimate_sigma2: need at least one draw");
    }
    const Vector g = p.gradient(x);
    double total = 0.0;
    for (int j = 0; j < draws; ++j) {
        total += (stochastic_grad(p, x, 1, rng) - g).squaredNorm();
    }
    NoiseEstimate est;
    est.draws = draws;
    double modulus = 1.0;
    if (!p.h.all_of(Component::Kind::SquaredHalf)) {
        bool burg = false;
        for (const Component& c : p.h.components()) {
            burg = burg || c.kind() == Component::Kind::BurgLog;
        }
        if (burg) {
            // Burg entropy has no global modulus; use the local one at x
            modulus = 1.0 / (x.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff());
            est.heuristic = true;
        }
    }
    est.sigma2 = total / static_cast<double>(draws) / modulus;
    return est;
}

}  // namespace relsmooth
