#include "adsholo/phase_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "adsholo/errors.hpp"

namespace adsholo {

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_square(const Mat& m, const char* name) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::InputShape, std::string(name) + " must be square");
    }
    if (!m.allFinite()) {
        throw Error(ErrorCode::InputShape, std::string(name) + " has non-finite entries");
    }
}

// Whitened operator eta^{-1/2} sigma eta^{-1/2}, antisymmetrized against roundoff.
Mat whitened_sigma(const PhaseSpace& ps) {
    const Mat& s = ps.eta_inv_sqrt();
    Mat w = s * ps.sigma() * s;
    return 0.5 * (w - w.transpose());
}

} // namespace

PhaseSpace::PhaseSpace(Mat eta, Mat sigma, const Tolerances& tol)
    : eta_(std::move(eta)), sigma_(std::move(sigma)) {
    require_square(eta_, "eta");
    require_square(sigma_, "sigma");
    if (eta_.rows() != sigma_.rows()) {
        throw Error(ErrorCode::InputShape, "eta and sigma have different dimensions");
    }
    if (eta_.rows() == 0) {
        throw Error(ErrorCode::InputShape, "phase space dimension must be positive");
    }
    const double scale = std::max(1.0, max_abs(eta_));
    if (max_abs(eta_ - eta_.transpose()) > tol.num * scale) {
        throw Error(ErrorCode::InputShape, "eta is not symmetric");
    }
    if (max_abs(sigma_ + sigma_.transpose()) > tol.num * std::max(1.0, max_abs(sigma_))) {
        throw Error(ErrorCode::InputShape, "sigma is not antisymmetric");
    }
    eta_ = 0.5 * (eta_ + eta_.transpose());
    sigma_ = 0.5 * (sigma_ - sigma_.transpose());

    Eigen::SelfAdjointEigenSolver<Mat> es(eta_);
    const Vec& ev = es.eigenvalues();
    eta_min_ = ev.minCoeff();
    eta_max_ = ev.maxCoeff();
    singular_ = eta_max_ <= 0.0 || std::abs(eta_min_) <= tol.rank * std::abs(eta_max_);
    positive_ = !singular_ && eta_min_ > 0.0;
    if (positive_) {
        const Mat& v = es.eigenvectors();
        sqrt_ = v * ev.cwiseSqrt().asDiagonal() * v.transpose();
        inv_sqrt_ = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
    }
}

const Mat& PhaseSpace::eta_sqrt() const {
    if (!positive_) {
        throw Error(ErrorCode::DegenerateCovariance, "eta is not strictly positive");
    }
    return sqrt_;
}

const Mat& PhaseSpace::eta_inv_sqrt() const {
    if (!positive_) {
        throw Error(ErrorCode::DegenerateCovariance, "eta is not strictly positive");
    }
    return inv_sqrt_;
}

double PhaseSpace::inner(const Vec& v, const Vec& w) const {
    if (v.size() != dim() || w.size() != dim()) {
        throw Error(ErrorCode::InputShape, "vector dimension does not match phase space");
    }
    return v.dot(eta_ * w);
}

double PhaseSpace::norm(const Vec& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

PositivityReport check_positivity(const PhaseSpace& ps, double c, const Tolerances& tol) {
    if (!(c > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "domination factor must be positive");
    }
    PositivityReport rep;
    if (std::abs(ps.eta_min_eigenvalue()) <= tol.rank * std::abs(ps.eta_max_eigenvalue()) ||
        ps.eta_max_eigenvalue() <= 0.0) {
        throw Error(ErrorCode::DegenerateCovariance, "eta is singular below rank tolerance");
    }
    if (!ps.eta_positive()) {
        rep.holds = false;
        rep.domination_norm = std::numeric_limits<double>::infinity();
        return rep;
    }
    const Mat w = whitened_sigma(ps);
    rep.domination_norm = w.size() == 0 ? 0.0 : Eigen::JacobiSVD<Mat>(w).singularValues()(0);
    rep.holds = rep.domination_norm <= c + tol.num;
    return rep;
}

KahlerData kahler_from_covariance(const PhaseSpace& ps, const Tolerances& tol) {
    const PositivityReport pos = check_positivity(ps, 2.0, tol);
    if (!pos.holds) {
        throw Error(ErrorCode::PositivityViolation,
                    "||b|| = " + std::to_string(pos.domination_norm / 2.0) + " exceeds 1");
    }
    const int d = ps.dim();
    const Mat& root = ps.eta_sqrt();
    const Mat& inv_root = ps.eta_inv_sqrt();

    // Whitened b: bw = eta^{1/2} b eta^{-1/2}, antisymmetric with ||bw|| <= 1.
    const Mat bw = 0.5 * whitened_sigma(ps);
    Eigen::JacobiSVD<Mat> svd(bw, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const Mat& U = svd.matrixU();
    const Mat& V = svd.matrixV();

    Mat modulus_w = V * s.asDiagonal() * V.transpose();
    modulus_w = 0.5 * (modulus_w + modulus_w.transpose());

    Mat jw = Mat::Zero(d, d);
    Mat ker_proj = Mat::Zero(d, d);
    int ker_dim = 0;
    for (int i = 0; i < d; ++i) {
        if (s(i) > tol.spectral) {
            jw += U.col(i) * V.col(i).transpose();
        } else {
            ker_proj += V.col(i) * V.col(i).transpose();
            ++ker_dim;
        }
    }
    if (ker_dim % 2 != 0) {
        throw Error(ErrorCode::KernelParity, "dim ker b = " + std::to_string(ker_dim) + " is odd");
    }

    // Kernel basis: coordinate vectors projected onto ker b, eta-orthonormalized in index order.
    std::vector<Vec> ker_basis;
    for (int i = 0; i < d && static_cast<int>(ker_basis.size()) < ker_dim; ++i) {
        Vec y = ker_proj * root.col(i);
        for (const Vec& k : ker_basis) y -= k.dot(y) * k;
        for (const Vec& k : ker_basis) y -= k.dot(y) * k;
        const double n = y.norm();
        if (n > 1e-6 * root.col(i).norm()) ker_basis.push_back(y / n);
    }
    if (static_cast<int>(ker_basis.size()) != ker_dim) {
        throw Error(ErrorCode::RankDeficient, "could not build a basis of ker b");
    }
    for (int p = 0; p + 1 < ker_dim; p += 2) {
        const Vec& a = ker_basis[p];
        const Vec& c = ker_basis[p + 1];
        jw += a * c.transpose() - c * a.transpose();
    }

    KahlerData kd;
    kd.b = inv_root * bw * root;
    kd.b_modulus = inv_root * modulus_w * root;
    kd.j = inv_root * jw * root;
    kd.doubled_dim = 0;
    for (int i = 0; i < d; ++i) {
        if (std::abs(s(i) - 1.0) > tol.spectral) ++kd.doubled_dim;
    }
    kd.pure = kd.doubled_dim == 0;

    // Complex basis of (R^d, jw): Gram-Schmidt over the eigenvectors of |bw|
    // (in order of decreasing modulus), closing each new vector under jw.
    const int m = d / 2;
    std::vector<Vec> basis;
    basis.reserve(m);
    for (int i = 0; i < d && static_cast<int>(basis.size()) < m; ++i) {
        Vec y = V.col(i);
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vec& u : basis) {
                const Vec ju = jw * u;
                y -= u.dot(y) * u + ju.dot(y) * ju;
            }
        }
        const double n = y.norm();
        if (n > 1e-6) basis.push_back(y / n);
    }
    if (static_cast<int>(basis.size()) != m) {
        throw Error(ErrorCode::RankDeficient, "could not build a complex basis for j");
    }
    kd.coord_re.resize(m, d);
    kd.coord_im.resize(m, d);
    kd.modulus.resize(m);
    for (int k = 0; k < m; ++k) {
        const Vec& u = basis[k];
        kd.coord_re.row(k) = (u.transpose() * root);
        kd.coord_im.row(k) = -(u.transpose() * jw * root);
        kd.modulus(k) = std::clamp(u.dot(modulus_w * u), 0.0, 1.0);
    }
    // Doubling is decided per complex direction, consistent with doubled_dim.
    int doubled_complex = 0;
    for (int k = 0; k < m; ++k) {
        if (std::abs(kd.modulus(k) - 1.0) > tol.spectral) ++doubled_complex;
    }
    if (2 * doubled_complex != kd.doubled_dim) {
        throw Error(ErrorCode::InvalidInput, "spectral subspace of |b| is not j-invariant within tolerance");
    }
    return kd;
}

Complex kw_inner_product(const KahlerData& kd, const PhaseSpace& ps, const Vec& v, const Vec& w) {
    const int d = ps.dim();
    if (v.size() != d || w.size() != d || kd.j.rows() != d) {
        throw Error(ErrorCode::InputShape, "kw_inner_product: dimension mismatch");
    }
    const Vec ew = ps.eta() * w;
    const Vec ejw = ps.eta() * (kd.j * w);
    return {v.dot(ew), -v.dot(ejw)};
}

Mat eta_orthonormal_basis(const SubspaceGenerators& gens, const PhaseSpace& ps, const Tolerances& tol) {
    const int d = ps.dim();
    const int n = static_cast<int>(gens.generators.size());
    if (n == 0) return Mat(d, 0);
    Mat Y(d, n);
    for (int i = 0; i < n; ++i) {
        const Vec& g = gens.generators[i];
        if (g.size() != d) throw Error(ErrorCode::InputShape, "generator dimension does not match phase space");
        if (!g.allFinite()) throw Error(ErrorCode::InputShape, "generator has non-finite entries");
        Y.col(i) = g;
    }
    Y = ps.eta_sqrt() * Y;
    Eigen::BDCSVD<Mat> svd(Y, Eigen::ComputeThinU);
    const Vec& s = svd.singularValues();
    int r = 0;
    if (s.size() > 0 && s(0) > 0.0) {
        while (r < s.size() && s(r) > tol.rank * s(0)) ++r;
    }
    return svd.matrixU().leftCols(r);
}

Mat eta_projector(const SubspaceGenerators& gens, const PhaseSpace& ps, const Tolerances& tol) {
    const Mat Q = eta_orthonormal_basis(gens, ps, tol);
    if (Q.cols() == 0) return Mat::Zero(ps.dim(), ps.dim());
    return ps.eta_inv_sqrt() * (Q * Q.transpose()) * ps.eta_sqrt();
}

InclusionReport inclusion_check(const SubspaceGenerators& bd_gens,
                                const SubspaceGenerators& bulk_gens,
                                const PhaseSpace& ps,
                                const Tolerances& tol,
                                std::uint64_t witness_seed) {
    const int d = ps.dim();
    const Mat Q = eta_orthonormal_basis(bd_gens, ps, tol);
    const int r = static_cast<int>(Q.cols());
    const Mat& root = ps.eta_sqrt();

    InclusionReport rep;
    rep.bd_rank = r;
    std::vector<Vec> bulk_white;
    std::vector<double> residual_abs;
    for (const Vec& w : bulk_gens.generators) {
        if (w.size() != d) throw Error(ErrorCode::InputShape, "bulk generator dimension does not match phase space");
        Vec y = root * w;
        Vec res = y - Q * (Q.transpose() * y);
        const double nw = y.norm();
        const double nr = res.norm();
        rep.per_generator.push_back(nw > 0.0 ? nr / nw : 0.0);
        residual_abs.push_back(nr);
        bulk_white.push_back(std::move(y));
    }
    rep.max_residual = rep.per_generator.empty()
                           ? 0.0
                           : *std::max_element(rep.per_generator.begin(), rep.per_generator.end());

    // Witness: vectors orthogonal to the boundary span, built from a
    // column-pivoted QR rather than the SVD above, may pair with each bulk
    // generator only through its residual.
    if (bulk_white.empty() || r >= d) return rep;
    Mat C;
    if (r == 0) {
        C = Mat::Identity(d, d);
    } else {
        Mat Y(d, bd_gens.generators.size());
        for (std::size_t i = 0; i < bd_gens.generators.size(); ++i) Y.col(i) = root * bd_gens.generators[i];
        Eigen::ColPivHouseholderQR<Mat> qr(Y);
        const Mat full_q = qr.householderQ() * Mat::Identity(d, d);
        C = full_q.rightCols(d - r);
    }
    std::mt19937_64 rng(witness_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < tol.n_witness; ++s) {
        Vec g(C.cols());
        for (int i = 0; i < g.size(); ++i) g(i) = gauss(rng);
        const Vec u = C * g;
        const double nu = u.norm();
        if (nu == 0.0) continue;
        for (std::size_t i = 0; i < bulk_white.size(); ++i) {
            const double nw = bulk_white[i].norm();
            if (nw == 0.0) continue;
            const double pairing = std::abs(u.dot(bulk_white[i]));
            const double bound = nu * (residual_abs[i] + tol.witness * nw);
            if (pairing > bound) {
                rep.witness_ok = false;
                rep.witness_max_excess = std::max(rep.witness_max_excess, (pairing - bound) / (nu * nw));
            }
        }
    }
    return rep;
}

} // namespace adsholo
