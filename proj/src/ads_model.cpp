#include "adsholo/ads_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adsholo/errors.hpp"
#include "adsholo/numerics.hpp"

namespace adsholo {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr int kPad = 8; // zero cells around sampled test functions (covers the FD stencils)

// 8th-order central second-derivative stencil on a uniform grid.
constexpr double kD2[9] = {-1.0 / 560.0, 8.0 / 315.0, -1.0 / 5.0, 8.0 / 5.0, -205.0 / 72.0,
                           8.0 / 5.0,    -1.0 / 5.0,  8.0 / 315.0, -1.0 / 560.0};

Vec unperturbed_values(int count, double p, double x) {
    const double s = std::sin(x);
    const double c = std::cos(x);
    Vec g = numerics::gegenbauer(count, p, s);
    const double cp = std::pow(c, p);
    for (int j = 0; j < count; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        g(j) *= sign * std::exp(-0.5 * numerics::gegenbauer_log_norm_sq(j, p)) * cp;
    }
    return g;
}

// beta^- of the normalized unperturbed mode j (beta^+ = (-1)^j beta^-).
double unperturbed_beta_minus(int j, double p) {
    return std::exp(numerics::gegenbauer_log_at_one(j, p) - 0.5 * numerics::gegenbauer_log_norm_sq(j, p));
}

// Cumulative integrals int_{t_0}^{t_n} h over a uniform grid, h = 0 outside. Each
// interval uses the 8-point Lagrange rule (8th order). The integrands oscillate at up
// to omega_max with omega_max * dt = 0.2; 4th order leaves ~4e-5 and 6th ~8e-6 in P u.
CVec cumulative(const CVec& h, double dt) {
    const long n = h.size();
    CVec out = CVec::Zero(n);
    auto at = [&](long i) { return (i < 0 || i >= n) ? Complex(0.0) : h(i); };
    for (long j = 0; j + 1 < n; ++j) {
        const Complex piece = dt *
                              (-191.0 * (at(j - 3) + at(j + 4)) + 1879.0 * (at(j - 2) + at(j + 3)) -
                               9531.0 * (at(j - 1) + at(j + 2)) + 68323.0 * (at(j) + at(j + 1))) /
                              120960.0;
        out(j + 1) = out(j) + piece;
    }
    return out;
}

void require_same_step(const AdsStripModel& model, const TimeGrid& g) {
    if (std::abs(g.dt - model.time_step()) > 1e-15 * model.time_step()) {
        throw Error(ErrorCode::InputShape, "time grid does not use the model's time step");
    }
}

void require_grid(const AdsStripModel& model, const BulkTestFunction& v) {
    require_same_step(model, v.grid);
    if (v.samples.rows() != v.grid.count || v.samples.cols() != model.N()) {
        throw Error(ErrorCode::InputShape, "test function samples do not match its grid");
    }
}

// Rows of `m` (on grid `from`) placed on grid `to`; zero where `from` has no samples.
Mat realign(const Mat& m, const TimeGrid& from, const TimeGrid& to) {
    Mat out = Mat::Zero(to.count, m.cols());
    const long lo = std::max(from.first, to.first);
    const long hi = std::min(from.last(), to.last());
    for (long n = lo; n < hi; ++n) out.row(n - to.first) = m.row(n - from.first);
    return out;
}

TimeGrid union_grid(const TimeGrid& a, const TimeGrid& b) {
    const long first = std::min(a.first, b.first);
    const long last = std::max(a.last(), b.last());
    return {a.dt, first, last - first};
}

// Second x-derivative by 9-point Fornberg stencils on the (non-uniform) model grid.
Mat second_x_derivative(const AdsStripModel& model, const Mat& f) {
    const int n = model.N();
    const Vec& x = model.x();
    Mat out = Mat::Zero(f.rows(), n);
    for (int i = 0; i < n; ++i) {
        if (f.col(i).isZero(0.0) && (i == 0 || f.col(i - 1).isZero(0.0)) && (i + 1 == n || f.col(i + 1).isZero(0.0))) {
            continue;
        }
        const int lo = std::clamp(i - 4, 0, n - 9);
        const Vec w = numerics::fornberg_weights(x(i), std::span<const double>(x.data() + lo, 9), 2);
        for (int s = 0; s < 9; ++s) out.col(i) += w(s) * f.col(lo + s);
    }
    return out;
}

Mat second_t_derivative(const Mat& f, double dt) {
    const long rows = f.rows();
    Mat out = Mat::Zero(rows, f.cols());
    for (long n = 0; n < rows; ++n) {
        for (int s = -4; s <= 4; ++s) {
            const long m = n + s;
            if (m < 0 || m >= rows) continue;
            out.row(n) += kD2[s + 4] * f.row(m);
        }
    }
    return out / (dt * dt);
}

// P f for f given as function samples (rows = time).
Mat kg_apply(const AdsStripModel& model, const Mat& f, double dt) {
    const Mat ftt = second_t_derivative(f, dt);
    const Mat fxx = second_x_derivative(model, f);
    Mat out(f.rows(), f.cols());
    for (int i = 0; i < model.N(); ++i) {
        const double c = std::cos(model.x()(i));
        out.col(i) = c * c * (ftt.col(i) - fxx.col(i) + model.potential()(i) * f.col(i)) + model.mass() * f.col(i);
    }
    return out;
}

} // namespace

const char* to_string(Component c) { return c == Component::Minus ? "-" : "+"; }

double Perturbation::operator()(double x) const {
    double v = 0.0;
    for (const auto& b : bumps) v += b.amplitude * numerics::bump((x - b.center) / b.half_width);
    return v;
}

Vec AdsStripModel::betas(Component c) const { return c == Component::Minus ? beta_minus_ : beta_plus_; }

Vec AdsStripModel::modes_at(double x) const {
    if (!(std::abs(x) < kHalfPi)) throw Error(ErrorCode::InvalidInput, "x outside the open strip");
    const Vec base = unperturbed_values(basis_size_, nu_plus(), x);
    if (galerkin_.size() == 0) return base;
    return galerkin_.transpose() * base;
}

Vec fd_spectrum_raw(double nu, int count, int n, const Perturbation& perturbation) {
    if (count < 1 || n < 2 * count) throw Error(ErrorCode::InvalidInput, "fd_spectrum: grid too coarse");
    const double p = nu + 0.5;
    const double h = std::numbers::pi / n;
    Vec wc(n);
    Vec wf(n + 1);
    Vec pot(n);
    for (int i = 0; i <= n; ++i) wf(i) = std::pow(std::cos(-kHalfPi + i * h), 2.0 * p);
    wf(0) = 0.0;
    wf(n) = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xc = -kHalfPi + (i + 0.5) * h;
        wc(i) = std::pow(std::cos(xc), 2.0 * p);
        pot(i) = perturbation(xc);
    }
    // -(w psi')' + (p^2 + W) w psi = omega^2 w psi, symmetrized by w^{-1/2}.
    Vec diag(n);
    Vec sub(n - 1);
    for (int i = 0; i < n; ++i) diag(i) = ((wf(i) + wf(i + 1)) / (h * h) + (p * p + pot(i)) * wc(i)) / wc(i);
    for (int i = 0; i + 1 < n; ++i) sub(i) = -wf(i + 1) / (h * h) / std::sqrt(wc(i) * wc(i + 1));
    Eigen::SelfAdjointEigenSolver<Mat> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    Vec out(count);
    for (int k = 0; k < count; ++k) out(k) = std::sqrt(std::max(0.0, es.eigenvalues()(k)));
    return out;
}

Vec fd_spectrum(double nu, int count, int n, const Perturbation& perturbation) {
    const Vec coarse = fd_spectrum_raw(nu, count, n, perturbation);
    const Vec fine = fd_spectrum_raw(nu, count, 2 * n, perturbation);
    return (4.0 * fine - coarse) / 3.0;
}

AdsStripModel build_model(const ModelParams& params, const Tolerances& tol) {
    if (!(params.nu > 0.0)) {
        throw Error(ErrorCode::BreitenlohnerFreedman, "nu = " + std::to_string(params.nu) + " must be > 0");
    }
    if (params.K < 1) throw Error(ErrorCode::InvalidInput, "K must be >= 1");
    if (params.N < 4 * params.K) throw Error(ErrorCode::InvalidInput, "N must be >= 4K");
    if (params.N < 2 * tol.support_margin + 4) throw Error(ErrorCode::InvalidInput, "N too small for support margin");

    AdsStripModel m;
    m.nu_ = params.nu;
    m.tol_ = tol;
    m.perturbation_ = params.perturbation;
    const double p = m.nu_plus();

    const auto quad = numerics::gauss_legendre(params.N, -kHalfPi, kHalfPi);
    m.x_ = quad.nodes;
    m.w_ = quad.weights;
    const int n = params.N;

    const double x_lo = m.x_(tol.support_margin);
    const double x_hi = m.x_(n - 1 - tol.support_margin);
    for (const auto& b : params.perturbation.bumps) {
        if (!(b.half_width > 0.0) || b.center - b.half_width <= x_lo || b.center + b.half_width >= x_hi ||
            !std::isfinite(b.amplitude)) {
            throw Error(ErrorCode::InvalidPerturbation, "potential bump must be supported strictly inside the strip margin");
        }
    }
    m.potential_.resize(n);
    for (int i = 0; i < n; ++i) m.potential_(i) = params.perturbation(m.x_(i));

    const bool perturbed = !params.perturbation.empty();
    const int K = params.K;
    m.basis_size_ = perturbed ? K + std::max(0, params.galerkin_extra) : K;
    const int nb = m.basis_size_;

    Mat phi0(n, nb);
    for (int i = 0; i < n; ++i) phi0.row(i) = unperturbed_values(nb, p, m.x_(i)).transpose();
    Vec beta0(nb);
    for (int j = 0; j < nb; ++j) beta0(j) = unperturbed_beta_minus(j, p);

    m.omega_.resize(K);
    m.beta_minus_.resize(K);
    m.beta_plus_.resize(K);
    if (!perturbed) {
        m.phi_ = phi0;
        for (int k = 0; k < K; ++k) {
            m.omega_(k) = p + k;
            m.beta_minus_(k) = beta0(k);
            m.beta_plus_(k) = (k % 2 == 0 ? 1.0 : -1.0) * beta0(k);
        }
        m.closed_form_deviation_ = 0.0;
    } else {
        // Galerkin solve of A in the unperturbed basis: diag(omega0^2) + <phi0_j | W | phi0_k>.
        Mat h = (phi0.transpose() * (m.w_.cwiseProduct(m.potential_)).asDiagonal() * phi0);
        h = 0.5 * (h + h.transpose());
        for (int j = 0; j < nb; ++j) h(j, j) += (p + j) * (p + j);
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        if (es.eigenvalues()(0) <= 0.0) {
            throw Error(ErrorCode::InvalidPerturbation, "perturbed spectrum has a non-positive eigenvalue");
        }
        Mat c = es.eigenvectors().leftCols(K);
        Vec beta_plus0(nb);
        for (int j = 0; j < nb; ++j) beta_plus0(j) = (j % 2 == 0 ? 1.0 : -1.0) * beta0(j);
        for (int k = 0; k < K; ++k) {
            double bm = beta0.dot(c.col(k));
            double bp = beta_plus0.dot(c.col(k));
            const double ref = std::abs(bm) > 1e-12 * std::abs(bp) ? bm : bp;
            if (ref < 0.0) {
                c.col(k) *= -1.0;
                bm = -bm;
                bp = -bp;
            }
            m.omega_(k) = std::sqrt(es.eigenvalues()(k));
            m.beta_minus_(k) = bm;
            m.beta_plus_(k) = bp;
        }
        m.galerkin_ = c;
        m.phi_ = phi0 * c;
        m.closed_form_deviation_ = std::numeric_limits<double>::quiet_NaN();
    }
    if (!perturbed) {
        double dev = 0.0;
        for (int k = 0; k < K; ++k) dev = std::max(dev, std::abs(m.omega_(k) - (p + k)));
        m.closed_form_deviation_ = dev;
    }

    m.modes_.reserve(K);
    for (int k = 0; k < K; ++k) {
        m.modes_.push_back(Mode{k, m.omega_(k), m.phi_.col(k), m.beta_minus_(k), m.beta_plus_(k)});
    }

    const Mat gram = m.phi_.transpose() * m.w_.asDiagonal() * m.phi_;
    m.ortho_defect_ = (gram - Mat::Identity(K, K)).cwiseAbs().maxCoeff();
    if (m.ortho_defect_ > tol.quad) {
        throw Error(ErrorCode::InvalidInput, "mode orthonormality defect " + std::to_string(m.ortho_defect_) +
                                                 " exceeds quad tolerance; increase N");
    }

    m.dt_ = 0.2 / m.omega_(K - 1);

    if (params.cross_validate) {
        m.fd_checked_ = std::min(K, 40);
        const Vec fd = fd_spectrum(params.nu, m.fd_checked_, 2000, params.perturbation);
        m.fd_deviation_ = (fd - m.omega_.head(m.fd_checked_)).cwiseAbs().maxCoeff();
        if (m.fd_deviation_ > tol.eig) {
            throw Error(ErrorCode::InvalidInput, "mode spectrum disagrees with the finite-difference oracle by " +
                                                     std::to_string(m.fd_deviation_));
        }
    } else {
        m.fd_deviation_ = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

// ---- test functions -------------------------------------------------------

void check_support(const AdsStripModel& model, const BulkTestFunction& v) {
    const int lo = model.first_interior_index();
    const int hi = model.last_interior_index();
    for (const Rect& r : v.support) {
        if (!(r.t0 < r.t1) || !(r.x0 < r.x1)) throw Error(ErrorCode::InvalidInput, "empty support rectangle");
        if (r.x0 < model.x()(lo) || r.x1 > model.x()(hi)) {
            throw Error(ErrorCode::SupportMargin, "support rectangle reaches the boundary margin");
        }
    }
    for (int i = 0; i < model.N(); ++i) {
        if (i >= lo && i <= hi) continue;
        if (!v.samples.col(i).isZero(0.0)) {
            throw Error(ErrorCode::SupportMargin, "test function is nonzero inside the boundary margin");
        }
    }
}

BulkTestFunction sample_bulk(const AdsStripModel& model,
                             const std::function<double(double, double)>& f,
                             std::vector<Rect> support,
                             bool densitize) {
    if (support.empty()) throw Error(ErrorCode::InvalidInput, "bulk test function needs a support");
    const double dt = model.time_step();
    double tmin = support.front().t0;
    double tmax = support.front().t1;
    for (const Rect& r : support) {
        tmin = std::min(tmin, r.t0);
        tmax = std::max(tmax, r.t1);
    }
    BulkTestFunction v;
    v.grid.dt = dt;
    v.grid.first = static_cast<long>(std::floor(tmin / dt)) - kPad;
    v.grid.count = static_cast<long>(std::ceil(tmax / dt)) + kPad - v.grid.first + 1;
    v.samples = Mat::Zero(v.grid.count, model.N());
    v.support = std::move(support);
    for (long n = 0; n < v.grid.count; ++n) {
        const double t = v.grid.t(n);
        for (int i = 0; i < model.N(); ++i) {
            const double x = model.x()(i);
            bool inside = false;
            for (const Rect& r : v.support) {
                if (t >= r.t0 && t <= r.t1 && x >= r.x0 && x <= r.x1) {
                    inside = true;
                    break;
                }
            }
            if (!inside) continue;
            double val = f(t, x);
            if (densitize) {
                const double c = std::cos(x);
                val /= c * c;
            }
            v.samples(n, i) = val;
        }
    }
    v.densitized = densitize;
    check_support(model, v);
    return v;
}

BoundaryTestFunction sample_boundary(const AdsStripModel& model,
                                     Component component,
                                     const std::function<double(double)>& f,
                                     std::vector<Interval> support) {
    BoundaryTestFunction out;
    out.component = component;
    out.grid.dt = model.time_step();
    if (support.empty()) {
        out.grid.first = 0;
        out.grid.count = 0;
        return out;
    }
    double tmin = support.front().a;
    double tmax = support.front().b;
    for (const Interval& iv : support) {
        if (!(iv.a < iv.b)) throw Error(ErrorCode::InvalidInput, "empty boundary interval");
        tmin = std::min(tmin, iv.a);
        tmax = std::max(tmax, iv.b);
    }
    const double dt = out.grid.dt;
    out.grid.first = static_cast<long>(std::floor(tmin / dt)) - 1;
    out.grid.count = static_cast<long>(std::ceil(tmax / dt)) + 1 - out.grid.first + 1;
    out.samples = Vec::Zero(out.grid.count);
    for (long n = 0; n < out.grid.count; ++n) {
        const double t = out.grid.t(n);
        for (const Interval& iv : support) {
            if (t > iv.a && t < iv.b) {
                out.samples(n) = f(t);
                break;
            }
        }
    }
    out.support = std::move(support);
    return out;
}

Mat density_samples(const AdsStripModel& model, const BulkTestFunction& v) {
    require_grid(model, v);
    if (v.densitized) return v.samples;
    Mat out = v.samples;
    for (int i = 0; i < model.N(); ++i) {
        const double c = std::cos(model.x()(i));
        out.col(i) /= c * c;
    }
    return out;
}

Mat function_samples(const AdsStripModel& model, const BulkTestFunction& v) {
    require_grid(model, v);
    if (!v.densitized) return v.samples;
    Mat out = v.samples;
    for (int i = 0; i < model.N(); ++i) {
        const double c = std::cos(model.x()(i));
        out.col(i) *= c * c;
    }
    return out;
}

// ---- operations -----------------------------------------------------------

namespace {

// Spatial mode projections int phi_k(x) v~(t_n, x) dx, one row per time.
Mat mode_projections(const AdsStripModel& model, const BulkTestFunction& v) {
    check_support(model, v);
    const Mat dens = density_samples(model, v);
    return dens * model.weights().asDiagonal() * model.mode_matrix();
}

} // namespace

OneParticleVector one_particle_map(const AdsStripModel& model, const BulkTestFunction& v) {
    const Mat proj = mode_projections(model, v);
    const int K = model.K();
    OneParticleVector out;
    out.origin = OneParticleVector::Origin::Bulk;
    out.coeffs = CVec::Zero(K);
    for (int k = 0; k < K; ++k) {
        const double om = model.omegas()(k);
        Complex acc = 0.0;
        for (long n = 0; n < v.grid.count; ++n) acc += std::polar(1.0, om * v.grid.t(n)) * proj(n, k);
        out.coeffs(k) = acc * v.grid.dt / std::sqrt(2.0 * om);
    }
    return out;
}

BulkTestFunction apply_kg_operator(const AdsStripModel& model, const BulkTestFunction& w) {
    check_support(model, w);
    const Mat f = function_samples(model, w);
    BulkTestFunction out;
    out.grid = w.grid;
    out.support = w.support;
    out.densitized = false;
    out.samples = kg_apply(model, f, w.grid.dt);
    return out;
}

GridFunction propagator_apply(const AdsStripModel& model,
                              const BulkTestFunction& v,
                              PropagatorKind which,
                              const TimeGrid& out) {
    require_same_step(model, out);
    const Mat proj = mode_projections(model, v);
    const TimeGrid u = union_grid(v.grid, out);
    const Mat f = realign(proj, v.grid, u);
    const int K = model.K();
    Mat g(out.count, K);
    for (int k = 0; k < K; ++k) {
        const double om = model.omegas()(k);
        CVec h(u.count);
        if (which == PropagatorKind::Retarded) {
            for (long n = 0; n < u.count; ++n) h(n) = std::polar(1.0, -om * u.t(n)) * f(n, k);
            const CVec acc = cumulative(h, u.dt);
            for (long n = 0; n < out.count; ++n) {
                const long idx = out.first + n - u.first;
                g(n, k) = (std::polar(1.0, om * u.t(idx)) * acc(idx)).imag() / om;
            }
        } else {
            // int_{t_n}^{inf} = total - int_{-inf}^{t_n}
            for (long n = 0; n < u.count; ++n) h(n) = std::polar(1.0, om * u.t(n)) * f(n, k);
            const CVec acc = cumulative(h, u.dt);
            const Complex total = acc(u.count - 1);
            for (long n = 0; n < out.count; ++n) {
                const long idx = out.first + n - u.first;
                g(n, k) = (std::polar(1.0, -om * u.t(idx)) * (total - acc(idx))).imag() / om;
            }
        }
    }
    return GridFunction{out, g * model.mode_matrix().transpose()};
}

double pde_residual(const AdsStripModel& model, const GridFunction& u, const BulkTestFunction& v, double x_window) {
    require_same_step(model, u.grid);
    const Mat pu = kg_apply(model, u.values, u.grid.dt);
    // A K-mode solution solves P u = cos^2 x (Pi_K v~), so that is the target.
    const Mat proj = realign(mode_projections(model, v), v.grid, u.grid);
    Mat target = proj * model.mode_matrix().transpose();
    for (int i = 0; i < model.N(); ++i) {
        const double c = std::cos(model.x()(i));
        target.col(i) *= c * c;
    }
    double worst = 0.0;
    double scale = 0.0;
    for (long n = 8; n + 8 < u.grid.count; ++n) {
        for (int i = 0; i < model.N(); ++i) {
            if (std::abs(model.x()(i)) > x_window) continue;
            worst = std::max(worst, std::abs(pu(n, i) - target(n, i)));
            scale = std::max(scale, std::abs(target(n, i)));
        }
    }
    return scale > 0.0 ? worst / scale : worst;
}

GridFunction commutator_apply(const AdsStripModel& model, const BulkTestFunction& v, const TimeGrid& out) {
    GridFunction ret = propagator_apply(model, v, PropagatorKind::Retarded, out);
    ret.values -= propagator_apply(model, v, PropagatorKind::Advanced, out).values;
    return ret;
}

double symplectic_form(const AdsStripModel& model, const BulkTestFunction& v1, const BulkTestFunction& v2) {
    check_support(model, v2);
    const Mat g = commutator_apply(model, v1, v2.grid).values;
    const Mat dens = density_samples(model, v2);
    double acc = 0.0;
    for (long n = 0; n < v2.grid.count; ++n) acc += dens.row(n).cwiseProduct(g.row(n)).dot(model.weights());
    return acc * v2.grid.dt;
}

Vec embed(const OneParticleVector& v) {
    const long K = v.coeffs.size();
    Vec out(2 * K);
    out.head(K) = v.coeffs.real();
    out.tail(K) = v.coeffs.imag();
    return out;
}

CVec unembed(const Vec& v) {
    if (v.size() % 2 != 0) throw Error(ErrorCode::InputShape, "embedded vector must have even length");
    const long K = v.size() / 2;
    CVec out(K);
    for (long k = 0; k < K; ++k) out(k) = Complex(v(k), v(K + k));
    return out;
}

PhaseSpace mode_phase_space(int K, const Tolerances& tol) {
    Mat eta = Mat::Identity(2 * K, 2 * K);
    Mat sigma = Mat::Zero(2 * K, 2 * K);
    sigma.topRightCorner(K, K) = 2.0 * Mat::Identity(K, K);
    sigma.bottomLeftCorner(K, K) = -2.0 * Mat::Identity(K, K);
    return PhaseSpace(std::move(eta), std::move(sigma), tol);
}

GroundStateForms ground_state_forms(const AdsStripModel& model, const std::vector<BulkTestFunction>& test_set) {
    if (test_set.empty()) throw Error(ErrorCode::InvalidInput, "ground_state_forms needs a non-empty test set");
    const int n = static_cast<int>(test_set.size());
    std::vector<CVec> coeffs;
    GroundStateForms out{mode_phase_space(model.K(), model.tol()), Mat(n, n), Mat(n, n), {}, false};
    for (const auto& v : test_set) {
        OneParticleVector c = one_particle_map(model, v);
        out.embedded.push_back(embed(c));
        coeffs.push_back(std::move(c.coeffs));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Complex g = coeffs[i].dot(coeffs[j]); // conjugates the first argument
            out.gram_eta(i, j) = g.real();
            out.gram_sigma(i, j) = 2.0 * g.imag();
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(out.gram_eta, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    out.degenerate = top <= 0.0 || es.eigenvalues().minCoeff() <= model.tol().rank * top;
    return out;
}

Vec boundary_trace(const AdsStripModel& model, const OneParticleVector& c, Component component, const Vec& times) {
    if (c.coeffs.size() != model.K()) throw Error(ErrorCode::InputShape, "coefficient vector length != K");
    const Vec beta = model.betas(component);
    Vec out = Vec::Zero(times.size());
    for (long n = 0; n < times.size(); ++n) {
        Complex acc = 0.0;
        for (int k = 0; k < model.K(); ++k) {
            const double om = model.omegas()(k);
            acc += beta(k) / std::sqrt(2.0 * om) * std::polar(1.0, -om * times(n)) * c.coeffs(k);
        }
        out(n) = acc.real();
    }
    return out;
}

Vec boundary_trace_extrapolated(const AdsStripModel& model,
                                const OneParticleVector& c,
                                Component component,
                                const Vec& times) {
    if (c.coeffs.size() != model.K()) throw Error(ErrorCode::InputShape, "coefficient vector length != K");
    constexpr int kPoints = 8;
    std::vector<int> idx;
    for (int s = 0; s < kPoints; ++s) {
        idx.push_back(component == Component::Minus ? model.first_interior_index() + s
                                                    : model.last_interior_index() - s);
    }
    const double p = model.nu_plus();
    std::vector<double> svals;
    std::vector<double> scale;
    for (int i : idx) {
        svals.push_back(std::sin(model.x()(i)));
        scale.push_back(std::pow(std::cos(model.x()(i)), -p));
    }
    const double target = component == Component::Minus ? -1.0 : 1.0;
    Vec out(times.size());
    std::vector<double> ys(kPoints);
    for (long n = 0; n < times.size(); ++n) {
        for (int s = 0; s < kPoints; ++s) {
            Complex acc = 0.0;
            for (int k = 0; k < model.K(); ++k) {
                const double om = model.omegas()(k);
                acc += model.mode_matrix()(idx[s], k) / std::sqrt(2.0 * om) * std::polar(1.0, -om * times(n)) *
                       c.coeffs(k);
            }
            ys[s] = scale[s] * acc.real();
        }
        out(n) = numerics::neville(svals, ys, target);
    }
    return out;
}

OneParticleVector dual_boundary_map(const AdsStripModel& model, const BoundaryTestFunction& f) {
    OneParticleVector out;
    out.origin = OneParticleVector::Origin::Boundary;
    out.coeffs = CVec::Zero(model.K());
    if (f.grid.count == 0) return out;
    require_same_step(model, f.grid);
    if (f.samples.size() != f.grid.count) throw Error(ErrorCode::InputShape, "boundary samples do not match grid");
    const Vec beta = model.betas(f.component);
    for (int k = 0; k < model.K(); ++k) {
        const double om = model.omegas()(k);
        Complex acc = 0.0;
        for (long n = 0; n < f.grid.count; ++n) acc += std::polar(1.0, om * f.grid.t(n)) * f.samples(n);
        out.coeffs(k) = acc * f.grid.dt * beta(k) / std::sqrt(2.0 * om);
    }
    return out;
}

double boundary_pairing(const AdsStripModel& model, const BoundaryTestFunction& f, const OneParticleVector& c) {
    if (f.grid.count == 0) return 0.0;
    Vec times(f.grid.count);
    for (long n = 0; n < f.grid.count; ++n) times(n) = f.grid.t(n);
    const Vec g = boundary_trace(model, c, f.component, times);
    return f.samples.dot(g) * f.grid.dt;
}

double BoundaryRegion::measure() const {
    double m = 0.0;
    for (const auto& s : segments) m += s.interval.b - s.interval.a;
    return m;
}

UcReport uc_scan(const AdsStripModel& model, const BoundaryRegion& region, int K_eff, double t_step) {
    if (K_eff < 1 || K_eff > model.K()) throw Error(ErrorCode::InvalidInput, "K_eff must lie in [1, K]");
    if (!(t_step > 0.0)) throw Error(ErrorCode::InvalidInput, "t_step must be positive");
    UcReport rep;
    if (region.empty()) return rep;

    std::vector<std::pair<Component, double>> samples;
    for (const auto& seg : region.segments) {
        const long j0 = static_cast<long>(std::floor(seg.interval.a / t_step));
        const long j1 = static_cast<long>(std::ceil(seg.interval.b / t_step));
        for (long j = j0; j <= j1; ++j) {
            const double t = static_cast<double>(j) * t_step;
            if (t > seg.interval.a && t < seg.interval.b) samples.emplace_back(seg.component, t);
        }
    }
    rep.rows = static_cast<int>(samples.size());
    if (rep.rows < 2 * K_eff) {
        throw Error(ErrorCode::Underdetermined, std::to_string(rep.rows) + " samples for " +
                                                    std::to_string(2 * K_eff) + " unknowns");
    }
    Mat a(rep.rows, 2 * K_eff);
    const double root = std::sqrt(t_step);
    for (int r = 0; r < rep.rows; ++r) {
        const Vec beta = model.betas(samples[r].first);
        const double t = samples[r].second;
        for (int k = 0; k < K_eff; ++k) {
            const double om = model.omegas()(k);
            const double amp = root * beta(k) / std::sqrt(2.0 * om);
            a(r, k) = amp * std::cos(om * t);
            a(r, K_eff + k) = amp * std::sin(om * t);
        }
    }
    // Jacobi keeps the tiny singular values that divide-and-conquer deflates to zero.
    const Vec s = Eigen::JacobiSVD<Mat, Eigen::ColPivHouseholderQRPreconditioner>(a).singularValues();
    rep.singular_values.assign(s.data(), s.data() + s.size());
    rep.sigma_min = s(s.size() - 1);
    return rep;
}

} // namespace adsholo
