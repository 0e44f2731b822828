#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "adsholo/ads_model.hpp"
#include "adsholo/errors.hpp"
#include "adsholo/holography.hpp"
#include "adsholo/numerics.hpp"

using namespace adsholo;
using std::numbers::pi;

namespace {

AdsStripModel model(double nu, int K, bool fd = false) {
    ModelParams p;
    p.nu = nu;
    p.K = K;
    p.N = std::max(512, 4 * K);
    p.cross_validate = fd;
    return build_model(p);
}

// fourth-order central second derivative, used as an independent check of
// the mode equation away from the walls
template <class F>
double d2(F f, double x, double h) {
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

// plain composite Gauss-Legendre on [a, b] with `panels` 8-point panels
template <class F>
double integrate(F f, double a, double b, int panels) {
    static const double xs[] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double ws[] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double m = a + (p + 0.5) * h;
        for (int i = 0; i < 8; ++i) acc += ws[i] * f(m + 0.5 * h * xs[i]);
    }
    return acc * 0.5 * h;
}

const BulkRegion kV{{Rect{-0.5, 0.5, -0.8, 0.8}}};

} // namespace

TEST_SUITE("ads_model") {

TEST_CASE("massless case: flat Dirichlet string") {
    const AdsStripModel m = model(0.5, 12);
    CHECK(m.nu_plus() == 1.0);
    for (int k = 0; k < m.K(); ++k) {
        CHECK(m.omegas()(k) == doctest::Approx(k + 1.0).epsilon(1e-14));
        for (double x : {-1.3, -0.4, 0.0, 0.77, 1.5}) {
            const double want = std::sqrt(2.0 / pi) * std::sin((k + 1) * (x + 0.5 * pi));
            CHECK(std::abs(m.modes_at(x)(k) - want) <= 1e-12);
        }
        const double bm = (k + 1) * std::sqrt(2.0 / pi);
        CHECK(m.betas(Component::Minus)(k) == doctest::Approx(bm).epsilon(1e-12));
        CHECK(m.betas(Component::Plus)(k) == doctest::Approx((k % 2 ? -1 : 1) * bm).epsilon(1e-12));
    }
    CHECK(m.betas(Component::Minus)(0) == doctest::Approx(0.79788456).epsilon(1e-8));
}

TEST_CASE("generic nu: unit spacing, mode equation, orthonormality") {
    for (double nu : {0.3, 0.7, 1.2}) {
        CAPTURE(nu);
        const AdsStripModel m = model(nu, 10);
        for (int k = 0; k < m.K(); ++k) CHECK(std::abs(m.omegas()(k) - (nu + 0.5 + k)) <= 1e-10);
        for (int k = 1; k < m.K(); ++k) CHECK(std::abs(m.omegas()(k) - m.omegas()(k - 1) - 1.0) <= 1e-10);

        const double mass = nu * nu - 0.25;
        for (int k = 0; k < m.K(); ++k) {
            auto phi = [&](double x) { return m.modes_at(x)(k); };
            for (double x : {-1.0, -0.3, 0.2, 0.9}) {
                const double c = std::cos(x);
                const double lhs = -d2(phi, x, 1e-3) + mass / (c * c) * phi(x);
                const double w2 = m.omegas()(k) * m.omegas()(k);
                CHECK(std::abs(lhs - w2 * phi(x)) <= 1e-6 * w2);
            }
        }
        // orthonormality by an independent quadrature in theta = x + pi/2
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                const double g = integrate([&](double x) { return m.modes_at(x)(j) * m.modes_at(x)(k); }, -0.5 * pi,
                                           0.5 * pi, 64);
                CHECK(std::abs(g - (j == k ? 1.0 : 0.0)) <= 1e-8);
            }
        CHECK(m.orthonormality_defect() <= 1e-8);
    }
}

TEST_CASE("finite-difference cross-check and BF bound") {
    const AdsStripModel m = model(0.7, 30, true);
    CHECK(m.fd_checked_modes() > 0);
    CHECK(m.fd_deviation() <= 1e-6);
    try {
        model(0.0, 5);
        FAIL("expected BF-bound error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BreitenlohnerFreedman);
    }
}

TEST_CASE("one-particle map: zero and point-like source") {
    const AdsStripModel m = model(0.5, 30);
    auto zero = sample_bulk(m, [](double, double) { return 0.0; }, {Rect{-0.2, 0.2, -0.2, 0.2}});
    CHECK(one_particle_map(m, zero).coeffs.norm() == 0.0);

    const double s = 0.02;
    auto g = sample_bulk(
        m, [&](double t, double x) { return std::exp(-(t * t + x * x) / (2 * s * s)) / (2 * pi * s * s); },
        {Rect{-6 * s, 6 * s, -6 * s, 6 * s}});
    const CVec c = one_particle_map(m, g).coeffs;
    for (int k = 0; k < 6; ++k) {
        const double want = m.modes_at(0.0)(k) / std::sqrt(2.0 * (k + 1));
        CHECK(std::abs(c(k) - want) <= 1e-2 * (std::abs(want) + 0.1));
    }
}

TEST_CASE("quotient: K(Pw) vanishes") {
    const AdsStripModel m = model(0.7, 30);
    for (const auto& w : bulk_generators(m, kV, 8, 21)) {
        const double kw = one_particle_map(m, w).coeffs.norm();
        CHECK(one_particle_map(m, apply_kg_operator(m, w)).coeffs.norm() <= 1e-6 * kw + 1e-9);
    }
}

TEST_CASE("propagators: PDE, causality, antisymmetry, symplectic form") {
    const AdsStripModel m = model(0.7, 30);
    const auto v = bulk_generators(m, kV, 6, 5);
    const double window = 0.5 * pi - 0.05;
    for (int i = 0; i < 3; ++i) {
        const auto& a = v[2 * i];
        const auto& b = v[2 * i + 1];
        const TimeGrid g{a.grid.dt, a.grid.first - 60, a.grid.count + 120};
        const auto ret = propagator_apply(m, a, PropagatorKind::Retarded, g);
        const auto adv = propagator_apply(m, a, PropagatorKind::Advanced, g);
        CHECK(pde_residual(m, ret, a, window) <= 1e-5);
        CHECK(pde_residual(m, adv, a, window) <= 1e-5);
        CHECK(ret.values.topRows(50).norm() == 0.0);
        CHECK(adv.values.bottomRows(50).norm() == 0.0);

        const CVec ka = one_particle_map(m, a).coeffs, kb = one_particle_map(m, b).coeffs;
        const double scale = 2 * ka.norm() * kb.norm();
        const double sab = symplectic_form(m, a, b), sba = symplectic_form(m, b, a);
        CHECK(std::abs(sab + sba) <= 1e-8 * scale);
        CHECK(std::abs(sab - 2 * ka.dot(kb).imag()) <= 1e-6 * scale);
        CHECK(std::abs(symplectic_form(m, a, a)) <= 1e-12 * scale);
        // degenerate direction of the quotient
        const auto pb = apply_kg_operator(m, b);
        CHECK(std::abs(symplectic_form(m, a, pb)) <= 1e-6 * scale);
    }
    const BulkTestFunction zero = sample_bulk(m, [](double, double) { return 0.0; }, {Rect{-0.1, 0.1, -0.1, 0.1}});
    CHECK(propagator_apply(m, zero, PropagatorKind::Retarded, zero.grid).values.norm() == 0.0);
}

TEST_CASE("retarded solution matches d'Alembert before any wall reflection") {
    // massless case: P u = v is u_tt - u_xx = v / cos^2 x; in the window below no
    // reflection from x = +-pi/2 has arrived, so the free-line formula applies
    const AdsStripModel m = model(0.5, 200);
    const double r = 0.3;
    auto src = [&](double t, double x) {
        return numerics::bump(t / r) * numerics::bump(x / r);
    };
    const auto v = sample_bulk(m, src, {Rect{-r, r, -r, r}});
    const double dt = m.time_step();
    const TimeGrid g{dt, v.grid.first, static_cast<long>(std::ceil(1.0 / dt)) - v.grid.first + 1};
    const auto u = propagator_apply(m, v, PropagatorKind::Retarded, g);

    auto exact = [&](double t, double x) {
        const double s1 = std::min(t, r);
        if (s1 <= -r) return 0.0;
        return 0.5 * integrate(
                         [&](double s) {
                             const double lo = std::max(-r, x - (t - s)), hi = std::min(r, x + (t - s));
                             if (hi <= lo) return 0.0;
                             return integrate([&](double y) { return src(s, y) / std::pow(std::cos(y), 2); }, lo, hi, 8);
                         },
                         -r, s1, 12);
    };
    double num = 0.0, den = 0.0;
    for (long n = 0; n < g.count; n += 25) {
        const double t = g.t(n);
        if (t < 0.4) continue;
        for (int i = 0; i < m.N(); i += 4) {
            const double x = m.x()(i);
            if (std::abs(x) > 1.0) continue;
            const double ue = exact(t, x);
            num += std::pow(u.values(n, i) - ue, 2);
            den += ue * ue;
        }
    }
    CHECK(den > 0.0);
    CHECK(std::sqrt(num / den) <= 1e-3);
}

TEST_CASE("boundary trace") {
    const AdsStripModel m = model(0.5, 8);
    Vec ts = Vec::LinSpaced(41, -2.0, 2.0);
    OneParticleVector c;
    c.coeffs = CVec::Zero(8);
    CHECK(boundary_trace(m, c, Component::Minus, ts).norm() == 0.0);
    c.coeffs(0) = 1.0;
    const Vec tr = boundary_trace(m, c, Component::Minus, ts);
    for (int n = 0; n < ts.size(); ++n) CHECK(std::abs(tr(n) - std::cos(ts(n)) / std::sqrt(pi)) <= 1e-12);

    // the extrapolated trace agrees with the beta path
    const AdsStripModel g = model(0.7, 30);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    OneParticleVector a, b;
    a.coeffs = CVec(30);
    b.coeffs = CVec(30);
    for (int k = 0; k < 30; ++k) {
        a.coeffs(k) = Complex(nd(rng), nd(rng)) / double(1 + k * k);
        b.coeffs(k) = Complex(nd(rng), nd(rng)) / double(1 + k * k);
    }
    for (Component s : {Component::Minus, Component::Plus}) {
        const Vec ta = boundary_trace(g, a, s, ts), tb = boundary_trace(g, b, s, ts);
        OneParticleVector ab;
        ab.coeffs = 2.0 * a.coeffs - b.coeffs;
        CHECK((boundary_trace(g, ab, s, ts) - (2.0 * ta - tb)).norm() <= 1e-12 * ta.norm());
        CHECK((boundary_trace_extrapolated(g, a, s, ts) - ta).norm() <= 1e-5 * ta.norm());
    }
}

TEST_CASE("dual boundary map: narrow bump and Riesz identity") {
    const AdsStripModel m = model(0.5, 30);
    const BoundaryTestFunction none = sample_boundary(m, Component::Minus, [](double) { return 1.0; }, {});
    CHECK(dual_boundary_map(m, none).coeffs.norm() == 0.0);

    const double s = 0.02;
    const auto f = sample_boundary(m, Component::Minus, [&](double t) { return numerics::bump(t / s); },
                                   {Interval{-s, s}});
    // unit mass on the sampling grid itself
    const CVec c = dual_boundary_map(m, f).coeffs / (f.samples.sum() * f.grid.dt);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(c(k) - std::sqrt((k + 1) / pi)) <= 1e-2 * std::sqrt((k + 1) / pi));

    const AdsStripModel g = model(0.7, 30);
    BoundaryRegion O{{{Component::Minus, {-3.3, 3.3}}, {Component::Plus, {-3.3, 3.3}}}};
    const auto dict = boundary_dictionary(g, O, 20, 8);
    const auto bulk = bulk_generators(g, kV, 20, 9);
    for (int i = 0; i < 20; ++i) {
        const OneParticleVector df = dual_boundary_map(g, dict[i]);
        const OneParticleVector kv = one_particle_map(g, bulk[i]);
        const double lhs = df.coeffs.dot(kv.coeffs).real();
        CHECK(std::abs(lhs - boundary_pairing(g, dict[i], kv)) <= 1e-7 * df.coeffs.norm() * kv.coeffs.norm());
    }
}

TEST_CASE("ground-state forms") {
    const AdsStripModel m = model(0.7, 10);
    const auto one = bulk_generators(m, kV, 1, 2);
    const auto gs = ground_state_forms(m, one);
    CHECK(std::abs(gs.gram_sigma(0, 0)) <= 1e-14);
    CHECK(gs.phase_space.dim() == 20);
}

TEST_CASE("unique-continuation scan") {
    const AdsStripModel m = model(0.7, 30);
    CHECK(uc_scan(m, BoundaryRegion{}, 10, 0.01).sigma_min == 0.0);
    BoundaryRegion full{{{Component::Minus, {-pi, pi}}}};
    CHECK(uc_scan(m, full, 1, 0.01).sigma_min > 0.1);

    double prev = 0.0;
    for (double half : {0.5, 1.0, 1.5, 2.5, 3.3}) {
        BoundaryRegion O{{{Component::Minus, {-half, half}}}};
        const double s = uc_scan(m, O, 10, 0.01).sigma_min;
        CHECK(s >= prev);
        prev = s;
    }
}

} // TEST_SUITE
