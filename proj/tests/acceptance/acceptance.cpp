// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Limits below are frozen; change them only together with the README table.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "adsholo/ads_model.hpp"
#include "adsholo/ccr_fock.hpp"
#include "adsholo/config.hpp"
#include "adsholo/holography.hpp"
#include "adsholo/phase_core.hpp"

using namespace adsholo;

namespace {

constexpr double kSpectrumClosed = 1e-10;
constexpr double kSpectrumFd = 1e-6;
constexpr int kFdPoints = 2000;
constexpr double kQuotientRel = 1e-6;
constexpr double kQuotientAbs = 1e-9;
constexpr double kTwoPathRel = 1e-6;
constexpr double kDomination = 1e-6;
constexpr double kWeylRelation = 1e-6;
constexpr double kVacuum = 1e-8;
constexpr double kCommutator = 1e-8;
constexpr double kMonotoneSlack = 1e-3;
constexpr double kPlateauFactor = 1e-3;
constexpr double kContrastRatio = 10.0;
constexpr double kWeylFinal = 1e-3;
constexpr double kWeylR2 = 0.95;
constexpr int kUcModes = 10;

constexpr double kTime1 = 10.0, kTime2 = 30.0, kTime5 = 60.0, kTime6 = 300.0;

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ModelParams params(double nu, int K, bool fd = false) {
    ModelParams p;
    p.nu = nu;
    p.K = K;
    p.cross_validate = fd;
    return p;
}

const BulkRegion kV{{Rect{-0.5, 0.5, -0.8, 0.8}}};

Outcome spectrum() {
    const auto t0 = Clock::now();
    double closed = 0.0, fd = 0.0;
    for (double nu : {0.3, 0.5, 0.7, 1.2}) {
        const AdsStripModel m = build_model(params(nu, 30));
        const Vec ref = fd_spectrum(nu, 30, kFdPoints);
        for (int k = 0; k < 30; ++k) {
            closed = std::max(closed, std::abs(m.omegas()(k) - (nu + 0.5 + k)));
            fd = std::max(fd, std::abs(m.omegas()(k) - ref(k)));
        }
    }
    const double t = seconds_since(t0);
    return {closed <= kSpectrumClosed && fd <= kSpectrumFd && t < kTime1,
            "max |omega - (nu+1/2+k)| = " + fmt("%.2e", closed) + ", max |omega - omega_fd| = " + fmt("%.2e", fd) +
                ", " + fmt("%.1f", t) + " s"};
}

Outcome quotient(const AdsStripModel& m) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    bool ok = true;
    for (const auto& w : bulk_generators(m, kV, 20, 2)) {
        const double kw = one_particle_map(m, w).coeffs.norm();
        const double kpw = one_particle_map(m, apply_kg_operator(m, w)).coeffs.norm();
        ok = ok && kpw <= kQuotientRel * kw + kQuotientAbs;
        worst = std::max(worst, kpw / kw);
    }
    const double t = seconds_since(t0);
    return {ok && t < kTime2, "20 functions, max |K(Pw)|/|Kw| = " + fmt("%.2e", worst) + ", " + fmt("%.1f", t) + " s"};
}

Outcome two_paths(const AdsStripModel& m) {
    const auto bulk = bulk_generators(m, kV, 100, 3);
    BoundaryRegion O{{{Component::Minus, {-3.3, 3.3}}, {Component::Plus, {-3.3, 3.3}}}};
    const auto dict = boundary_dictionary(m, O, 50, 3);
    double sym = 0.0, riesz = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto& a = bulk[2 * i];
        const auto& b = bulk[2 * i + 1];
        const CVec ka = one_particle_map(m, a).coeffs, kb = one_particle_map(m, b).coeffs;
        const double s = symplectic_form(m, a, b);
        sym = std::max(sym, std::abs(s - 2.0 * ka.dot(kb).imag()) / (2.0 * ka.norm() * kb.norm()));

        const OneParticleVector df = dual_boundary_map(m, dict[i]);
        const OneParticleVector kv = one_particle_map(m, a);
        const double lhs = df.coeffs.dot(kv.coeffs).real();
        riesz = std::max(riesz, std::abs(lhs - boundary_pairing(m, dict[i], kv)) / (df.coeffs.norm() * kv.coeffs.norm()));
    }
    return {sym <= kTwoPathRel && riesz <= kTwoPathRel,
            "50 pairs each, symplectic vs 2 Im Gram = " + fmt("%.2e", sym) + ", Riesz = " + fmt("%.2e", riesz)};
}

Outcome purity(const AdsStripModel& m) {
    const auto gs = ground_state_forms(m, bulk_generators(m, kV, 10, 4));
    const auto pos = check_positivity(gs.phase_space, 2.0);
    const KahlerData kd = kahler_from_covariance(gs.phase_space);
    const bool ok = pos.holds && std::abs(pos.domination_norm - 2.0) <= kDomination && kd.pure && kd.doubled_dim == 0;
    return {ok, "domination_norm = " + fmt("%.15g", pos.domination_norm) + ", pure = " + (kd.pure ? "true" : "false") +
                    ", doubled_dim = " + std::to_string(kd.doubled_dim)};
}

Outcome ccr() {
    const auto t0 = Clock::now();
    auto rep = std::make_shared<const FockRep>(1, 40);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&](double r) {
        CVec h(1);
        h(0) = std::polar(r * u(rng), 2.0 * std::numbers::pi * u(rng));
        return h;
    };
    double rel = 0.0, vac = 0.0;
    for (int i = 0; i < 20; ++i) {
        const CVec h1 = draw(0.5), h2 = draw(0.5);
        const Complex ph = std::exp(Complex(0.0, -0.5 * h1.dot(h2).imag()));
        const CMat d = weyl_operator(rep, h1).entries * weyl_operator(rep, h2).entries -
                       ph * weyl_operator(rep, h1 + h2).entries;
        for (int c = 0; c < rep->dim(); ++c)
            if (rep->total_occupation(c) <= 10) rel = std::max(rel, d.col(c).norm());
        const CVec h = draw(1.0);
        const Complex w = weyl_operator(rep, h).entries(0, 0);
        vac = std::max(vac, std::abs(w - std::exp(-0.25 * h.squaredNorm())));
    }
    // the field commutator against sigma on a pure and on a mixed phase space
    double com = 0.0;
    Mat J(2, 2);
    J << 0, 1, -1, 0;
    Mat sig = Mat::Zero(4, 4);
    sig.block(0, 0, 2, 2) = 2.0 * J;
    sig.block(2, 2, 2, 2) = 2.0 * J;
    Vec diag(4);
    diag << 1, 1, 2, 2;
    for (const PhaseSpace& ps : {PhaseSpace(Mat::Identity(2, 2), 2.0 * J), PhaseSpace(Mat(diag.asDiagonal()), sig)}) {
        const KahlerData kd = kahler_from_covariance(ps);
        auto r = std::make_shared<const FockRep>(kd.kw_one_particle_dim(), kd.kw_one_particle_dim() == 1 ? 40 : 8);
        for (int i = 0; i < ps.dim(); ++i)
            for (int j = 0; j < ps.dim(); ++j) {
                const Vec vi = Vec::Unit(ps.dim(), i), vj = Vec::Unit(ps.dim(), j);
                com = std::max(com, commutator_defect(kw_field(r, kd, ps, vi), kw_field(r, kd, ps, vj),
                                                      Complex(0.0, vi.dot(ps.sigma() * vj)), r->n_max() - 2));
            }
    }
    const double t = seconds_since(t0);
    return {rel <= kWeylRelation && vac <= kVacuum && com <= kCommutator && t < kTime5,
            "Weyl relation = " + fmt("%.2e", rel) + ", vacuum = " + fmt("%.2e", vac) + ", kw commutator = " +
                fmt("%.2e", com) + ", " + fmt("%.1f", t) + " s"};
}

ExperimentPlan default_plan() {
    ExperimentPlan p = default_config().plan;
    p.model.cross_validate = false;
    return p;
}

Outcome inclusion(const InclusionTable& tab, double t) {
    bool monotone = true;
    for (std::size_t i = 1; i < tab.rows.size(); ++i)
        monotone = monotone && tab.rows[i].max_residual <= tab.rows[i - 1].max_residual + kMonotoneSlack;
    bool witness = true;
    for (const auto& r : tab.rows) witness = witness && r.witness_ok;
    const double first = tab.rows.front().max_residual, last = tab.rows.back().max_residual;
    return {monotone && witness && last <= kPlateauFactor * first && t < kTime6,
            "ladder " + fmt("%.2e", first) + " -> " + fmt("%.2e", last) + ", plateau/initial = " +
                fmt("%.2e", last / first) + ", sigma_min(O) = " + fmt("%.3f", tab.rows.front().sigma_min_ref) +
                ", " + fmt("%.2f", t) + " s"};
}

Outcome contrast(const AdsStripModel& m, const InclusionTable& base) {
    ExperimentPlan p = default_plan();
    p.O = default_config().contrast;
    const auto tab = run_inclusion(m, p);
    const double ratio = tab.rows.back().max_residual / base.rows.back().max_residual;
    return {ratio >= kContrastRatio, "one component x (-0.5, 0.5): plateau " + fmt("%.2e", tab.rows.back().max_residual) +
                                         ", ratio to default = " + fmt("%.2e", ratio)};
}

Outcome weyl(const AdsStripModel& m) {
    const WeylReport r = run_weyl_convergence(m, default_plan(), 0);
    bool decreasing = true;
    for (std::size_t i = 1; i < r.errors.size(); ++i)
        decreasing = decreasing && r.errors[i] <= r.errors[i - 1] + kMonotoneSlack;
    const double last = r.errors.back();
    std::string ladder;
    for (double e : r.errors) ladder += (ladder.empty() ? "" : " ") + fmt("%.2e", e);
    return {decreasing && last <= kWeylFinal && r.r_squared >= kWeylR2,
            "errors " + ladder + ", fit C = " + fmt("%.3f", r.lipschitz_c) + ", exponent = " +
                fmt("%.3f", r.exponent) + ", R^2 = " + fmt("%.4f", r.r_squared)};
}

Outcome uc(const AdsStripModel& m) {
    std::vector<double> s;
    s.push_back(uc_scan(m, BoundaryRegion{}, kUcModes, 0.01).sigma_min);
    const std::vector<BoundaryRegion> family{
        {{{Component::Minus, {-0.5, 0.5}}}},
        {{{Component::Minus, {-1.0, 1.0}}}},
        {{{Component::Minus, {-2.0, 2.0}}}},
        {{{Component::Minus, {-3.3, 3.3}}}},
        {{{Component::Minus, {-3.3, 3.3}}, {Component::Plus, {-3.3, 3.3}}}},
    };
    for (const auto& O : family) s.push_back(uc_scan(m, O, kUcModes, 0.01).sigma_min);
    bool ok = s.front() == 0.0;
    for (std::size_t i = 2; i < s.size(); ++i) ok = ok && s[i] >= s[i - 1];
    std::string d = "K_eff = " + std::to_string(kUcModes) + ", sigma_min:";
    for (double v : s) d += " " + fmt("%.3e", v);
    return {ok, d};
}

} // namespace

int main() {
    int failed = 0;
    auto report = [&](int n, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    };

    report(1, spectrum);
    const AdsStripModel m = build_model(params(0.7, 30));
    report(2, [&] { return quotient(m); });
    report(3, [&] { return two_paths(m); });
    report(4, [&] { return purity(m); });
    report(5, ccr);

    InclusionTable base;
    double t6 = 0.0;
    try {
        const auto t0 = Clock::now();
        base = run_inclusion(m, default_plan());
        t6 = seconds_since(t0);
    } catch (const std::exception& e) {
        std::printf("default inclusion run threw: %s\n", e.what());
    }
    report(6, [&] { return inclusion(base, t6); });
    report(7, [&] { return contrast(m, base); });
    report(8, [&] { return weyl(m); });
    report(9, [&] { return uc(m); });

    std::printf("%d of 9 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
