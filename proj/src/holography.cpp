#include "adsholo/holography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>

#include "adsholo/ccr_fock.hpp"
#include "adsholo/errors.hpp"
#include "adsholo/numerics.hpp"
#include "adsholo/phase_core.hpp"

namespace adsholo {

namespace {

// Bulk generators draw from their own stream so that dictionary and bulk
// families stay independent when only one of them changes.
constexpr std::uint64_t kBulkStream = 0x9e3779b97f4a7c15ULL;

struct Embedded {
    Mat boundary;           // 2K x dict_size
    std::vector<Vec> bulk;  // 2K each
    PhaseSpace ps;
};

Embedded embed_plan(const AdsStripModel& model, const ExperimentPlan& plan) {
    const int dmax = plan.ladder.empty() ? 0 : plan.ladder.back();
    const auto dict = boundary_dictionary(model, plan.O, dmax, plan.seed);
    const auto bulk = bulk_generators(model, plan.V, plan.bulk_count, plan.seed ^ kBulkStream);

    Mat B(2 * model.K(), static_cast<long>(dict.size()));
    for (std::size_t i = 0; i < dict.size(); ++i) B.col(static_cast<long>(i)) = embed(dual_boundary_map(model, dict[i]));
    if (bulk.empty()) return {std::move(B), {}, mode_phase_space(model.K(), plan.tol)};
    GroundStateForms forms = ground_state_forms(model, bulk);
    return {std::move(B), std::move(forms.embedded), std::move(forms.phase_space)};
}

SubspaceGenerators prefix(const Mat& B, int n, const char* label) {
    SubspaceGenerators g;
    g.label = label;
    const int m = std::min<int>(n, static_cast<int>(B.cols()));
    for (int i = 0; i < m; ++i) g.generators.push_back(B.col(i));
    return g;
}

// Least-squares fit of y = a + b x; returns {a, b, R^2}.
std::array<double, 3> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) return {my, 0.0, 0.0};
    const double b = sxy / sxx;
    const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return {my - b * mx, b, r2};
}

} // namespace

void validate_plan(const ExperimentPlan& plan) {
    if (plan.ladder.empty()) throw Error(ErrorCode::InvalidInput, "dictionary ladder is empty");
    if (plan.ladder.front() < 1) throw Error(ErrorCode::InvalidInput, "dictionary sizes must be >= 1");
    for (std::size_t i = 1; i < plan.ladder.size(); ++i) {
        if (plan.ladder[i] <= plan.ladder[i - 1]) {
            throw Error(ErrorCode::InvalidInput, "dictionary ladder must be strictly increasing");
        }
    }
    if (plan.bulk_count < 0) throw Error(ErrorCode::InvalidInput, "bulk_count must be >= 0");
    if (!(plan.uc_step > 0.0)) throw Error(ErrorCode::InvalidInput, "uc_step must be positive");
    if (plan.weyl_n_max < 1) throw Error(ErrorCode::InvalidInput, "weyl_n_max must be >= 1");
    for (const auto& s : plan.O.segments) {
        if (!(s.interval.a < s.interval.b)) throw Error(ErrorCode::InvalidInput, "empty boundary interval in O");
    }
    for (const Rect& r : plan.V.rects) {
        if (!(r.t0 < r.t1) || !(r.x0 < r.x1)) throw Error(ErrorCode::InvalidInput, "empty rectangle in V");
    }
}

std::vector<BoundaryTestFunction> boundary_dictionary(const AdsStripModel& model,
                                                      const BoundaryRegion& O,
                                                      int size,
                                                      std::uint64_t seed) {
    if (size < 1) throw Error(ErrorCode::InvalidInput, "dictionary size must be >= 1");
    std::vector<BoundaryTestFunction> out;
    if (O.empty()) return out;
    const double omega_max = model.omegas().maxCoeff();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.0, omega_max);
    out.reserve(size);
    for (int level = 0; static_cast<int>(out.size()) < size; ++level) {
        const long cells = 1L << level;
        for (const auto& seg : O.segments) {
            const double a = seg.interval.a;
            const double len = seg.interval.b - a;
            for (long c = 0; c < cells && static_cast<int>(out.size()) < size; ++c) {
                const double h = len / static_cast<double>(cells);
                const double centre = a + (static_cast<double>(c) + 0.5) * h;
                const double r = std::min({0.75 * h, centre - a, seg.interval.b - centre});
                const double om = freq(rng);
                for (int kind = 0; kind < 3 && static_cast<int>(out.size()) < size; ++kind) {
                    auto f = [=](double t) {
                        const double env = numerics::bump((t - centre) / r);
                        if (kind == 1) return env * std::cos(om * (t - centre));
                        if (kind == 2) return env * std::sin(om * (t - centre));
                        return env;
                    };
                    out.push_back(sample_boundary(model, seg.component, f, {Interval{centre - r, centre + r}}));
                }
            }
        }
    }
    return out;
}

std::vector<BulkTestFunction> bulk_generators(const AdsStripModel& model,
                                              const BulkRegion& V,
                                              int count,
                                              std::uint64_t seed) {
    std::vector<BulkTestFunction> out;
    if (V.empty()) return out;
    if (count < 1) throw Error(ErrorCode::InvalidInput, "bulk generator count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    for (int g = 0; g < count; ++g) {
        const auto pick = std::min<std::size_t>(V.rects.size() - 1,
                                                static_cast<std::size_t>(unit(rng) * static_cast<double>(V.rects.size())));
        const Rect& box = V.rects[pick];
        const double rt = uniform(0.4, 0.9) * 0.5 * (box.t1 - box.t0);
        const double rx = uniform(0.4, 0.9) * 0.5 * (box.x1 - box.x0);
        const double tc = uniform(box.t0 + rt, box.t1 - rt);
        const double xc = uniform(box.x0 + rx, box.x1 - rx);
        const double kt = uniform(-3.0, 3.0);
        const double kx = uniform(-3.0, 3.0);
        const double phase = uniform(0.0, 2.0 * std::numbers::pi);
        const double amp = uniform(0.2, 0.6);
        auto f = [=](double t, double x) {
            return numerics::bump((t - tc) / rt, numerics::kResolvedSteepness) *
                   numerics::bump((x - xc) / rx, numerics::kResolvedSteepness) *
                   (1.0 + amp * std::sin(kt * (t - tc) + kx * (x - xc) + phase));
        };
        out.push_back(sample_bulk(model, f, {Rect{tc - rt, tc + rt, xc - rx, xc + rx}}, true));
    }
    return out;
}

InclusionTable run_inclusion(const AdsStripModel& model, const ExperimentPlan& plan) {
    validate_plan(plan);
    const Embedded e = embed_plan(model, plan);
    const double sigma_ref = plan.O.empty() ? 0.0 : uc_scan(model, plan.O, model.K(), plan.uc_step).sigma_min;

    SubspaceGenerators bulk;
    bulk.label = "bulk";
    bulk.generators = e.bulk;

    InclusionTable table;
    for (int n : plan.ladder) {
        const InclusionReport rep = inclusion_check(prefix(e.boundary, n, "boundary"), bulk, e.ps, plan.tol, plan.seed);
        InclusionRow row;
        row.dict_size = n;
        row.max_residual = rep.max_residual;
        row.mean_residual = rep.per_generator.empty()
                                ? 0.0
                                : std::accumulate(rep.per_generator.begin(), rep.per_generator.end(), 0.0) /
                                      static_cast<double>(rep.per_generator.size());
        row.witness_ok = rep.witness_ok;
        row.sigma_min_ref = sigma_ref;
        row.bd_rank = rep.bd_rank;
        if (!table.rows.empty() && row.max_residual > table.rows.back().max_residual + plan.tol.monotonicity_slack) {
            table.monotone = false;
        }
        table.witness_ok = table.witness_ok && row.witness_ok;
        table.rows.push_back(row);
        table.final_per_generator = rep.per_generator;
    }
    const double first = table.rows.front().max_residual;
    table.plateau_ratio = first > 0.0 ? table.rows.back().max_residual / first : 0.0;
    return table;
}

InclusionTable run_inclusion(const ExperimentPlan& plan) {
    validate_plan(plan);
    return run_inclusion(build_model(plan.model, plan.tol), plan);
}

Vec least_squares_approximant(const Mat& B, const Vec& w, const PhaseSpace& ps, const Tolerances& tol) {
    if (B.rows() != ps.dim() || w.size() != ps.dim()) throw Error(ErrorCode::InputShape, "approximant dimension mismatch");
    if (B.cols() == 0) return Vec::Zero(ps.dim());
    Mat G = B.transpose() * ps.eta() * B;
    const double floor = tol.tikhonov * G.trace();
    G.diagonal().array() += floor;
    const Vec coef = G.ldlt().solve(B.transpose() * (ps.eta() * w));
    return B * coef;
}

WeylReport run_weyl_convergence(const AdsStripModel& model, const ExperimentPlan& plan, int bulk_index) {
    validate_plan(plan);
    const Embedded e = embed_plan(model, plan);
    if (bulk_index < 0 || bulk_index >= static_cast<int>(e.bulk.size())) {
        throw Error(ErrorCode::InvalidInput, "bulk_index outside the generator list");
    }
    const PhaseSpace& ps = e.ps;
    const Tolerances& tol = plan.tol;

    {
        SubspaceGenerators one;
        one.generators.push_back(e.bulk[bulk_index]);
        const InclusionReport top = inclusion_check(prefix(e.boundary, plan.ladder.back(), "boundary"), one, ps, tol);
        if (!(top.max_residual < 0.1)) {
            throw Error(ErrorCode::InvalidInput, "bulk generator is not approximated at the top rung (residual " +
                                                     std::to_string(top.max_residual) + ")");
        }
    }

    const double wn = ps.norm(e.bulk[bulk_index]);
    if (!(wn > 0.0)) throw Error(ErrorCode::RankDeficient, "bulk generator has zero eta-norm");
    const Vec w = e.bulk[bulk_index] / wn;
    const KahlerData full = kahler_from_covariance(ps, tol);
    if (!full.pure) throw Error(ErrorCode::InvalidInput, "Weyl experiment needs a pure state");
    const Vec jw = full.j * w;

    WeylReport rep;
    for (int n : plan.ladder) {
        const Vec a = least_squares_approximant(e.boundary.leftCols(std::min<long>(n, e.boundary.cols())), w, ps, tol);

        // Real basis of span_C{w, a} for the complex structure j, eta-orthonormal.
        Vec r = a - ps.inner(w, a) * w - ps.inner(jw, a) * jw;
        const double rn = ps.norm(r);
        const bool two = rn > 1e-12 * std::max(1.0, ps.norm(a));
        Mat R(ps.dim(), two ? 4 : 2);
        R.col(0) = w;
        R.col(1) = jw;
        if (two) {
            r /= rn;
            R.col(2) = r;
            R.col(3) = full.j * r;
        }
        const PhaseSpace reduced(R.transpose() * ps.eta() * R, R.transpose() * ps.sigma() * R, tol);
        const KahlerData kd = kahler_from_covariance(reduced, tol);
        if (!kd.pure || kd.complex_dim() != R.cols() / 2) {
            throw Error(ErrorCode::RankDeficient, "compressed phase space lost its Kahler structure");
        }
        const Vec wc = R.transpose() * ps.eta() * w;
        const Vec ac = R.transpose() * ps.eta() * a;

        auto rep_f = std::make_shared<const FockRep>(kd.kw_one_particle_dim(), plan.weyl_n_max);
        const CVec hw = kw_one_particle(kd, reduced, wc, tol);
        const CVec psi1 = creation(rep_f, hw / hw.norm()).entries * rep_f->vacuum();
        const double e_vac =
            strong_convergence_test(rep_f, kd, reduced, {ac}, wc, {rep_f->vacuum()}, tol).errors_per_step.front();
        const double e_one = strong_convergence_test(rep_f, kd, reduced, {ac}, wc, {psi1}, tol).errors_per_step.front();

        rep.dict_size.push_back(n);
        rep.distances.push_back(ps.norm(a - w));
        rep.errors_vacuum.push_back(e_vac);
        rep.errors_one.push_back(e_one);
        rep.errors.push_back(std::max(e_vac, e_one));
        if (rep.errors.size() > 1 && rep.errors.back() > rep.errors[rep.errors.size() - 2] + tol.monotonicity_slack) {
            rep.decreasing = false;
        }
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.errors.size(); ++i) {
        if (rep.distances[i] > 0.0 && rep.errors[i] > 0.0) {
            lx.push_back(std::log(rep.distances[i]));
            ly.push_back(std::log(rep.errors[i]));
        }
    }
    if (lx.size() >= 2) {
        const auto fit = linear_fit(lx, ly);
        rep.lipschitz_c = std::exp(fit[0]);
        rep.exponent = fit[1];
        rep.r_squared = fit[2];
    }
    return rep;
}

WeylReport run_weyl_convergence(const ExperimentPlan& plan, int bulk_index) {
    validate_plan(plan);
    return run_weyl_convergence(build_model(plan.model, plan.tol), plan, bulk_index);
}

} // namespace adsholo
