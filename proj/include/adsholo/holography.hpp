#pragma once

#include <cstdint>
#include <vector>

#include "adsholo/ads_model.hpp"
#include "adsholo/tolerances.hpp"

namespace adsholo {

/// Union of (t, x) rectangles in the bulk.
struct BulkRegion {
    std::vector<Rect> rects;

    bool empty() const { return rects.empty(); }
};

struct ExperimentPlan {
    ModelParams model;
    BoundaryRegion O;
    BulkRegion V;
    std::vector<int> ladder{25, 50, 100, 200, 400};
    int bulk_count = 10;
    std::uint64_t seed = 1;
    Tolerances tol;
    double uc_step = 0.01;     // boundary sample step for the sigma_min reference
    int weyl_n_max = 40;       // Fock truncation of the reduced Weyl experiment
};

/// Throws InvalidInput on a malformed plan (ladder not strictly increasing, ...).
void validate_plan(const ExperimentPlan& plan);

/// The first `size` elements of a fixed enumeration of smooth bumps in O.
/// Level l puts 2^l centres in every segment; each centre carries a plain bump
/// and a cos/sin pair modulated at a seeded frequency in [0, omega_max]. The
/// list for a larger size therefore extends the list for a smaller one.
std::vector<BoundaryTestFunction> boundary_dictionary(const AdsStripModel& model,
                                                      const BoundaryRegion& O,
                                                      int size,
                                                      std::uint64_t seed);

/// `count` seeded smooth bumps inside V with random modulated envelopes,
/// densitized at ingestion.
std::vector<BulkTestFunction> bulk_generators(const AdsStripModel& model,
                                              const BulkRegion& V,
                                              int count,
                                              std::uint64_t seed);

struct InclusionRow {
    int dict_size = 0;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    bool witness_ok = true;
    double sigma_min_ref = 0.0;
    int bd_rank = 0;
};

struct InclusionTable {
    std::vector<InclusionRow> rows;
    std::vector<double> final_per_generator;
    bool monotone = true;          // within tol.monotonicity_slack
    bool witness_ok = true;        // at every rung
    double plateau_ratio = 0.0;    // last max_residual / first max_residual
};

InclusionTable run_inclusion(const AdsStripModel& model, const ExperimentPlan& plan);
InclusionTable run_inclusion(const ExperimentPlan& plan);

struct WeylReport {
    std::vector<int> dict_size;
    std::vector<double> distances;       // ||a_n - w||_eta with ||w||_eta = 1
    std::vector<double> errors_vacuum;   // ||(W(a_n) - W(w)) Omega||
    std::vector<double> errors_one;      // same on a*(e_w) Omega
    std::vector<double> errors;          // max of the two
    bool decreasing = true;              // within tol.monotonicity_slack
    // log error = log C + p log distance, least squares over rungs with distance > 0
    double lipschitz_c = 0.0;
    double exponent = 0.0;
    double r_squared = 0.0;
};

WeylReport run_weyl_convergence(const AdsStripModel& model, const ExperimentPlan& plan, int bulk_index);
WeylReport run_weyl_convergence(const ExperimentPlan& plan, int bulk_index);

/// eta-orthogonal least-squares approximation of w by span(columns of B), with
/// a Tikhonov floor tol.tikhonov * trace of the Gram.
Vec least_squares_approximant(const Mat& B, const Vec& w, const PhaseSpace& ps, const Tolerances& tol = {});

} // namespace adsholo
