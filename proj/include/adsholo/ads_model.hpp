#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adsholo/linalg.hpp"
#include "adsholo/phase_core.hpp"
#include "adsholo/tolerances.hpp"

namespace adsholo {

// Klein-Gordon field on the AdS_2 strip  g = (dt^2 - dx^2) / cos^2 x,  x in (-pi/2, pi/2),
// with Dirichlet (z^{nu_+}) behaviour at both boundary components, z = cos x.
// Spatial operator:  A = -d^2/dx^2 + (nu^2 - 1/4) sec^2 x + W(x).

enum class Component { Minus, Plus };

const char* to_string(Component c);

/// One smooth compactly supported term of the interior potential W(x).
struct PotentialBump {
    double amplitude = 0.0;
    double center = 0.0;
    double half_width = 0.1;
};

struct Perturbation {
    std::vector<PotentialBump> bumps;

    double operator()(double x) const;
    bool empty() const { return bumps.empty(); }
};

struct ModelParams {
    double nu = 0.7;
    int K = 30;
    int N = 512;
    Perturbation perturbation;
    /// Extra unperturbed modes used by the Galerkin solve when W != 0.
    int galerkin_extra = 48;
    /// Compare the spectrum with the finite-difference oracle while building.
    bool cross_validate = true;
};

struct Mode {
    int k = 0;
    double omega = 0.0;
    Vec values;             // samples on the model grid
    double beta_minus = 0.0;
    double beta_plus = 0.0;
};

/// Uniform time lattice t_n = n * dt for n in [first, first + count).
struct TimeGrid {
    double dt = 0.0;
    long first = 0;
    long count = 0;

    double t(long i) const { return static_cast<double>(first + i) * dt; }
    long last() const { return first + count; } // one past the end
};

struct Rect {
    double t0, t1, x0, x1;
};

struct Interval {
    double a, b;
};

/// Values on (time lattice) x (model x-grid); rows are times.
struct BulkTestFunction {
    TimeGrid grid;
    Mat samples;
    std::vector<Rect> support;
    bool densitized = false; // samples already carry the cos^{-2} x measure factor
};

struct BoundaryTestFunction {
    Component component = Component::Minus;
    TimeGrid grid;
    Vec samples;
    std::vector<Interval> support;
};

struct OneParticleVector {
    enum class Origin { Bulk, Boundary, Manual };
    CVec coeffs;
    Origin origin = Origin::Manual;
};

/// A solution sampled on (time lattice) x (model x-grid).
struct GridFunction {
    TimeGrid grid;
    Mat values;
};

class AdsStripModel {
public:
    double nu() const { return nu_; }
    double nu_plus() const { return nu_ + 0.5; }
    double mass() const { return nu_ * nu_ - 0.25; }
    int K() const { return static_cast<int>(modes_.size()); }
    int N() const { return static_cast<int>(x_.size()); }
    const Vec& x() const { return x_; }
    const Vec& weights() const { return w_; }
    const Vec& potential() const { return potential_; }
    const Perturbation& perturbation() const { return perturbation_; }
    const std::vector<Mode>& modes() const { return modes_; }
    const Tolerances& tol() const { return tol_; }

    /// N x K matrix of mode samples.
    const Mat& mode_matrix() const { return phi_; }
    const Vec& omegas() const { return omega_; }
    Vec betas(Component c) const;

    /// Lattice step for every time-sampled object built on this model (omega_max * dt = 0.2).
    double time_step() const { return dt_; }

    /// Mode values at an arbitrary x in the open strip.
    Vec modes_at(double x) const;

    /// Largest |int phi_j phi_k dx - delta_jk| on the model grid.
    double orthonormality_defect() const { return ortho_defect_; }
    /// Largest |omega_k - omega_k^FD| over the cross-validated modes (NaN if skipped).
    double fd_deviation() const { return fd_deviation_; }
    int fd_checked_modes() const { return fd_checked_; }
    /// Largest |omega_k - (nu_+ + k)| (unperturbed models only, else NaN).
    double closed_form_deviation() const { return closed_form_deviation_; }

    /// First and last grid indices a test function may touch.
    int first_interior_index() const { return tol_.support_margin; }
    int last_interior_index() const { return N() - 1 - tol_.support_margin; }

private:
    friend AdsStripModel build_model(const ModelParams& params, const Tolerances& tol);

    double nu_ = 0.0;
    Vec x_;
    Vec w_;
    Vec potential_;
    Perturbation perturbation_;
    std::vector<Mode> modes_;
    Mat phi_;
    Vec omega_;
    Vec beta_minus_;
    Vec beta_plus_;
    // Galerkin coefficients in the unperturbed basis (empty when W = 0).
    Mat galerkin_;
    int basis_size_ = 0;
    double dt_ = 0.0;
    double ortho_defect_ = 0.0;
    double fd_deviation_ = 0.0;
    int fd_checked_ = 0;
    double closed_form_deviation_ = 0.0;
    Tolerances tol_;
};

AdsStripModel build_model(const ModelParams& params, const Tolerances& tol = {});

/// Finite-difference spectrum (first `count` frequencies) of the spatial operator,
/// written for psi = cos^{-nu_+} phi in conservative form on a cell-centred grid
/// of n cells, followed by one Richardson step against the 2n grid.
Vec fd_spectrum(double nu, int count, int n, const Perturbation& perturbation = {});

/// Single-grid variant without extrapolation.
Vec fd_spectrum_raw(double nu, int count, int n, const Perturbation& perturbation = {});

// ---- test functions -------------------------------------------------------

/// Sample f(t, x) on the model's lattice over the bounding box of `support`
/// (plus a zero pad for finite-difference stencils). When `densitize` is true the
/// stored samples are cos^{-2}(x) f and the flag is set.
BulkTestFunction sample_bulk(const AdsStripModel& model,
                             const std::function<double(double, double)>& f,
                             std::vector<Rect> support,
                             bool densitize = true);

BoundaryTestFunction sample_boundary(const AdsStripModel& model,
                                     Component component,
                                     const std::function<double(double)>& f,
                                     std::vector<Interval> support);

/// Throws SupportMargin when the samples reach the outermost margin cells.
void check_support(const AdsStripModel& model, const BulkTestFunction& v);

/// Samples of cos^{-2} x v (the density against dt dx).
Mat density_samples(const AdsStripModel& model, const BulkTestFunction& v);

/// Samples of v as a function (measure factor removed).
Mat function_samples(const AdsStripModel& model, const BulkTestFunction& v);

// ---- operations -----------------------------------------------------------

/// (Kv)_k = (2 omega_k)^{-1/2} int int phi_k(x) e^{i omega_k t} v~(t, x) dt dx
OneParticleVector one_particle_map(const AdsStripModel& model, const BulkTestFunction& v);

/// P w = cos^2 x (w_tt - w_xx + W w) + (nu^2 - 1/4) w by high-order finite
/// differences; the result is a non-densitized test function on w's grid.
BulkTestFunction apply_kg_operator(const AdsStripModel& model, const BulkTestFunction& w);

enum class PropagatorKind { Retarded, Advanced };

/// Dirichlet retarded / advanced solution of P u = v on `out` (which must share
/// the model's time step).
GridFunction propagator_apply(const AdsStripModel& model,
                              const BulkTestFunction& v,
                              PropagatorKind which,
                              const TimeGrid& out);

/// G v = (retarded - advanced) v on `out`.
GridFunction commutator_apply(const AdsStripModel& model, const BulkTestFunction& v, const TimeGrid& out);

/// Relative max-norm residual of P u - cos^2 x (Pi_K v~) over interior grid points
/// with |x| <= x_window and at least 8 lattice steps away from the ends of u's grid.
/// Pi_K is the projection onto the model's K modes, so the residual measures the
/// time stepping and the finite-difference P rather than the mode cutoff.
double pde_residual(const AdsStripModel& model, const GridFunction& u, const BulkTestFunction& v, double x_window);

/// sigma(v1, v2) = (v2 | G v1)_{L^2(M, g)} with G = retarded - advanced, by
/// physical-space quadrature. This orientation equals 2 Im <K v1 | K v2>.
double symplectic_form(const AdsStripModel& model, const BulkTestFunction& v1, const BulkTestFunction& v2);

struct GroundStateForms {
    PhaseSpace phase_space;   // eta = Re Gram, sigma = 2 Im Gram on R^{2K}
    Mat gram_eta;             // on the test set
    Mat gram_sigma;
    std::vector<Vec> embedded; // test functions as real 2K-vectors
    bool degenerate = false;
};

GroundStateForms ground_state_forms(const AdsStripModel& model, const std::vector<BulkTestFunction>& test_set);

/// Real 2K-vector (Re c, Im c) and its inverse.
Vec embed(const OneParticleVector& v);
CVec unembed(const Vec& v);

/// Canonical phase space of the truncated one-particle space.
PhaseSpace mode_phase_space(int K, const Tolerances& tol = {});

/// t -> Re sum_k (2 omega_k)^{-1/2} beta_k e^{-i omega_k t} c_k
Vec boundary_trace(const AdsStripModel& model, const OneParticleVector& c, Component component, const Vec& times);

/// Same trace obtained by extrapolating cos^{-nu_+} x E(t, x) from the grid points
/// next to the boundary (independent cross-check of boundary_trace).
Vec boundary_trace_extrapolated(const AdsStripModel& model,
                                const OneParticleVector& c,
                                Component component,
                                const Vec& times);

/// coeffs_k = (2 omega_k)^{-1/2} beta_k int f(t) e^{i omega_k t} dt
OneParticleVector dual_boundary_map(const AdsStripModel& model, const BoundaryTestFunction& f);

/// int f(t) g(t) dt on f's lattice, with g = boundary_trace(c).
double boundary_pairing(const AdsStripModel& model, const BoundaryTestFunction& f, const OneParticleVector& c);

struct BoundaryRegion {
    struct Segment {
        Component component;
        Interval interval;
    };
    std::vector<Segment> segments;

    bool empty() const { return segments.empty(); }
    double measure() const;
};

struct UcReport {
    double sigma_min = 0.0;
    std::vector<double> singular_values;
    int rows = 0;
};

/// Singular values of the sampled trace map R^{2 K_eff} -> samples on O; samples
/// sit on the lattice j * t_step inside each open interval, weighted by sqrt(t_step).
UcReport uc_scan(const AdsStripModel& model, const BoundaryRegion& region, int K_eff, double t_step);

} // namespace adsholo
