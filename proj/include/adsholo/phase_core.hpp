#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adsholo/linalg.hpp"
#include "adsholo/tolerances.hpp"

namespace adsholo {

/// Finite-dimensional real phase space: a covariance (symmetric) and a
/// pre-symplectic form (antisymmetric) on R^d.
///
/// Construction validates shapes and symmetry only. Positivity of the
/// covariance is reported by check_positivity; operations that need the
/// covariance square root throw DegenerateCovariance when it is singular.
class PhaseSpace {
public:
    PhaseSpace(Mat eta, Mat sigma, const Tolerances& tol = {});

    int dim() const { return static_cast<int>(eta_.rows()); }
    const Mat& eta() const { return eta_; }
    const Mat& sigma() const { return sigma_; }

    double eta_min_eigenvalue() const { return eta_min_; }
    double eta_max_eigenvalue() const { return eta_max_; }
    bool eta_positive() const { return positive_; }

    /// Symmetric square root of eta and its inverse. Throw if eta is not
    /// strictly positive.
    const Mat& eta_sqrt() const;
    const Mat& eta_inv_sqrt() const;

    double inner(const Vec& v, const Vec& w) const;
    double norm(const Vec& v) const;

private:
    Mat eta_;
    Mat sigma_;
    Mat sqrt_;
    Mat inv_sqrt_;
    double eta_min_ = 0.0;
    double eta_max_ = 0.0;
    bool positive_ = false;
    bool singular_ = false;
};

/// Output of the complex-structure construction. `b` solves sigma = 2 eta b;
/// `b_modulus` and `j` are its eta-polar parts (with an index-order pairing
/// on ker b).
struct KahlerData {
    Mat b;
    Mat b_modulus;
    Mat j;
    bool pure = false;
    int doubled_dim = 0;

    // Complex coordinates on (R^d, j): z_k(v) = coord_re.row(k) v + i coord_im.row(k) v
    // are orthonormal for the KW scalar product, and |b| acts on z_k as
    // multiplication by modulus[k].
    Mat coord_re;
    Mat coord_im;
    Vec modulus;

    int complex_dim() const { return static_cast<int>(modulus.size()); }
    /// Number of complex directions that receive a doubling partner.
    int doubled_complex_dim() const { return doubled_dim / 2; }
    /// Complex dimension of X_KW plus the doubling block.
    int kw_one_particle_dim() const { return complex_dim() + doubled_complex_dim(); }
};

struct SubspaceGenerators {
    std::vector<Vec> generators;
    std::string label;
};

struct PositivityReport {
    bool holds = false;
    double domination_norm = 0.0;
};

struct InclusionReport {
    double max_residual = 0.0;
    std::vector<double> per_generator;
    bool witness_ok = true;
    int bd_rank = 0;
    double witness_max_excess = 0.0; // worst |eta(u,w)| / (|u| |w|) beyond the allowed bound
};

/// domination_norm = ||eta^{-1/2} sigma eta^{-1/2}||_2; holds iff eta is
/// strictly positive and domination_norm <= c + tol.num.
PositivityReport check_positivity(const PhaseSpace& ps, double c = 2.0, const Tolerances& tol = {});

KahlerData kahler_from_covariance(const PhaseSpace& ps, const Tolerances& tol = {});

/// v.eta w - i v.eta j w : antilinear in v, linear in w for the complex structure j.
Complex kw_inner_product(const KahlerData& kd, const PhaseSpace& ps, const Vec& v, const Vec& w);

/// eta-orthonormal basis of span(generators), expressed in the whitened
/// coordinates y = eta^{1/2} v (columns are Euclidean-orthonormal).
Mat eta_orthonormal_basis(const SubspaceGenerators& gens, const PhaseSpace& ps, const Tolerances& tol = {});

/// eta-orthogonal projector onto span(generators), in the original coordinates.
Mat eta_projector(const SubspaceGenerators& gens, const PhaseSpace& ps, const Tolerances& tol = {});

InclusionReport inclusion_check(const SubspaceGenerators& bd_gens,
                                const SubspaceGenerators& bulk_gens,
                                const PhaseSpace& ps,
                                const Tolerances& tol = {},
                                std::uint64_t witness_seed = 0x5eed);

} // namespace adsholo
