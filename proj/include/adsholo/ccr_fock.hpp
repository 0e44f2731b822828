#pragma once

#include <map>
#include <memory>
#include <vector>

#include "adsholo/linalg.hpp"
#include "adsholo/phase_core.hpp"
#include "adsholo/tolerances.hpp"

namespace adsholo {

/// Symmetric Fock space over C^m truncated to total occupation <= n_max.
/// Basis states are occupation multi-indices in lexicographic order, so the
/// vacuum is index 0.
class FockRep {
public:
    FockRep(int one_particle_dim, int n_max);

    int one_particle_dim() const { return m_; }
    int n_max() const { return n_max_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<std::vector<int>>& basis() const { return basis_; }
    int total_occupation(int index) const { return totals_[index]; }

    /// Index of a multi-index, or -1 if it lies outside the truncation.
    int index_of(const std::vector<int>& occupation) const;
    int vacuum_index() const { return 0; }

    CVec vacuum() const;
    /// Basis vector |occupation>.
    CVec basis_vector(const std::vector<int>& occupation) const;

private:
    int m_;
    int n_max_;
    std::vector<std::vector<int>> basis_;
    std::vector<int> totals_;
    std::map<std::vector<int>, int> lookup_;
};

/// binomial(m + n_max, m)
long long fock_dimension(int one_particle_dim, int n_max);

struct FockOperator {
    std::shared_ptr<const FockRep> rep;
    CMat entries;

    FockOperator adjoint() const { return {rep, entries.adjoint()}; }
};

FockOperator annihilation(const std::shared_ptr<const FockRep>& rep, const CVec& h);
FockOperator creation(const std::shared_ptr<const FockRep>& rep, const CVec& h);

/// (a*(h) + a(h)) / sqrt(2)
FockOperator segal_field(const std::shared_ptr<const FockRep>& rep, const CVec& h);

/// exp(i phi_F(h)) from the spectral decomposition of the truncated field.
FockOperator weyl_operator(const std::shared_ptr<const FockRep>& rep, const CVec& h, const Tolerances& tol = {});

/// exp(i phi_F(h)) psi without forming the operator (scaled Taylor series).
CVec weyl_apply(const std::shared_ptr<const FockRep>& rep, const CVec& h, const CVec& psi, const Tolerances& tol = {});

/// Largest entry of ((A B - B A) - expected * 1) restricted to basis vectors of
/// total occupation <= max_total (columns) .
double commutator_defect(const FockOperator& a, const FockOperator& b, Complex expected, int max_total);

/// One-particle vector of the Kay-Wald field: the X_KW coordinates of v,
/// followed by the doubling block on directions where |b| != 1.
CVec kw_one_particle(const KahlerData& kd, const PhaseSpace& ps, const Vec& v, const Tolerances& tol = {});

/// phi_KW(v) = phi_F(h_KW(v)); the representation must have one-particle
/// dimension kd.kw_one_particle_dim().
FockOperator kw_field(const std::shared_ptr<const FockRep>& rep,
                      const KahlerData& kd,
                      const PhaseSpace& ps,
                      const Vec& v,
                      const Tolerances& tol = {});

struct ExpectationReport {
    Complex lhs;
    double rhs = 1.0;
    double abs_error = 0.0;
};

/// <Omega| exp(i phi_KW(v)) |Omega> against exp(-v.eta v / 2).
ExpectationReport quasifree_expectation_check(const std::shared_ptr<const FockRep>& rep,
                                              const KahlerData& kd,
                                              const PhaseSpace& ps,
                                              const Vec& v,
                                              const Tolerances& tol = {});

struct ConvergenceReport {
    std::vector<double> errors_per_step;
};

ConvergenceReport strong_convergence_test(const std::shared_ptr<const FockRep>& rep,
                                          const KahlerData& kd,
                                          const PhaseSpace& ps,
                                          const std::vector<Vec>& v_seq,
                                          const Vec& v_lim,
                                          const std::vector<CVec>& psi_set,
                                          const Tolerances& tol = {});

/// Checks the Kahler identities of kd against ps; throws InvalidInput when they fail.
void validate_kahler(const KahlerData& kd, const PhaseSpace& ps, const Tolerances& tol = {});

} // namespace adsholo
