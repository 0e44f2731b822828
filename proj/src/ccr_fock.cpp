#include "adsholo/ccr_fock.hpp"

#include <algorithm>
#include <cmath>

#include "adsholo/errors.hpp"

namespace adsholo {

namespace {

void enumerate(int m, int budget, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    const int pos = static_cast<int>(current.size());
    if (pos == m) {
        out.push_back(current);
        return;
    }
    for (int n = 0; n <= budget; ++n) {
        current.push_back(n);
        enumerate(m, budget - n, current, out);
        current.pop_back();
    }
}

void require_rep(const std::shared_ptr<const FockRep>& rep) {
    if (!rep) throw Error(ErrorCode::InvalidInput, "null Fock representation");
}

void require_h(const FockRep& rep, const CVec& h) {
    if (h.size() != rep.one_particle_dim()) {
        throw Error(ErrorCode::InputShape, "one-particle vector has dimension " + std::to_string(h.size()) +
                                               ", expected " + std::to_string(rep.one_particle_dim()));
    }
    if (!h.allFinite()) throw Error(ErrorCode::InputShape, "one-particle vector has non-finite entries");
}

void require_cap(const CVec& h, const Tolerances& tol) {
    if (h.norm() > tol.weyl_norm_cap) {
        throw Error(ErrorCode::CutoffUnreliable, "||h|| = " + std::to_string(h.norm()) + " exceeds weyl_norm_cap " +
                                                     std::to_string(tol.weyl_norm_cap));
    }
}

} // namespace

long long fock_dimension(int one_particle_dim, int n_max) {
    // C(m + n, m) computed incrementally; exact in 64-bit for the sizes used here.
    long long r = 1;
    for (int i = 1; i <= one_particle_dim; ++i) r = r * (n_max + i) / i;
    return r;
}

FockRep::FockRep(int one_particle_dim, int n_max) : m_(one_particle_dim), n_max_(n_max) {
    if (m_ < 1 || n_max_ < 1) throw Error(ErrorCode::InvalidInput, "Fock space needs m >= 1 and n_max >= 1");
    if (fock_dimension(m_, n_max_) > 20000) {
        throw Error(ErrorCode::InvalidInput, "Fock truncation too large for dense operators");
    }
    std::vector<int> current;
    enumerate(m_, n_max_, current, basis_);
    totals_.reserve(basis_.size());
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        int t = 0;
        for (int n : basis_[i]) t += n;
        totals_.push_back(t);
        lookup_.emplace(basis_[i], static_cast<int>(i));
    }
}

int FockRep::index_of(const std::vector<int>& occupation) const {
    auto it = lookup_.find(occupation);
    return it == lookup_.end() ? -1 : it->second;
}

CVec FockRep::vacuum() const {
    CVec v = CVec::Zero(dim());
    v(0) = 1.0;
    return v;
}

CVec FockRep::basis_vector(const std::vector<int>& occupation) const {
    const int idx = index_of(occupation);
    if (idx < 0) throw Error(ErrorCode::InputShape, "occupation outside the truncation");
    CVec v = CVec::Zero(dim());
    v(idx) = 1.0;
    return v;
}

FockOperator annihilation(const std::shared_ptr<const FockRep>& rep, const CVec& h) {
    require_rep(rep);
    require_h(*rep, h);
    const int dim = rep->dim();
    CMat a = CMat::Zero(dim, dim);
    std::vector<int> lowered;
    for (int col = 0; col < dim; ++col) {
        const auto& occ = rep->basis()[col];
        for (int i = 0; i < rep->one_particle_dim(); ++i) {
            if (occ[i] == 0 || h(i) == 0.0) continue;
            lowered = occ;
            --lowered[i];
            const int row = rep->index_of(lowered);
            a(row, col) += std::conj(h(i)) * std::sqrt(static_cast<double>(occ[i]));
        }
    }
    return {rep, std::move(a)};
}

FockOperator creation(const std::shared_ptr<const FockRep>& rep, const CVec& h) {
    return annihilation(rep, h).adjoint();
}

FockOperator segal_field(const std::shared_ptr<const FockRep>& rep, const CVec& h) {
    FockOperator a = annihilation(rep, h);
    CMat phi = (a.entries + a.entries.adjoint()) / std::sqrt(2.0);
    return {rep, std::move(phi)};
}

FockOperator weyl_operator(const std::shared_ptr<const FockRep>& rep, const CVec& h, const Tolerances& tol) {
    require_rep(rep);
    require_h(*rep, h);
    require_cap(h, tol);
    const FockOperator phi = segal_field(rep, h);
    Eigen::SelfAdjointEigenSolver<CMat> es(phi.entries);
    const CVec phases = (es.eigenvalues().cast<Complex>() * Complex(0.0, 1.0)).array().exp();
    CMat w = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return {rep, std::move(w)};
}

CVec weyl_apply(const std::shared_ptr<const FockRep>& rep, const CVec& h, const CVec& psi, const Tolerances& tol) {
    require_rep(rep);
    require_h(*rep, h);
    require_cap(h, tol);
    if (psi.size() != rep->dim()) throw Error(ErrorCode::InputShape, "Fock vector dimension mismatch");
    const CMat gen = Complex(0.0, 1.0) * segal_field(rep, h).entries;
    const double norm1 = gen.cwiseAbs().colwise().sum().maxCoeff();
    const int steps = std::max(1, static_cast<int>(std::ceil(norm1 / 0.5)));
    const CMat step_gen = gen / static_cast<double>(steps);
    CVec out = psi;
    for (int s = 0; s < steps; ++s) {
        CVec term = out;
        CVec acc = out;
        for (int k = 1; k < 60; ++k) {
            term = step_gen * term / static_cast<double>(k);
            acc += term;
            if (term.norm() <= 1e-18 * std::max(1.0, acc.norm())) break;
        }
        out = std::move(acc);
    }
    return out;
}

double commutator_defect(const FockOperator& a, const FockOperator& b, Complex expected, int max_total) {
    if (!a.rep || a.rep != b.rep) throw Error(ErrorCode::InvalidInput, "operators act on different representations");
    const CMat c = a.entries * b.entries - b.entries * a.entries;
    double worst = 0.0;
    for (int col = 0; col < c.cols(); ++col) {
        if (a.rep->total_occupation(col) > max_total) continue;
        for (int row = 0; row < c.rows(); ++row) {
            const Complex target = row == col ? expected : Complex(0.0);
            worst = std::max(worst, std::abs(c(row, col) - target));
        }
    }
    return worst;
}

void validate_kahler(const KahlerData& kd, const PhaseSpace& ps, const Tolerances& tol) {
    const int d = ps.dim();
    if (kd.j.rows() != d || kd.j.cols() != d || kd.b.rows() != d || kd.coord_re.cols() != d ||
        kd.coord_im.cols() != d || kd.coord_re.rows() != kd.modulus.size()) {
        throw Error(ErrorCode::InputShape, "Kahler data does not match the phase space");
    }
    const double scale = std::max(1.0, ps.eta().cwiseAbs().maxCoeff());
    const Mat jj = kd.j * kd.j + Mat::Identity(d, d);
    const Mat ej = ps.eta() * kd.j;
    const Mat sig = ps.sigma() - 2.0 * ps.eta() * kd.b;
    if (jj.cwiseAbs().maxCoeff() > tol.num || (ej + ej.transpose()).cwiseAbs().maxCoeff() > tol.num * scale ||
        sig.cwiseAbs().maxCoeff() > tol.num * scale) {
        throw Error(ErrorCode::InvalidInput, "Kahler data is not consistent with the phase space");
    }
}

CVec kw_one_particle(const KahlerData& kd, const PhaseSpace& ps, const Vec& v, const Tolerances& tol) {
    if (v.size() != ps.dim()) throw Error(ErrorCode::InputShape, "kw_one_particle: dimension mismatch");
    const int m = kd.complex_dim();
    const Vec re = kd.coord_re * v;
    const Vec im = kd.coord_im * v;
    CVec h(kd.kw_one_particle_dim());
    int extra = m;
    for (int k = 0; k < m; ++k) {
        const Complex z(re(k), im(k));
        const double mu = kd.modulus(k);
        // The X_KW block enters through the conjugate complex structure; with
        // the antilinear-first scalar product this orients the commutator as +i sigma.
        h(k) = std::sqrt(1.0 + mu) * std::conj(z);
        if (std::abs(1.0 - mu) > tol.spectral) {
            if (extra >= h.size()) throw Error(ErrorCode::InvalidInput, "doubling block size mismatch");
            h(extra++) = std::sqrt(std::max(0.0, 1.0 - mu)) * z;
        }
    }
    if (extra != h.size()) throw Error(ErrorCode::InvalidInput, "doubling block size mismatch");
    return h;
}

FockOperator kw_field(const std::shared_ptr<const FockRep>& rep,
                      const KahlerData& kd,
                      const PhaseSpace& ps,
                      const Vec& v,
                      const Tolerances& tol) {
    require_rep(rep);
    validate_kahler(kd, ps, tol);
    return segal_field(rep, kw_one_particle(kd, ps, v, tol));
}

ExpectationReport quasifree_expectation_check(const std::shared_ptr<const FockRep>& rep,
                                              const KahlerData& kd,
                                              const PhaseSpace& ps,
                                              const Vec& v,
                                              const Tolerances& tol) {
    require_rep(rep);
    validate_kahler(kd, ps, tol);
    const CVec h = kw_one_particle(kd, ps, v, tol);
    const CVec out = weyl_apply(rep, h, rep->vacuum(), tol);
    ExpectationReport r;
    r.lhs = out(rep->vacuum_index());
    r.rhs = std::exp(-0.5 * ps.inner(v, v));
    r.abs_error = std::abs(r.lhs - r.rhs);
    return r;
}

ConvergenceReport strong_convergence_test(const std::shared_ptr<const FockRep>& rep,
                                          const KahlerData& kd,
                                          const PhaseSpace& ps,
                                          const std::vector<Vec>& v_seq,
                                          const Vec& v_lim,
                                          const std::vector<CVec>& psi_set,
                                          const Tolerances& tol) {
    require_rep(rep);
    validate_kahler(kd, ps, tol);
    const CVec h_lim = kw_one_particle(kd, ps, v_lim, tol);
    std::vector<CVec> limit_images;
    limit_images.reserve(psi_set.size());
    for (const CVec& psi : psi_set) limit_images.push_back(weyl_apply(rep, h_lim, psi, tol));

    ConvergenceReport rep_out;
    for (const Vec& v : v_seq) {
        const CVec h = kw_one_particle(kd, ps, v, tol);
        double worst = 0.0;
        for (std::size_t i = 0; i < psi_set.size(); ++i) {
            worst = std::max(worst, (weyl_apply(rep, h, psi_set[i], tol) - limit_images[i]).norm());
        }
        rep_out.errors_per_step.push_back(worst);
    }
    return rep_out;
}

} // namespace adsholo
