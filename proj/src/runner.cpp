#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "adsholo/ads_model.hpp"
#include "adsholo/ccr_fock.hpp"
#include "adsholo/config.hpp"
#include "adsholo/errors.hpp"
#include "adsholo/holography.hpp"
#include "adsholo/phase_core.hpp"

#ifndef ADSHOLO_VERSION
#define ADSHOLO_VERSION "0.0.0"
#endif

namespace adsholo {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

struct Csv {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Collects report lines and CSV tables of one command.
class Run {
public:
    Run(std::string command, const RunConfig& cfg) : command_(std::move(command)), cfg_(cfg) {}

    void check(const std::string& op, const std::string& what, double value, double limit, bool ok) {
        line(ok ? "PASS" : "FAIL", op, what + " = " + num(value) + " (limit " + num(limit) + ")");
        if (!ok) failed_ = true;
    }
    void check_flag(const std::string& op, const std::string& what, bool ok) {
        line(ok ? "PASS" : "FAIL", op, what + " = " + (ok ? "true" : "false"));
        if (!ok) failed_ = true;
    }
    void info(const std::string& op, const std::string& what, double value) {
        line("INFO", op, what + " = " + num(value));
    }
    void info(const std::string& op, const std::string& what, const std::string& value) {
        line("INFO", op, what + " = " + value);
    }
    Csv& table(std::string name, std::vector<std::string> header) {
        tables_.push_back({std::move(name), std::move(header), {}});
        return tables_.back();
    }
    bool failed() const { return failed_; }

    int finish(std::ostream& report) const {
        namespace fs = std::filesystem;
        const fs::path dir(cfg_.out_dir);
        fs::create_directories(dir);
        const std::string prov = provenance();
        for (const Csv& t : tables_) {
            std::ofstream out(dir / (t.name + ".csv"), std::ios::binary);
            out << prov;
            for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
            out << "\n";
            for (const auto& r : t.rows) {
                for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
                out << "\n";
            }
        }
        std::string text = prov;
        for (const auto& l : lines_) text += l + "\n";
        const int code = failed_ ? kExitCheckFailed : kExitPass;
        text += std::string("RESULT ") + command_ + ": " + (failed_ ? "FAIL" : "PASS") + "\n";
        std::ofstream(dir / (file_stem() + ".txt"), std::ios::binary) << text;
        for (const auto& l : lines_) report << l << "\n";
        report << "RESULT " << command_ << ": " << (failed_ ? "FAIL" : "PASS") << "\n";
        return code;
    }

private:
    void line(const char* tag, const std::string& op, const std::string& body) {
        lines_.push_back(std::string(tag) + " " + op + ": " + body);
    }
    std::string file_stem() const {
        std::string s = command_;
        std::replace(s.begin(), s.end(), '-', '_');
        return s;
    }
    std::string provenance() const {
        std::string out = "# adsholo " ADSHOLO_VERSION "\n# command: " + command_ +
                          "\n# seed: " + std::to_string(cfg_.plan.seed) + "\n";
        std::istringstream in(serialize_config(cfg_));
        std::string l;
        while (std::getline(in, l)) {
            if (!l.empty()) out += "# " + l + "\n";
        }
        return out;
    }

    std::string command_;
    const RunConfig& cfg_;
    std::vector<std::string> lines_;
    std::vector<Csv> tables_;
    bool failed_ = false;
};

AdsStripModel model_of(const RunConfig& cfg) { return build_model(cfg.plan.model, cfg.plan.tol); }

int cmd_modes(const RunConfig& cfg, std::ostream& report) {
    Run run("modes", cfg);
    const AdsStripModel m = model_of(cfg);
    const Tolerances& tol = cfg.plan.tol;
    Csv& t = run.table("modes", {"k", "omega", "beta_minus", "beta_plus"});
    for (const Mode& md : m.modes()) {
        t.rows.push_back({std::to_string(md.k), num(md.omega), num(md.beta_minus), num(md.beta_plus)});
    }
    run.check("ads_model.build_model", "orthonormality_defect", m.orthonormality_defect(), tol.quad,
              m.orthonormality_defect() <= tol.quad);
    if (cfg.plan.model.cross_validate) {
        run.check("ads_model.fd_spectrum", "max |omega - omega_fd| over " + std::to_string(m.fd_checked_modes()) + " modes",
                  m.fd_deviation(), tol.eig, m.fd_deviation() <= tol.eig);
    }
    if (cfg.plan.model.perturbation.empty()) {
        run.check("ads_model.build_model", "max |omega_k - (nu_+ + k)|", m.closed_form_deviation(), 1e-10,
                  m.closed_form_deviation() <= 1e-10);
    }
    return run.finish(report);
}

int cmd_propagator(const RunConfig& cfg, std::ostream& report) {
    Run run("propagator", cfg);
    const AdsStripModel m = model_of(cfg);
    const Tolerances& tol = cfg.plan.tol;
    const int n = cfg.n_pairs;
    if (cfg.plan.V.empty()) throw Error(ErrorCode::Config, "key 'regions.V': propagator needs a bulk region");
    const auto tests = bulk_generators(m, cfg.plan.V, 3 * n, cfg.plan.seed);
    std::vector<BoundaryTestFunction> dict;
    if (!cfg.plan.O.empty()) dict = boundary_dictionary(m, cfg.plan.O, n, cfg.plan.seed);

    Csv& t = run.table("propagator", {"pair", "pde_residual_retarded", "pde_residual_advanced", "antisymmetry",
                                      "symplectic_vs_gram", "quotient_ratio", "riesz_residual"});
    double w_pde = 0.0, w_anti = 0.0, w_sym = 0.0, w_quot = 0.0, w_riesz = 0.0;
    const double window = 0.5 * std::numbers::pi - 0.05;
    for (int i = 0; i < n; ++i) {
        const BulkTestFunction& v1 = tests[3 * i];
        const BulkTestFunction& v2 = tests[3 * i + 1];
        const BulkTestFunction& w = tests[3 * i + 2];
        const TimeGrid g{v1.grid.dt, v1.grid.first - 60, v1.grid.count + 120};
        const double pr = pde_residual(m, propagator_apply(m, v1, PropagatorKind::Retarded, g), v1, window);
        const double pa = pde_residual(m, propagator_apply(m, v1, PropagatorKind::Advanced, g), v1, window);

        const OneParticleVector k1 = one_particle_map(m, v1);
        const OneParticleVector k2 = one_particle_map(m, v2);
        const double scale = 2.0 * k1.coeffs.norm() * k2.coeffs.norm();
        const double s12 = symplectic_form(m, v1, v2);
        const double s21 = symplectic_form(m, v2, v1);
        const double anti = std::abs(s12 + s21) / scale;
        const double sym = std::abs(s12 - 2.0 * k1.coeffs.dot(k2.coeffs).imag()) / scale;

        const double quot = one_particle_map(m, apply_kg_operator(m, w)).coeffs.norm() /
                            (one_particle_map(m, w).coeffs.norm() + 1e-9 / tol.quotient);

        double riesz = 0.0;
        if (!dict.empty()) {
            const BoundaryTestFunction& f = dict[i % dict.size()];
            const OneParticleVector df = dual_boundary_map(m, f);
            const double lhs = df.coeffs.dot(k1.coeffs).real();
            const double rhs = boundary_pairing(m, f, k1);
            riesz = std::abs(lhs - rhs) / (df.coeffs.norm() * k1.coeffs.norm());
        }
        w_pde = std::max({w_pde, pr, pa});
        w_anti = std::max(w_anti, anti);
        w_sym = std::max(w_sym, sym);
        w_quot = std::max(w_quot, quot);
        w_riesz = std::max(w_riesz, riesz);
        t.rows.push_back({std::to_string(i), num(pr), num(pa), num(anti), num(sym), num(quot), num(riesz)});
    }
    run.check("ads_model.pde_residual", "max |P u - Pi_K v| / |Pi_K v|", w_pde, tol.pde, w_pde <= tol.pde);
    run.check("ads_model.symplectic_form", "max antisymmetry defect", w_anti, tol.quad, w_anti <= tol.quad);
    run.check("ads_model.symplectic_form", "max |sigma - 2 Im Gram| / (2 |Kv1| |Kv2|)", w_sym, tol.quad,
              w_sym <= tol.quad);
    run.check("ads_model.one_particle_map", "max |K(Pw)| / (|Kw| + 1e-9 / quotient)", w_quot, tol.quotient,
              w_quot <= tol.quotient);
    if (!dict.empty()) {
        run.check("ads_model.dual_boundary_map", "max Riesz residual", w_riesz, tol.dual, w_riesz <= tol.dual);
    }
    return run.finish(report);
}

int cmd_ccr(const RunConfig& cfg, std::ostream& report) {
    Run run("ccr-verify", cfg);
    const Tolerances& tol = cfg.plan.tol;
    auto rep = std::make_shared<const FockRep>(1, cfg.ccr_n_max);
    std::mt19937_64 rng(cfg.plan.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](double rmax) {
        CVec h(1);
        h(0) = std::polar(rmax * unit(rng), 2.0 * std::numbers::pi * unit(rng));
        return h;
    };
    const int low = std::min(10, cfg.ccr_n_max);
    Csv& t = run.table("ccr_verify", {"trial", "h1_norm", "h2_norm", "weyl_relation_residual", "h3_norm",
                                      "vacuum_expectation_error", "taylor_vs_spectral", "commutator_defect"});
    double w_rel = 0.0, w_vac = 0.0, w_tay = 0.0, w_com = 0.0;
    for (int i = 0; i < cfg.n_pairs; ++i) {
        const CVec h1 = draw(0.5), h2 = draw(0.5), h3 = draw(1.0);
        const CMat W1 = weyl_operator(rep, h1, tol).entries;
        const CMat W2 = weyl_operator(rep, h2, tol).entries;
        const CMat W12 = weyl_operator(rep, h1 + h2, tol).entries;
        const Complex phase = std::exp(Complex(0.0, -0.5 * h1.dot(h2).imag()));
        const CMat diff = W1 * W2 - phase * W12;
        double rel = 0.0;
        for (int c = 0; c < rep->dim(); ++c) {
            if (rep->total_occupation(c) <= low) rel = std::max(rel, diff.col(c).norm());
        }
        const CVec out = weyl_apply(rep, h3, rep->vacuum(), tol);
        const double vac = std::abs(out(rep->vacuum_index()) - std::exp(-0.25 * h3.squaredNorm()));
        const double tay = (out - weyl_operator(rep, h3, tol).entries.col(rep->vacuum_index())).norm();
        const double com = commutator_defect(segal_field(rep, h1), segal_field(rep, h2),
                                             Complex(0.0, h1.dot(h2).imag()), cfg.ccr_n_max - 2);
        w_rel = std::max(w_rel, rel);
        w_vac = std::max(w_vac, vac);
        w_tay = std::max(w_tay, tay);
        w_com = std::max(w_com, com);
        t.rows.push_back({std::to_string(i), num(h1.norm()), num(h2.norm()), num(rel), num(h3.norm()), num(vac),
                          num(tay), num(com)});
    }
    run.check("ccr_fock.weyl_operator", "max Weyl relation residual (occupation <= " + std::to_string(low) + ")",
              w_rel, tol.weyl, w_rel <= tol.weyl);
    run.check("ccr_fock.weyl_apply", "max |<W(h)> - exp(-|h|^2/4)|", w_vac, tol.expectation, w_vac <= tol.expectation);
    run.check("ccr_fock.weyl_apply", "max |Taylor - spectral| on vacuum", w_tay, tol.weyl, w_tay <= tol.weyl);
    run.check("ccr_fock.segal_field", "max |[phi(h1), phi(h2)] - i Im<h1,h2>|", w_com, tol.commutator,
              w_com <= tol.commutator);
    return run.finish(report);
}

struct KwCase {
    std::string name;
    PhaseSpace ps;
};

std::vector<KwCase> kw_cases(const RunConfig& cfg) {
    const Tolerances& tol = cfg.plan.tol;
    std::vector<KwCase> out;
    out.push_back({"modes-pure", mode_phase_space(2, tol)});

    std::mt19937_64 rng(cfg.plan.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat a(4, 4), s(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            a(i, j) = gauss(rng);
            s(i, j) = gauss(rng);
        }
    Mat eta = a * a.transpose() + 0.5 * Mat::Identity(4, 4);
    Mat sigma = s - s.transpose();
    {
        // rescale sigma so that ||eta^{-1/2} sigma eta^{-1/2}|| = 1.2 (mixed)
        const PhaseSpace probe(eta, sigma, tol);
        sigma *= 1.2 / check_positivity(probe, 2.0, tol).domination_norm;
    }
    out.push_back({"random-mixed", PhaseSpace(eta, sigma, tol)});

    Mat sd = Mat::Zero(4, 4);
    sd(0, 1) = 1.0;
    sd(1, 0) = -1.0;
    out.push_back({"degenerate-kernel", PhaseSpace(Mat::Identity(4, 4), sd, tol)});

    if (!cfg.plan.V.empty()) {
        const AdsStripModel m = model_of(cfg);
        const auto tests = bulk_generators(m, cfg.plan.V, 4, cfg.plan.seed);
        const GroundStateForms f = ground_state_forms(m, tests);
        out.push_back({"ground-state-restricted", PhaseSpace(f.gram_eta, f.gram_sigma, tol)});
    }
    return out;
}

int cmd_kw(const RunConfig& cfg, std::ostream& report) {
    Run run("kw-verify", cfg);
    const Tolerances& tol = cfg.plan.tol;
    constexpr int kNMax = 8;
    Csv& t = run.table("kw_verify", {"case", "dim", "domination_norm", "pure", "doubled_dim", "fock_dim",
                                     "commutator_defect", "vacuum_expectation_error"});
    std::mt19937_64 rng(cfg.plan.seed + 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double w_com = 0.0, w_vac = 0.0;
    for (const KwCase& c : kw_cases(cfg)) {
        const PositivityReport pos = check_positivity(c.ps, 2.0, tol);
        const KahlerData kd = kahler_from_covariance(c.ps, tol);
        auto rep = std::make_shared<const FockRep>(kd.kw_one_particle_dim(), kNMax);
        auto draw = [&](double norm) {
            Vec v(c.ps.dim());
            for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
            return Vec(v * (norm / c.ps.norm(v)));
        };
        double com = 0.0, vac = 0.0;
        for (int trial = 0; trial < 4; ++trial) {
            const Vec v = draw(1.0), w = draw(1.0);
            const FockOperator fv = kw_field(rep, kd, c.ps, v, tol);
            const FockOperator fw = kw_field(rep, kd, c.ps, w, tol);
            com = std::max(com, commutator_defect(fv, fw, Complex(0.0, v.dot(c.ps.sigma() * w)), kNMax - 2));
            vac = std::max(vac, quasifree_expectation_check(rep, kd, c.ps, draw(0.5), tol).abs_error);
        }
        w_com = std::max(w_com, com);
        w_vac = std::max(w_vac, vac);
        t.rows.push_back({c.name, std::to_string(c.ps.dim()), num(pos.domination_norm), kd.pure ? "1" : "0",
                          std::to_string(kd.doubled_dim), std::to_string(rep->dim()), num(com), num(vac)});
        run.info("phase_core.kahler_from_covariance", c.name + " pure", kd.pure ? "true" : "false");
    }
    run.check("ccr_fock.kw_field", "max |[phi_KW(v), phi_KW(w)] - i v.sigma w|", w_com, tol.commutator,
              w_com <= tol.commutator);
    run.check("ccr_fock.quasifree_expectation_check", "max |<W_KW(v)> - exp(-v.eta v / 2)|", w_vac, tol.expectation,
              w_vac <= tol.expectation);
    return run.finish(report);
}

void inclusion_rows(Csv& t, const InclusionTable& tab) {
    for (const auto& r : tab.rows) {
        t.rows.push_back({std::to_string(r.dict_size), num(r.max_residual), num(r.mean_residual),
                          r.witness_ok ? "1" : "0", num(r.sigma_min_ref)});
    }
}

int cmd_inclusion(const RunConfig& cfg, std::ostream& report) {
    Run run("holo-inclusion", cfg);
    const AdsStripModel m = model_of(cfg);
    const std::vector<std::string> cols{"dict_size", "max_residual", "mean_residual", "witness_ok", "sigma_min_ref"};
    const InclusionTable tab = run_inclusion(m, cfg.plan);
    inclusion_rows(run.table("holo_inclusion", cols), tab);
    run.check_flag("holography_check.run_inclusion", "max_residual monotone within slack", tab.monotone);
    run.check_flag("holography_check.run_inclusion", "witness_ok at every rung", tab.witness_ok);
    run.info("holography_check.run_inclusion", "plateau ratio (last / first max_residual)", tab.plateau_ratio);
    run.info("holography_check.run_inclusion", "final max_residual", tab.rows.back().max_residual);
    run.info("ads_model.uc_scan", "sigma_min(O)", tab.rows.back().sigma_min_ref);
    if (!cfg.contrast.empty()) {
        ExperimentPlan p = cfg.plan;
        p.O = cfg.contrast;
        const InclusionTable ct = run_inclusion(m, p);
        inclusion_rows(run.table("holo_contrast", cols), ct);
        run.info("holography_check.run_inclusion", "contrast final max_residual", ct.rows.back().max_residual);
        const double base = tab.rows.back().max_residual;
        run.info("holography_check.run_inclusion", "contrast / default final residual",
                 base > 0.0 ? ct.rows.back().max_residual / base : std::numeric_limits<double>::infinity());
        run.info("ads_model.uc_scan", "sigma_min(contrast)", ct.rows.back().sigma_min_ref);
    }
    return run.finish(report);
}

BoundaryRegion shrink(const BoundaryRegion& O, double fraction) {
    BoundaryRegion out;
    for (const auto& s : O.segments) {
        const double c = 0.5 * (s.interval.a + s.interval.b);
        const double h = 0.5 * fraction * (s.interval.b - s.interval.a);
        out.segments.push_back({s.component, Interval{c - h, c + h}});
    }
    return out;
}

int cmd_uc(const RunConfig& cfg, std::ostream& report) {
    Run run("uc-scan", cfg);
    const AdsStripModel m = model_of(cfg);
    const int k_eff = cfg.uc_k_eff > 0 ? cfg.uc_k_eff : m.K();
    Csv& t = run.table("uc_scan", {"level", "fraction", "measure", "rows", "sigma_min"});
    std::vector<double> fr{0.0};
    fr.insert(fr.end(), cfg.uc_fractions.begin(), cfg.uc_fractions.end());
    double prev = -1.0;
    bool monotone = true;
    double empty_sigma = -1.0;
    for (std::size_t i = 0; i < fr.size(); ++i) {
        const BoundaryRegion O = fr[i] == 0.0 ? BoundaryRegion{} : shrink(cfg.plan.O, fr[i]);
        const UcReport r = uc_scan(m, O, k_eff, cfg.plan.uc_step);
        if (i == 0) empty_sigma = r.sigma_min;
        if (r.sigma_min < prev) monotone = false;
        prev = r.sigma_min;
        t.rows.push_back({std::to_string(i), num(fr[i]), num(O.measure()), std::to_string(r.rows), num(r.sigma_min)});
    }
    run.check("ads_model.uc_scan", "sigma_min(empty)", empty_sigma, 0.0, empty_sigma == 0.0);
    run.check_flag("ads_model.uc_scan", "sigma_min non-decreasing on the nested family", monotone);
    return run.finish(report);
}

int cmd_weyl(const RunConfig& cfg, std::ostream& report) {
    Run run("weyl-convergence", cfg);
    const AdsStripModel m = model_of(cfg);
    const WeylReport w = run_weyl_convergence(m, cfg.plan, cfg.weyl_bulk_index);
    Csv& t = run.table("weyl_convergence", {"dict_size", "distance", "error_vacuum", "error_one_particle", "error"});
    for (std::size_t i = 0; i < w.errors.size(); ++i) {
        t.rows.push_back({std::to_string(w.dict_size[i]), num(w.distances[i]), num(w.errors_vacuum[i]),
                          num(w.errors_one[i]), num(w.errors[i])});
    }
    run.check_flag("holography_check.run_weyl_convergence", "errors decreasing within slack", w.decreasing);
    run.check("holography_check.run_weyl_convergence", "final error", w.errors.back(), cfg.weyl_final_max,
              w.errors.back() <= cfg.weyl_final_max);
    run.check("holography_check.run_weyl_convergence", "R^2 of log error vs log distance (lower limit)", w.r_squared,
              cfg.weyl_r2_min, w.r_squared >= cfg.weyl_r2_min);
    run.info("holography_check.run_weyl_convergence", "fitted constant C", w.lipschitz_c);
    run.info("holography_check.run_weyl_convergence", "fitted exponent", w.exponent);
    return run.finish(report);
}

using Handler = int (*)(const RunConfig&, std::ostream&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
    static const std::vector<std::pair<std::string, Handler>> h = {
        {"modes", cmd_modes},           {"propagator", cmd_propagator},   {"ccr-verify", cmd_ccr},
        {"kw-verify", cmd_kw},          {"holo-inclusion", cmd_inclusion}, {"uc-scan", cmd_uc},
        {"weyl-convergence", cmd_weyl},
    };
    return h;
}

int run_one(const std::string& name, Handler h, const RunConfig& cfg, std::ostream& report) {
    try {
        return h(cfg, report);
    } catch (const std::exception& e) {
        report << "ERROR " << name << ": " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, _] : handlers()) n.push_back(k);
        n.push_back("check-all");
        return n;
    }();
    return names;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& report) {
    try {
        validate_config(cfg);
    } catch (const std::exception& e) {
        report << "ERROR " << command << ": " << e.what() << "\n";
        return kExitUsage;
    }
    if (command == "check-all") {
        int worst = kExitPass;
        std::string summary;
        for (const auto& [name, h] : handlers()) {
            const int code = run_one(name, h, cfg, report);
            summary += name + " " + std::to_string(code) + "\n";
            worst = std::max(worst, code);
        }
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream(std::filesystem::path(cfg.out_dir) / "check_all.txt", std::ios::binary)
            << summary << "exit " << worst << "\n";
        report << "RESULT check-all: exit " << worst << "\n";
        return worst;
    }
    for (const auto& [name, h] : handlers()) {
        if (name == command) return run_one(name, h, cfg, report);
    }
    report << "ERROR: unknown command '" << command << "'\n";
    return kExitUsage;
}

} // namespace adsholo
