#include "adsholo/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <tuple>

#include "adsholo/errors.hpp"

namespace adsholo {

namespace {

[[noreturn]] void key_error(const std::string& key, const std::string& msg) {
    throw Error(ErrorCode::Config, "key '" + key + "': " + msg);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || p != end || t.empty()) key_error(key, "expected a number, got '" + t + "'");
    if (!std::isfinite(v)) key_error(key, "value must be finite");
    return v;
}

long long to_int(const std::string& s, const std::string& key) {
    const std::string t = trim(s);
    long long v = 0;
    const auto* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || p != end || t.empty()) key_error(key, "expected an integer, got '" + t + "'");
    return v;
}

std::uint64_t to_u64(const std::string& s, const std::string& key) {
    const std::string t = trim(s);
    std::uint64_t v = 0;
    const auto* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || p != end || t.empty()) key_error(key, "expected an unsigned integer, got '" + t + "'");
    return v;
}

int to_int32(const std::string& s, const std::string& key) {
    const long long v = to_int(s, key);
    if (v < -2147483647LL || v > 2147483647LL) key_error(key, "integer out of range");
    return static_cast<int>(v);
}

bool to_bool(const std::string& s, const std::string& key) {
    const std::string t = trim(s);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    key_error(key, "expected true or false, got '" + t + "'");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
    return out;
}

std::vector<double> to_doubles(const std::string& s, const std::string& key) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const auto& p : split(s, ',')) out.push_back(to_double(p, key));
    return out;
}

std::vector<int> to_ints(const std::string& s, const std::string& key) {
    std::vector<int> out;
    if (trim(s).empty()) return out;
    for (const auto& p : split(s, ',')) out.push_back(to_int32(p, key));
    return out;
}

// "-:a:b; +:a:b"
BoundaryRegion to_boundary(const std::string& s, const std::string& key) {
    BoundaryRegion r;
    if (trim(s).empty()) return r;
    for (const auto& item : split(s, ';')) {
        const auto f = split(item, ':');
        if (f.size() != 3 || (f[0] != "-" && f[0] != "+")) key_error(key, "expected 'component:a:b', got '" + item + "'");
        r.segments.push_back({f[0] == "-" ? Component::Minus : Component::Plus,
                              Interval{to_double(f[1], key), to_double(f[2], key)}});
    }
    return r;
}

std::string from_boundary(const BoundaryRegion& r) {
    std::string out;
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        const auto& s = r.segments[i];
        out += (i ? "; " : "") + std::string(to_string(s.component)) + ":" + fmt(s.interval.a) + ":" + fmt(s.interval.b);
    }
    return out;
}

// "t0:t1:x0:x1; ..."
BulkRegion to_bulk(const std::string& s, const std::string& key) {
    BulkRegion r;
    if (trim(s).empty()) return r;
    for (const auto& item : split(s, ';')) {
        const auto f = split(item, ':');
        if (f.size() != 4) key_error(key, "expected 't0:t1:x0:x1', got '" + item + "'");
        r.rects.push_back({to_double(f[0], key), to_double(f[1], key), to_double(f[2], key), to_double(f[3], key)});
    }
    return r;
}

std::string from_bulk(const BulkRegion& r) {
    std::string out;
    for (std::size_t i = 0; i < r.rects.size(); ++i) {
        const Rect& q = r.rects[i];
        out += (i ? "; " : "") + fmt(q.t0) + ":" + fmt(q.t1) + ":" + fmt(q.x0) + ":" + fmt(q.x1);
    }
    return out;
}

// "amplitude:center:half_width; ..."
Perturbation to_perturbation(const std::string& s, const std::string& key) {
    Perturbation p;
    if (trim(s).empty()) return p;
    for (const auto& item : split(s, ';')) {
        const auto f = split(item, ':');
        if (f.size() != 3) key_error(key, "expected 'amplitude:center:half_width', got '" + item + "'");
        p.bumps.push_back({to_double(f[0], key), to_double(f[1], key), to_double(f[2], key)});
    }
    return p;
}

std::string from_perturbation(const Perturbation& p) {
    std::string out;
    for (std::size_t i = 0; i < p.bumps.size(); ++i) {
        const auto& b = p.bumps[i];
        out += (i ? "; " : "") + fmt(b.amplitude) + ":" + fmt(b.center) + ":" + fmt(b.half_width);
    }
    return out;
}

struct Field {
    const char* section;
    const char* key;
    const char* doc;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

#define DBL(sec, name, member, doc)                                                                    \
    Field {                                                                                            \
        sec, name, doc, [](const RunConfig& c) { return fmt(c.member); },                              \
            [](RunConfig& c, const std::string& v, const std::string& k) { c.member = to_double(v, k); } \
    }
#define INT(sec, name, member, doc)                                                                   \
    Field {                                                                                           \
        sec, name, doc, [](const RunConfig& c) { return std::to_string(c.member); },                  \
            [](RunConfig& c, const std::string& v, const std::string& k) { c.member = to_int32(v, k); } \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        DBL("model", "nu", plan.model.nu, "mass parameter, nu > 0"),
        INT("model", "K", plan.model.K, "number of modes"),
        INT("model", "N", plan.model.N, "Gauss-Legendre points in x, N >= 4K"),
        INT("model", "galerkin_extra", plan.model.galerkin_extra, "extra basis modes for a perturbed spectrum"),
        Field{"model", "cross_validate", "compare with the finite-difference spectrum at build",
              [](const RunConfig& c) { return std::string(c.plan.model.cross_validate ? "true" : "false"); },
              [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.model.cross_validate = to_bool(v, k); }},
        Field{"model", "perturbation", "potential bumps 'amplitude:center:half_width; ...' (empty = none)",
              [](const RunConfig& c) { return from_perturbation(c.plan.model.perturbation); },
              [](RunConfig& c, const std::string& v, const std::string& k) {
                  c.plan.model.perturbation = to_perturbation(v, k);
              }},

        Field{"regions", "O", "boundary region 'component:a:b; ...' with component - or +",
              [](const RunConfig& c) { return from_boundary(c.plan.O); },
              [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.O = to_boundary(v, k); }},
        Field{"regions", "V", "bulk region 't0:t1:x0:x1; ...'",
              [](const RunConfig& c) { return from_bulk(c.plan.V); },
              [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.V = to_bulk(v, k); }},
        Field{"regions", "contrast", "second boundary region for the comparison run (empty = skip)",
              [](const RunConfig& c) { return from_boundary(c.contrast); },
              [](RunConfig& c, const std::string& v, const std::string& k) { c.contrast = to_boundary(v, k); }},

        Field{"experiment", "ladder", "dictionary sizes, strictly increasing",
              [](const RunConfig& c) { return join_ints(c.plan.ladder); },
              [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.ladder = to_ints(v, k); }},
        INT("experiment", "bulk_count", plan.bulk_count, "bulk generators drawn in V"),
        Field{"experiment", "seed", "seed for every random choice",
              [](const RunConfig& c) { return std::to_string(c.plan.seed); },
              [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.seed = to_u64(v, k); }},
        DBL("experiment", "uc_step", plan.uc_step, "boundary sample step of uc-scan"),
        INT("experiment", "uc_k_eff", uc_k_eff, "modes used by uc-scan (0 = K)"),
        Field{"experiment", "uc_fractions", "nested uc-scan family: O shrunk about interval centres",
              [](const RunConfig& c) { return join_doubles(c.uc_fractions); },
              [](RunConfig& c, const std::string& v, const std::string& k) { c.uc_fractions = to_doubles(v, k); }},
        INT("experiment", "weyl_bulk_index", weyl_bulk_index, "bulk generator approximated in weyl-convergence"),
        INT("experiment", "weyl_n_max", plan.weyl_n_max, "Fock truncation of weyl-convergence"),
        DBL("experiment", "weyl_final_max", weyl_final_max, "largest accepted final Weyl error"),
        DBL("experiment", "weyl_r2_min", weyl_r2_min, "smallest accepted R^2 of the log-log Lipschitz fit"),
        INT("experiment", "n_pairs", n_pairs, "seeded test pairs in propagator"),
        INT("experiment", "ccr_n_max", ccr_n_max, "Fock truncation of ccr-verify"),

        DBL("tolerances", "rank", plan.tol.rank, "relative singular-value cutoff"),
        DBL("tolerances", "num", plan.tol.num, "generic numerical tolerance"),
        DBL("tolerances", "spectral", plan.tol.spectral, "spectral tolerance for |b| = 1"),
        INT("tolerances", "n_witness", plan.tol.n_witness, "random witness vectors in inclusion_check"),
        DBL("tolerances", "witness", plan.tol.witness, "relative slack of the witness test"),
        DBL("tolerances", "quad", plan.tol.quad, "mode orthonormality"),
        DBL("tolerances", "eig", plan.tol.eig, "finite-difference spectrum agreement"),
        DBL("tolerances", "pde", plan.tol.pde, "propagator PDE residual"),
        DBL("tolerances", "quotient", plan.tol.quotient, "|K(Pw)| / |Kw|"),
        DBL("tolerances", "dual", plan.tol.dual, "Riesz identity of the dual boundary map"),
        DBL("tolerances", "trace", plan.tol.trace, "boundary trace against extrapolation"),
        INT("tolerances", "support_margin", plan.tol.support_margin, "grid cells kept clear at each end"),
        DBL("tolerances", "exp", plan.tol.exp, "matrix exponential accuracy"),
        DBL("tolerances", "weyl", plan.tol.weyl, "Weyl relation residual"),
        DBL("tolerances", "weyl_norm_cap", plan.tol.weyl_norm_cap, "largest |h| for truncated Weyl operators"),
        DBL("tolerances", "expectation", plan.tol.expectation, "vacuum expectation of Weyl operators"),
        DBL("tolerances", "commutator", plan.tol.commutator, "field commutator against i sigma"),
        DBL("tolerances", "monotonicity_slack", plan.tol.monotonicity_slack, "slack of monotone sequences"),
        DBL("tolerances", "tikhonov", plan.tol.tikhonov, "relative Tikhonov floor of least squares"),

        Field{"output", "dir", "output directory",
              [](const RunConfig& c) { return c.out_dir; },
              [](RunConfig& c, const std::string& v, const std::string&) { c.out_dir = trim(v); }},
    };
    return table;
}

#undef DBL
#undef INT

const char* kSections[] = {"model", "regions", "experiment", "tolerances", "output"};

void check_boundary(const BoundaryRegion& r, const std::string& key) {
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        const auto& s = r.segments[i];
        if (!(s.interval.a < s.interval.b)) key_error(key, "interval must satisfy a < b");
        if (i == 0) continue;
        const auto& p = r.segments[i - 1];
        if (p.component == s.component) {
            if (!(p.interval.b <= s.interval.a)) key_error(key, "intervals must be ordered and non-overlapping");
        } else if (p.component == Component::Plus) {
            key_error(key, "list '-' segments before '+' segments");
        }
    }
}

void check_bulk(const BulkRegion& r, const std::string& key) {
    const double edge = 0.5 * std::numbers::pi;
    for (std::size_t i = 0; i < r.rects.size(); ++i) {
        const Rect& q = r.rects[i];
        if (!(q.t0 < q.t1) || !(q.x0 < q.x1)) key_error(key, "rectangle must satisfy t0 < t1 and x0 < x1");
        if (!(q.x0 > -edge) || !(q.x1 < edge)) key_error(key, "rectangle must lie inside |x| < pi/2");
        for (std::size_t j = 0; j < i; ++j) {
            const Rect& o = r.rects[j];
            if (q.t0 < o.t1 && o.t0 < q.t1 && q.x0 < o.x1 && o.x0 < q.x1) key_error(key, "rectangles overlap");
            if (std::tie(q.t0, q.x0) < std::tie(o.t0, o.x0)) key_error(key, "rectangles must be ordered by (t0, x0)");
        }
    }
}

} // namespace

RunConfig default_config() {
    RunConfig c;
    c.plan.O.segments = {{Component::Minus, {-3.3, 3.3}}, {Component::Plus, {-3.3, 3.3}}};
    c.plan.V.rects = {{-0.5, 0.5, -0.8, 0.8}};
    c.contrast.segments = {{Component::Minus, {-0.5, 0.5}}};
    return c;
}

void validate_config(const RunConfig& c) {
    const auto& m = c.plan.model;
    if (!(m.nu > 0.0)) {
        throw Error(ErrorCode::BreitenlohnerFreedman, "key 'model.nu': nu = " + fmt(m.nu) + " violates nu > 0");
    }
    if (m.K < 1) key_error("model.K", "must be >= 1");
    if (m.N < 4 * m.K) key_error("model.N", "must be >= 4K");
    if (m.galerkin_extra < 0) key_error("model.galerkin_extra", "must be >= 0");
    for (const auto& b : m.perturbation.bumps) {
        if (!(b.half_width > 0.0)) key_error("model.perturbation", "half_width must be positive");
    }
    check_boundary(c.plan.O, "regions.O");
    check_bulk(c.plan.V, "regions.V");
    check_boundary(c.contrast, "regions.contrast");

    const auto& ladder = c.plan.ladder;
    if (ladder.empty()) key_error("experiment.ladder", "must not be empty");
    if (ladder.front() < 1) key_error("experiment.ladder", "sizes must be >= 1");
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (ladder[i] <= ladder[i - 1]) key_error("experiment.ladder", "must be strictly increasing");
    }
    if (c.plan.bulk_count < 0) key_error("experiment.bulk_count", "must be >= 0");
    if (!(c.plan.uc_step > 0.0)) key_error("experiment.uc_step", "must be positive");
    if (c.uc_k_eff < 0 || c.uc_k_eff > m.K) key_error("experiment.uc_k_eff", "must lie in [0, K]");
    if (c.uc_fractions.empty()) key_error("experiment.uc_fractions", "must not be empty");
    for (std::size_t i = 0; i < c.uc_fractions.size(); ++i) {
        const double f = c.uc_fractions[i];
        if (!(f > 0.0 && f <= 1.0)) key_error("experiment.uc_fractions", "fractions must lie in (0, 1]");
        if (i > 0 && !(f > c.uc_fractions[i - 1])) key_error("experiment.uc_fractions", "must be strictly increasing");
    }
    if (c.weyl_bulk_index < 0 || (c.plan.bulk_count > 0 && c.weyl_bulk_index >= c.plan.bulk_count)) {
        key_error("experiment.weyl_bulk_index", "must index a bulk generator");
    }
    if (c.plan.weyl_n_max < 1) key_error("experiment.weyl_n_max", "must be >= 1");
    if (!(c.weyl_final_max > 0.0)) key_error("experiment.weyl_final_max", "must be positive");
    if (!(c.weyl_r2_min > 0.0 && c.weyl_r2_min <= 1.0)) key_error("experiment.weyl_r2_min", "must lie in (0, 1]");
    if (c.n_pairs < 1) key_error("experiment.n_pairs", "must be >= 1");
    if (c.ccr_n_max < 2 || c.ccr_n_max > 200) key_error("experiment.ccr_n_max", "must lie in [2, 200]");

    const Tolerances& t = c.plan.tol;
    const std::pair<const char*, double> positive[] = {
        {"rank", t.rank},   {"num", t.num},           {"spectral", t.spectral}, {"witness", t.witness},
        {"quad", t.quad},   {"eig", t.eig},           {"pde", t.pde},           {"quotient", t.quotient},
        {"dual", t.dual},   {"trace", t.trace},       {"exp", t.exp},           {"weyl", t.weyl},
        {"weyl_norm_cap", t.weyl_norm_cap}, {"expectation", t.expectation}, {"commutator", t.commutator},
        {"monotonicity_slack", t.monotonicity_slack}, {"tikhonov", t.tikhonov},
    };
    for (const auto& [name, v] : positive) {
        if (!(v > 0.0)) key_error(std::string("tolerances.") + name, "must be positive");
    }
    if (t.n_witness < 1) key_error("tolerances.n_witness", "must be >= 1");
    if (t.support_margin < 1) key_error("tolerances.support_margin", "must be >= 1");
    if (c.out_dir.empty()) key_error("output.dir", "must not be empty");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg = default_config();
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        // '#' starts a comment anywhere; ';' only at the start of a line, since it
        // also separates list items
        std::string body = trim(line.substr(0, line.find('#')));
        if (!body.empty() && body.front() == ';') body.clear();
        if (body.empty()) continue;
        auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
        if (body.front() == '[') {
            if (body.back() != ']') throw Error(ErrorCode::Config, where() + "malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections)) {
                throw Error(ErrorCode::Config, where() + "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::Config, where() + "expected 'key = value'");
        if (section.empty()) throw Error(ErrorCode::Config, where() + "key outside of a section");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto& table = fields();
        auto it = std::find_if(table.begin(), table.end(),
                               [&](const Field& f) { return section == f.section && key == f.key; });
        if (it == table.end()) throw Error(ErrorCode::Config, where() + "unknown key '" + section + "." + key + "'");
        const std::string full = section + "." + key;
        if (std::find(seen.begin(), seen.end(), full) != seen.end()) {
            throw Error(ErrorCode::Config, where() + "duplicate key '" + full + "'");
        }
        seen.push_back(full);
        try {
            it->set(cfg, value, full);
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, where() + e.what());
        }
    }
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    std::string section;
    for (const Field& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += std::string(f.key) + " = " + f.get(cfg) + "\n";
    }
    return out;
}

std::string defaults_text() {
    const RunConfig cfg = default_config();
    std::string out = "# adsholo run configuration; every key is optional.\n";
    std::string section;
    for (const Field& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += "# " + std::string(f.doc) + "\n";
        out += std::string(f.key) + " = " + f.get(cfg) + "\n";
    }
    return out;
}

} // namespace adsholo
