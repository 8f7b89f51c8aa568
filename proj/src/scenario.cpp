#include "bvpair/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace bvpair {

using nlohmann::json;

// ------------------------------------------------------------------ registry

const std::vector<CheckInfo>& check_registry() {
    static const std::vector<CheckInfo> reg{
        {"chain_rule", "chain rule for Lipschitz maps of u", false},
        {"coarea", "coarea formula for the lambda-pairing", false},
        {"domination", "|pairing| <= ||A||_inf |Du|", false},
        {"extremal", "extremal pairings as lattice min and max of lambda = 0, 1", false},
        {"gauss_green", "Gauss-Green formulas on an interval (interior and closure)", false},
        {"leibniz", "Leibniz formula for the pairing of vA with Du", false},
        {"mollification", "approximation of the field by smooth fields", false},
        {"nonlinearity", "P(u) + P(-u) equals twice the jump correction", false},
        {"pairing", "lambda-pairing Div(uA) - u^lambda Div A", false},
        {"radial_divergence", "divergence of a radial field with sphere jumps", true},
        {"radial_gauss_green", "Gauss-Green formulas on a ball", true},
        {"radial_pairing", "lambda-pairing on sphere jumps, two routes", true},
        {"resto", "lambda-pairing minus standard pairing equals the jump correction", false},
        {"semicontinuity", "semicontinuity of the pairing under strict convergence", false},
        {"summability", "summability of traces on countably many spheres", true},
        {"theta_slicing", "density of the pairing through level sets", false},
        {"two_path", "definition route against the a.c. + Cantor + jump decomposition", false},
    };
    return reg;
}

const CheckInfo* find_check(const std::string& name) {
    for (const auto& c : check_registry())
        if (c.name == name) return &c;
    return nullptr;
}

std::string list_checks_text() {
    std::ostringstream os;
    for (const auto& c : check_registry())
        os << c.name << '\t' << (c.radial ? "ball" : "interval") << '\t' << c.anchor << '\n';
    return os.str();
}

bool is_unsupported(ErrorCode c) {
    return c == ErrorCode::Unsupported || c == ErrorCode::DegreeUnsupported || c == ErrorCode::CantorJumpInteraction ||
           c == ErrorCode::SupportOverflow;
}

// ------------------------------------------------------------------ parsing

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& what) {
    throw Error(ErrorCode::Parse, (ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

template <class F>
auto located(const std::string& ptr, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Unsupported) throw;
        fail(ptr, e.what());
    }
}

const json& member(const json& obj, const std::string& key, const std::string& ptr) {
    if (!obj.is_object() || !obj.contains(key)) fail(ptr, "missing '" + key + "'");
    return obj.at(key);
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ptr) {
    if (!obj.is_object()) fail(ptr, "expected an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) fail(ptr + "/" + k, "unknown key");
}

Rational rat(const json& j, const std::string& ptr) {
    if (j.is_string()) return located(ptr, [&] { return parse_rational(j.get<std::string>()); });
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number()) fail(ptr, "floats are rejected in exact fields; write the rational as a string \"p/q\"");
    fail(ptr, "expected a rational");
}

std::vector<Rational> rat_list(const json& j, const std::string& ptr) {
    if (!j.is_array()) fail(ptr, "expected an array of rationals");
    std::vector<Rational> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(rat(j[k], ptr + "/" + std::to_string(k)));
    return out;
}

long integer(const json& j, const std::string& ptr) {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<long>();
}

double real(const json& j, const std::string& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
}

bool boolean(const json& j, const std::string& ptr) {
    if (!j.is_boolean()) fail(ptr, "expected true or false");
    return j.get<bool>();
}

std::string text(const json& j, const std::string& ptr) {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
}

PiecewiseBV parse_function(const json& j, const std::string& ptr, const Rational& lo, const Rational& hi) {
    PiecewiseBV out;
    if (j.is_string()) {
        out = located(ptr, [&] { return parse_bv(j.get<std::string>()); });
    } else if (j.is_object() && j.size() == 1 && j.contains("indicator")) {
        const auto ab = rat_list(j["indicator"], ptr + "/indicator");
        if (ab.size() != 2) fail(ptr + "/indicator", "expected [a, b]");
        out = located(ptr, [&] { return PiecewiseBV::indicator(lo, hi, ab[0], ab[1]); });
    } else if (j.is_object() && j.size() == 1 && j.contains("constant")) {
        out = PiecewiseBV::constant(lo, hi, rat(j["constant"], ptr + "/constant"));
    } else if (j.is_object() && j.contains("interpolant")) {
        only_keys(j, {"interpolant"}, ptr);
        const json& ip = j["interpolant"];
        only_keys(ip, {"x", "y"}, ptr + "/interpolant");
        const auto xs = rat_list(member(ip, "x", ptr + "/interpolant"), ptr + "/interpolant/x");
        const auto ys = rat_list(member(ip, "y", ptr + "/interpolant"), ptr + "/interpolant/y");
        out = located(ptr, [&] { return PiecewiseBV::from_poly(PiecewisePoly::linear_interpolant(xs, ys)); });
    } else if (j.is_object() && j.contains("staircase")) {
        only_keys(j, {"base", "staircase"}, ptr);
        const auto abm = rat_list(j["staircase"], ptr + "/staircase");
        if (abm.size() != 3) fail(ptr + "/staircase", "expected [a, b, mass]");
        const PiecewiseBV base =
            j.contains("base") ? parse_function(j["base"], ptr + "/base", lo, hi) : PiecewiseBV::constant(lo, hi, 0);
        out = located(ptr, [&] { return base.with_staircase(abm[0], abm[1], abm[2]); });
    } else {
        fail(ptr, "expected canonical text or one of {indicator, constant, interpolant, staircase}");
    }
    if (out.lo() != lo || out.hi() != hi) fail(ptr, "domain differs from the scenario interval");
    return out;
}

PiecewisePoly parse_test_function(const json& j, const std::string& ptr, const Rational& lo, const Rational& hi) {
    PiecewisePoly out;
    if (j.is_string()) {
        out = located(ptr, [&] { return parse_piecewise_poly(j.get<std::string>()); });
    } else if (j.is_object() && j.size() == 1 && j.contains("bump")) {
        const auto ab = rat_list(j["bump"], ptr + "/bump");
        if (ab.size() != 2) fail(ptr + "/bump", "expected [a, b]");
        out = located(ptr, [&] { return PiecewisePoly::bump(lo, hi, ab[0], ab[1]); });
    } else if (j.is_object() && j.size() == 1 && j.contains("polynomial")) {
        const auto cs = rat_list(j["polynomial"], ptr + "/polynomial");
        out = PiecewisePoly::polynomial(lo, hi, Polynomial(cs));
    } else {
        fail(ptr, "expected canonical text or one of {bump, polynomial}");
    }
    if (out.lo() != lo || out.hi() != hi) fail(ptr, "domain differs from the scenario interval");
    return out;
}

SequenceSpec parse_sequence(const json& j, const std::string& ptr) {
    only_keys(j, {"kind", "negate", "center", "height"}, ptr);
    SequenceSpec s;
    const std::string kind = text(member(j, "kind", ptr), ptr + "/kind");
    if (kind == "upper") s.kind = SequenceKind::Upper;
    else if (kind == "lower") s.kind = SequenceKind::Lower;
    else if (kind == "hat") s.kind = SequenceKind::Hat;
    else fail(ptr + "/kind", "expected upper, lower or hat");
    if (j.contains("negate")) s.negate = boolean(j["negate"], ptr + "/negate");
    if (j.contains("center")) s.center = rat(j["center"], ptr + "/center");
    if (j.contains("height")) s.height = rat(j["height"], ptr + "/height");
    return s;
}

void parse_selector(const json& j, const std::string& ptr, Scenario& s) {
    if (j.is_string()) {
        const std::string f = j.get<std::string>();
        if (f != "lsc" && f != "usc") fail(ptr, "expected lsc, usc or an object");
        s.selector_family = f;
        return;
    }
    only_keys(j, {"default", "overrides", "family"}, ptr);
    Rational def(1, 2);
    if (j.contains("default")) def = rat(j["default"], ptr + "/default");
    std::map<Rational, Rational> ov;
    if (j.contains("overrides")) {
        const json& o = j["overrides"];
        if (!o.is_array()) fail(ptr + "/overrides", "expected an array of [x, lambda] pairs");
        for (std::size_t k = 0; k < o.size(); ++k) {
            const auto pair = rat_list(o[k], ptr + "/overrides/" + std::to_string(k));
            if (pair.size() != 2) fail(ptr + "/overrides/" + std::to_string(k), "expected [x, lambda]");
            ov[pair[0]] = pair[1];
        }
    }
    if (j.contains("family")) {
        const std::string f = text(j["family"], ptr + "/family");
        if (f != "lsc" && f != "usc") fail(ptr + "/family", "expected lsc or usc");
        s.selector_family = f;
    }
    s.selector = located(ptr, [&] { return LambdaSelector(def, ov); });
}

// Per-check parameters; parsed once during validation and again when run.
struct Params {
    std::optional<Measure1D> expected;
    std::vector<Rational> levels;
    std::optional<PiecewisePoly> h;
    std::optional<Rational> truncation;
    std::optional<PiecewiseBV> v;
    Rational c, d;
    Rational eps;
    double floor = 1e-9;
    std::size_t phi = 0;
    std::optional<SequenceSpec> sequence;
    bool weak_star = false;
    std::optional<long> depth;
    std::optional<Rational> threshold;
    long max_depth = 100000;
    Rational rho;
};

Params parse_params(const CheckSpec& c, const Scenario& s) {
    Params p;
    const json& j = c.params;
    const std::string ptr = c.pointer;
    auto need_interval = [&] {
        if (s.ball) fail(ptr, "check '" + c.check + "' needs an interval scenario");
        if (!s.field || !s.function) fail(ptr, "check '" + c.check + "' needs a field and a function");
    };
    auto need_ball = [&] {
        if (!s.ball || !s.radial_field || !s.radial_function)
            fail(ptr, "check '" + c.check + "' needs a ball scenario with radial field and function");
    };
    auto need_phis = [&] {
        if (s.test_functions.empty()) fail(ptr, "check '" + c.check + "' needs test functions");
    };
    const std::string& n = c.check;
    if (n == "pairing") {
        need_interval();
        only_keys(j, {"expected"}, ptr);
        if (j.contains("expected"))
            p.expected = located(ptr + "/expected", [&] { return parse_measure(text(j["expected"], ptr + "/expected")); });
    } else if (n == "two_path" || n == "resto" || n == "nonlinearity" || n == "extremal" || n == "domination") {
        need_interval();
        only_keys(j, {}, ptr);
    } else if (n == "coarea") {
        need_interval();
        need_phis();
        only_keys(j, {}, ptr);
    } else if (n == "theta_slicing") {
        need_interval();
        only_keys(j, {"levels"}, ptr);
        if (j.contains("levels")) p.levels = rat_list(j["levels"], ptr + "/levels");
    } else if (n == "chain_rule") {
        need_interval();
        only_keys(j, {"h"}, ptr);
        const json& h = member(j, "h", ptr);
        if (h.is_object() && h.contains("truncation")) {
            only_keys(h, {"truncation"}, ptr + "/h");
            p.truncation = rat(h["truncation"], ptr + "/h/truncation");
            if (!(*p.truncation > 0)) fail(ptr + "/h/truncation", "truncation level must be positive");
        } else {
            p.h = located(ptr + "/h", [&] { return parse_piecewise_poly(text(h, ptr + "/h")); });
        }
    } else if (n == "leibniz") {
        need_interval();
        only_keys(j, {"v"}, ptr);
        p.v = parse_function(member(j, "v", ptr), ptr + "/v", s.lo, s.hi);
    } else if (n == "gauss_green") {
        need_interval();
        only_keys(j, {"E"}, ptr);
        const auto e = rat_list(member(j, "E", ptr), ptr + "/E");
        if (e.size() != 2 || !(s.lo < e[0] && e[0] < e[1] && e[1] < s.hi))
            fail(ptr + "/E", "expected [c, d] with lo < c < d < hi");
        p.c = e[0];
        p.d = e[1];
    } else if (n == "mollification") {
        if (s.ball || !s.field) fail(ptr, "mollification needs an interval scenario with a field");
        need_phis();
        only_keys(j, {"eps", "floor", "phi"}, ptr);
        p.eps = rat(member(j, "eps", ptr), ptr + "/eps");
        if (!(p.eps > 0)) fail(ptr + "/eps", "eps must be positive");
        if (j.contains("floor")) p.floor = real(j["floor"], ptr + "/floor");
        if (j.contains("phi")) p.phi = static_cast<std::size_t>(integer(j["phi"], ptr + "/phi"));
        if (p.phi >= s.test_functions.size()) fail(ptr + "/phi", "test function index out of range");
    } else if (n == "semicontinuity") {
        need_interval();
        need_phis();
        only_keys(j, {"sequence", "weak_star"}, ptr);
        if (j.contains("sequence")) p.sequence = parse_sequence(j["sequence"], ptr + "/sequence");
        else p.sequence = s.sequence;
        if (!p.sequence) fail(ptr, "semicontinuity needs a sequence");
        if (j.contains("weak_star")) p.weak_star = boolean(j["weak_star"], ptr + "/weak_star");
    } else if (n == "radial_divergence" || n == "radial_pairing") {
        need_ball();
        only_keys(j, {}, ptr);
    } else if (n == "summability") {
        need_ball();
        only_keys(j, {"depth", "threshold", "max_depth"}, ptr);
        if (j.contains("depth")) p.depth = integer(j["depth"], ptr + "/depth");
        if (j.contains("threshold")) p.threshold = rat(j["threshold"], ptr + "/threshold");
        if (j.contains("max_depth")) p.max_depth = integer(j["max_depth"], ptr + "/max_depth");
        const long depth = p.depth.value_or(s.radial_function->depth());
        if (depth < 1 || depth > s.radial_function->depth() || depth > s.radial_field->depth())
            fail(ptr + "/depth", "depth exceeds the profiles");
        if (p.threshold && !s.radial_function->radius_rule())
            fail(ptr + "/threshold", "a divergence threshold needs rule-generated radii");
    } else if (n == "radial_gauss_green") {
        need_ball();
        only_keys(j, {"rho"}, ptr);
        p.rho = rat(member(j, "rho", ptr), ptr + "/rho");
        if (!(p.rho > 0 && p.rho < 1)) fail(ptr + "/rho", "rho must lie in (0, 1)");
    }
    return p;
}

} // namespace

LambdaSelector Scenario::resolved_selector() const {
    if (selector_family.empty() || !field) return selector;
    return selector_family == "lsc" ? lsc_selector(*field, selector) : usc_selector(*field, selector);
}

Scenario parse_scenario(const std::string& src) {
    json doc;
    try {
        doc = json::parse(src);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("malformed JSON: ") + e.what());
    }
    only_keys(doc, {"schema", "name", "domain", "field", "function", "selector", "test_functions", "sequence", "checks",
                    "description"},
              "");
    if (integer(member(doc, "schema", ""), "/schema") != 1) fail("/schema", "unsupported schema version");
    Scenario s;
    s.name = text(member(doc, "name", ""), "/name");
    if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos)
        fail("/name", "name must be a non-empty file-name-safe word");

    const json& dom = member(doc, "domain", "");
    if (dom.is_object() && dom.contains("interval")) {
        only_keys(dom, {"interval"}, "/domain");
        const auto iv = rat_list(dom["interval"], "/domain/interval");
        if (iv.size() != 2 || !(iv[0] < iv[1])) fail("/domain/interval", "expected [lo, hi] with lo < hi");
        s.lo = iv[0];
        s.hi = iv[1];
    } else if (dom.is_object() && dom.contains("ball")) {
        only_keys(dom, {"ball"}, "/domain");
        s.ball = true;
        s.dimension = static_cast<int>(integer(dom["ball"], "/domain/ball"));
        if (s.dimension < 2) fail("/domain/ball", "ball dimension must be at least 2");
        s.lo = 0;
        s.hi = 1;
    } else {
        fail("/domain", "expected {\"interval\": [lo, hi]} or {\"ball\": N}");
    }

    auto radial = [&](const json& j, const std::string& ptr) {
        if (!j.is_object() || !j.contains("radial")) fail(ptr, "ball scenarios take {\"radial\": \"(N, rule_r, rule_a, J)\"}");
        only_keys(j, {"radial"}, ptr);
        RadialProfile p = located(ptr + "/radial", [&] { return parse_radial_profile(text(j["radial"], ptr + "/radial")); });
        if (p.dimension() != s.dimension) fail(ptr + "/radial", "dimension differs from the ball");
        return p;
    };
    if (doc.contains("field")) {
        if (s.ball) s.radial_field = radial(doc["field"], "/field");
        else s.field = DMField1D(parse_function(doc["field"], "/field", s.lo, s.hi));
    }
    if (doc.contains("function")) {
        if (s.ball) s.radial_function = radial(doc["function"], "/function");
        else s.function = parse_function(doc["function"], "/function", s.lo, s.hi);
    }
    if (doc.contains("selector")) parse_selector(doc["selector"], "/selector", s);
    if (doc.contains("test_functions")) {
        const json& tf = doc["test_functions"];
        if (!tf.is_array()) fail("/test_functions", "expected an array");
        if (s.ball && !tf.empty()) fail("/test_functions", "ball scenarios take no test functions");
        for (std::size_t k = 0; k < tf.size(); ++k)
            s.test_functions.push_back(parse_test_function(tf[k], "/test_functions/" + std::to_string(k), s.lo, s.hi));
    }
    if (doc.contains("sequence")) s.sequence = parse_sequence(doc["sequence"], "/sequence");

    const json& checks = member(doc, "checks", "");
    if (!checks.is_array() || checks.empty()) fail("/checks", "expected a non-empty array");
    std::set<std::string> ids;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const std::string ptr = "/checks/" + std::to_string(k);
        const json& c = checks[k];
        if (!c.is_object()) fail(ptr, "expected an object");
        CheckSpec spec;
        spec.pointer = ptr;
        spec.check = text(member(c, "check", ptr), ptr + "/check");
        const CheckInfo* info = find_check(spec.check);
        if (!info) fail(ptr + "/check", "unknown check '" + spec.check + "'");
        spec.id = c.contains("id") ? text(c["id"], ptr + "/id") : spec.check;
        if (spec.id.empty() || spec.id.find_first_of("/\\ ") != std::string::npos)
            fail(ptr + "/id", "id must be a non-empty file-name-safe word");
        if (!ids.insert(spec.id).second) fail(ptr + "/id", "duplicate check id '" + spec.id + "'");
        if (c.contains("expect")) {
            const std::string e = text(c["expect"], ptr + "/expect");
            if (e != "pass" && e != "fail") fail(ptr + "/expect", "expected pass or fail");
            spec.expect_fail = e == "fail";
        }
        if (c.contains("tolerance")) {
            spec.tolerance = real(c["tolerance"], ptr + "/tolerance");
            if (!(*spec.tolerance >= 0)) fail(ptr + "/tolerance", "tolerance must be nonnegative");
        }
        spec.params = json::object();
        for (const auto& [key, v] : c.items())
            if (key != "check" && key != "id" && key != "expect" && key != "tolerance") spec.params[key] = v;
        s.checks.push_back(std::move(spec));
    }
    for (const auto& c : s.checks) parse_params(c, s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

// ------------------------------------------------------------------ running

namespace {

std::string str(const Rational& r) { return bvpair::to_string(r); }

std::string num(const Rational& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", r.get_d());
    return buf;
}

CheckReport execute(const Scenario& s, const CheckSpec& c, const RunOptions& ro) {
    const Params p = parse_params(c, s);
    const CheckOptions opt{c.tolerance.value_or(ro.tolerance)};
    const std::string& n = c.check;
    if (s.ball) {
        const RadialProfile &a = *s.radial_field, &u = *s.radial_function;
        if (n == "radial_divergence") {
            const auto d = radial_divergence(a);
            CheckReport r;
            r.name = n;
            if (d.bound && d.total_variation.value > *d.bound) r.add(d.total_variation.value - *d.bound);
            r.witness("spheres", std::to_string(d.spheres.size()));
            r.witness("total_variation", str(d.total_variation.value));
            if (d.bound) r.witness("bound", str(*d.bound));
            r.witness("units", "area of the unit sphere");
            r.series_header = {"radius", "weight"};
            for (const auto& [x, w] : d.spheres) r.series.push_back({str(x), str(w)});
            r.settle(opt.tolerance);
            return r;
        }
        if (n == "summability") {
            const long depth = p.depth.value_or(u.depth());
            const auto t = summability_diagnostics(a, u, depth);
            CheckReport r;
            r.name = n;
            r.series_header = {"J", "sum_r", "sum_jr", "lower_trace_inner", "upper_trace_jump", "jump_mass",
                               "jump_mass_bound"};
            for (const auto& row : t.rows) {
                if (!row.bounded()) r.add(row.jump_mass - row.jump_mass_bound);
                if (t.sum_r_limit && row.sum_r > *t.sum_r_limit) r.add(row.sum_r - *t.sum_r_limit);
                r.series.push_back({std::to_string(row.depth), num(row.sum_r),
                                    num(row.sum_jr), num(row.lower_trace_inner),
                                    num(row.upper_trace_jump), num(row.jump_mass),
                                    num(row.jump_mass_bound)});
            }
            const auto& last = t.rows.back();
            r.witness("depth", std::to_string(depth));
            r.witness("sum_r", num(last.sum_r));
            r.witness("sum_jr", num(last.sum_jr));
            if (t.sum_r_limit)
                r.witness(t.sum_r_limit_exact ? "sum_r_limit" : "sum_r_bound", num(*t.sum_r_limit));
            if (p.threshold) {
                const auto cert = divergence_certificate(*u.radius_rule(), *p.threshold, p.max_depth);
                if (cert) {
                    r.witness("exceeds_threshold_at", std::to_string(*cert));
                } else {
                    r.witness("exceeds_threshold_at", "none up to " + std::to_string(p.max_depth));
                    r.add(Rational(1));
                }
            }
            r.settle(opt.tolerance);
            return r;
        }
        if (n == "radial_pairing") {
            const auto rp = radial_pairing(a, u, s.selector);
            CheckReport r;
            r.name = n;
            r.add(rp.definition - rp.jump_formula);
            r.witness("spheres", std::to_string(rp.spheres.size()));
            r.witness("units", "area of the unit sphere");
            r.series_header = {"radius", "weight"};
            for (const auto& [x, w] : rp.spheres) r.series.push_back({str(x), str(w)});
            r.settle(opt.tolerance);
            return r;
        }
        if (n == "radial_gauss_green") return radial_gauss_green(a, u, s.selector, p.rho, opt);
        throw Error(ErrorCode::InvalidArgument, "check '" + n + "' does not apply to ball scenarios");
    }

    const DMField1D& a = *s.field;
    const LambdaSelector lam = s.resolved_selector();
    if (n == "mollification") return verify_mollification(a, s.test_functions[p.phi], p.eps, p.floor, opt);
    const PiecewiseBV& u = *s.function;
    if (n == "pairing") {
        const auto pr = pairing_by_definition(a, u, lam);
        CheckReport r;
        r.name = n;
        if (p.expected) r.add(pr.measure - *p.expected);
        r.witness("selector", lam.to_string());
        r.witness("measure", pr.measure.to_string());
        std::string atoms;
        for (const auto& [x, w] : pr.measure.atoms()) atoms += (atoms.empty() ? "" : " ") + ("(" + str(x) + "," + str(w) + ")");
        r.witness("atoms", "[" + atoms + "]");
        r.settle(opt.tolerance);
        return r;
    }
    if (n == "two_path") return verify_two_path(a, u, lam, opt);
    if (n == "resto") return verify_resto(a, u, lam, opt);
    if (n == "nonlinearity") return verify_nonlinearity(a, u, lam, opt);
    if (n == "extremal") return verify_extremal(a, u, opt);
    if (n == "domination") return verify_domination(a, u, lam, opt);
    if (n == "coarea") return verify_coarea(a, u, lam, s.test_functions, opt);
    if (n == "theta_slicing") return verify_theta_slicing(a, u, lam, p.levels, opt);
    if (n == "chain_rule") {
        PiecewisePoly h;
        if (p.truncation) {
            const Rational k = *p.truncation;
            const Rational m = max_q(u.sup_norm().value, k) + 1;
            h = PiecewisePoly({-m, -k, k, m}, {Polynomial(-k), Polynomial::x(), Polynomial(k)});
        } else {
            h = *p.h;
        }
        CheckReport r = verify_chain_rule(a, u, lam, h, opt);
        if (p.truncation) {
            const bool same = u.compose(h) == u.truncate(*p.truncation);
            r.witness("matches_truncate", same ? "yes" : "no");
            if (!same) r.add(Rational(1));
            r.settle(opt.tolerance);
        }
        return r;
    }
    if (n == "leibniz") return verify_leibniz(a, u, *p.v, lam, opt);
    if (n == "gauss_green") return gauss_green(a, u, lam, p.c, p.d, opt);
    if (n == "semicontinuity") {
        auto out = semicontinuity_experiment(a, lam, u, *p.sequence, s.test_functions, p.weak_star, opt);
        out.report.witness("lsc_violated", out.lsc_violated() ? "yes" : "no");
        out.report.witness("usc_violated", out.usc_violated() ? "yes" : "no");
        return out.report;
    }
    throw Error(ErrorCode::InvalidArgument, "check '" + n + "' does not apply to interval scenarios");
}

CheckOutcome run_one(const Scenario& s, const CheckSpec& c, const RunOptions& ro) {
    CheckOutcome o;
    o.spec = c;
    try {
        o.report = execute(s, c, ro);
        o.ok = o.report->pass != c.expect_fail;
    } catch (const Error& e) {
        o.error = e.code();
        o.message = e.what();
        o.unsupported = is_unsupported(e.code());
    } catch (const std::exception& e) {
        o.error = ErrorCode::InvalidArgument;
        o.message = e.what();
    }
    return o;
}

std::string csv_escape(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char ch : v) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

} // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
    RunResult res;
    res.scenario = s.name;
    res.outcomes.resize(s.checks.size());
    const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(s.checks.size())));
    if (jobs == 1) {
        for (std::size_t k = 0; k < s.checks.size(); ++k) res.outcomes[k] = run_one(s, s.checks[k], opt);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < s.checks.size(); k = next++) res.outcomes[k] = run_one(s, s.checks[k], opt);
            });
        for (auto& th : pool) th.join();
    }
    std::sort(res.outcomes.begin(), res.outcomes.end(),
              [](const CheckOutcome& x, const CheckOutcome& y) { return x.spec.id < y.spec.id; });

    bool unsupported = false, failed = false;
    for (const auto& o : res.outcomes) {
        unsupported = unsupported || o.unsupported;
        failed = failed || !o.ok;
    }
    res.exit_code = unsupported ? kExitUnsupported : failed ? kExitCheckFailed : kExitOk;
    const char* status = unsupported ? "unsupported" : failed ? "fail" : "pass";

    std::ostringstream txt;
    txt << "scenario " << s.name << ": " << status << " (" << res.outcomes.size() << (res.outcomes.size() == 1 ? " check)\n" : " checks)\n");
    json checks = json::array();
    for (const auto& o : res.outcomes) {
        const std::string expect = o.spec.expect_fail ? "fail" : "pass";
        txt << "\n[" << (o.ok ? "ok" : "FAILED") << "] " << o.spec.id << " (" << o.spec.check << ", expect " << expect
            << ")\n";
        json cj = {{"id", o.spec.id}, {"check", o.spec.check}, {"expect", expect}, {"ok", o.ok}};
        if (o.report) {
            txt << o.report->to_text();
            cj["report"] = o.report->to_json();
            if (!o.report->series.empty()) {
                std::ostringstream csv;
                for (std::size_t k = 0; k < o.report->series_header.size(); ++k)
                    csv << (k ? "," : "") << csv_escape(o.report->series_header[k]);
                csv << '\n';
                for (const auto& row : o.report->series) {
                    for (std::size_t k = 0; k < row.size(); ++k) csv << (k ? "," : "") << csv_escape(row[k]);
                    csv << '\n';
                }
                res.csv[s.name + "." + o.spec.id + ".csv"] = csv.str();
            }
        } else {
            txt << "error: " << o.message << '\n';
            cj["error"] = {{"code", to_string(*o.error)}, {"message", o.message}};
        }
        checks.push_back(std::move(cj));
    }
    res.text = txt.str();
    res.json = {{"schema", 1}, {"scenario", s.name}, {"status", status}, {"exit_code", res.exit_code}, {"checks", checks}};
    return res;
}

void write_reports(const RunResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + (fs::path(dir) / name).string());
        out << body;
    };
    put(r.scenario + ".txt", r.text);
    put(r.scenario + ".json", r.json.dump(2) + "\n");
    for (const auto& [name, body] : r.csv) put(name, body);
}

} // namespace bvpair
