#include "bvpair/pairing.hpp"

#include "bvpair/error.hpp"

#include <algorithm>
#include <sstream>

namespace bvpair {

const char* to_string(PairingRoute r) { return r == PairingRoute::Definition ? "definition" : "decomposition"; }

Rational ThetaTable::at(const Rational& x) const {
    auto it = atoms.find(x);
    if (it != atoms.end()) return it->second;
    for (const auto& p : diffuse) {
        const bool inside = p.cantor ? (p.lo <= x && x <= p.hi) : (p.lo < x && x < p.hi);
        if (inside) return p.value(x);
    }
    throw Error(ErrorCode::UndefinedDensity, "|Du| carries no mass at " + bvpair::to_string(x));
}

std::string ThetaTable::to_string() const {
    std::ostringstream os;
    os << "diffuse: [";
    for (std::size_t k = 0; k < diffuse.size(); ++k)
        os << (k ? " " : "") << '(' << bvpair::to_string(diffuse[k].lo) << ',' << bvpair::to_string(diffuse[k].hi)
           << ',' << diffuse[k].value.to_string() << (diffuse[k].cantor ? ",cantor" : "") << ')';
    os << "]; atoms: [";
    bool first = true;
    for (const auto& [x, v] : atoms) {
        os << (first ? "" : " ") << '(' << bvpair::to_string(x) << ',' << bvpair::to_string(v) << ')';
        first = false;
    }
    os << ']';
    return os.str();
}

std::string PairingResult::to_string() const {
    std::ostringstream os;
    os << "route: " << bvpair::to_string(route) << "\nac: " << ac.to_string() << "\ndiffuse: " << diffuse.to_string()
       << "\njump: " << jump.to_string() << "\ntheta: " << theta.to_string();
    return os.str();
}

namespace {

void check_domains(const DMField1D& a, const PiecewiseBV& u) {
    if (a.lo() != u.lo() || a.hi() != u.hi()) throw Error(ErrorCode::InvalidArgument, "field and function domains differ");
}

PairingResult finish(Measure1D m, const PiecewiseBV& u, PairingRoute route) {
    auto parts = lebesgue_decompose(m);
    PairingResult r{std::move(m), std::move(parts.ac), std::move(parts.cantor), std::move(parts.jump), {}, route};
    r.theta = theta_density(r.measure, u.derivative());
    return r;
}

} // namespace

PairingResult pairing_by_definition(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda) {
    check_domains(a, u);
    const Measure1D div_ua = (u * a.profile()).derivative();
    return finish(div_ua - lambda_times(u, lambda, a.divergence()), u, PairingRoute::Definition);
}

PairingResult pairing_by_decomposition(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda) {
    check_domains(a, u);
    const auto du = lebesgue_decompose(u.derivative());
    // The field's representative is irrelevant on diffuse parts: any selector works.
    const Measure1D ac = lambda_times(a.profile(), lambda, du.ac);
    for (const auto& c : du.cantor.cantor_parts()) {
        for (const auto& j : a.profile().jumps()) {
            if (j.x < c.lo || j.x > c.hi) continue;
            if (cantor::contains(c.geometry.normalize(j.x)))
                throw Error(ErrorCode::CantorJumpInteraction,
                            "field jumps at " + to_string(j.x) + " inside the Cantor support of Du");
        }
    }
    const Measure1D cantor = lambda_times(a.profile(), lambda, du.cantor);
    std::map<Rational, Rational> atoms;
    for (const auto& j : u.jumps()) {
        const TraceTriple t = normal_trace(a, j.x, j.nu());
        const Rational l = lambda.at(j.x);
        atoms.emplace(j.x, ((1 - l) * t.plus + l * t.minus) * (j.upper() - j.lower()));
    }
    const Measure1D jump(u.lo(), u.hi(), {}, std::move(atoms), {});
    return finish(ac + cantor + jump, u, PairingRoute::Decomposition);
}

Measure1D jump_correction(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda) {
    std::map<Rational, Rational> atoms;
    for (const auto& j : u.jumps())
        atoms.emplace(j.x, (Rational(1, 2) - lambda.at(j.x)) * (j.upper() - j.lower()) * a.divergence().atom(j.x));
    return Measure1D(u.lo(), u.hi(), {}, std::move(atoms), {});
}

Measure1D resto_identity(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda) {
    const Measure1D p = pairing_by_definition(a, u, lambda).measure;
    const Measure1D half = pairing_by_definition(a, u, LambdaSelector::constant(Rational(1, 2))).measure;
    return p - half - jump_correction(a, u, lambda);
}

ThetaTable theta_density(const Measure1D& pairing, const Measure1D& du) {
    ThetaTable out;
    const Measure1D v = total_variation(du);
    for (const auto& [x, w] : v.atoms()) out.atoms.emplace(x, pairing.atom(x) / w);
    for (const auto& piece : v.ac()) {
        if (!piece.density.is_polynomial())
            throw Error(ErrorCode::Unsupported, "density of the pairing against a staircase-coupled |Du|");
        const Polynomial& d = piece.density.base();
        std::vector<Rational> cuts{piece.lo, piece.hi};
        for (const auto& p : pairing.ac())
            for (const Rational& e : {p.lo, p.hi})
                if (piece.lo < e && e < piece.hi) cuts.push_back(e);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const Rational &l = cuts[k], &r = cuts[k + 1];
            StairPoly num;
            for (const auto& p : pairing.ac())
                if (p.lo <= l && r <= p.hi) num = p.density.restrict_to(l, r);
            auto q = num.divide_exact(d);
            if (!q) throw Error(ErrorCode::UndefinedDensity, "pairing density is not a polynomial multiple of |Du|");
            out.diffuse.push_back(ThetaPiece{l, r, *q, false});
        }
    }
    for (const auto& c : v.cantor_parts()) {
        std::vector<Rational> cuts{c.lo, c.hi};
        for (const auto& p : pairing.cantor_parts())
            if (p.geometry == c.geometry)
                for (const Rational& e : {p.lo, p.hi})
                    if (c.lo < e && e < c.hi) cuts.push_back(e);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            Polynomial num;
            for (const auto& p : pairing.cantor_parts())
                if (p.geometry == c.geometry && p.lo <= cuts[k] && cuts[k + 1] <= p.hi) num = p.weight;
            auto q = num.divide_exact(c.weight);
            if (!q) throw Error(ErrorCode::UndefinedDensity, "pairing Cantor weight is not a polynomial multiple of |Du|");
            out.diffuse.push_back(ThetaPiece{cuts[k], cuts[k + 1], StairPoly(*q), true});
        }
    }
    return out;
}

ThetaTable theta_density(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda) {
    return pairing_by_definition(a, u, lambda).theta;
}

ExtremalPairings extremal_pairings(const DMField1D& a, const PiecewiseBV& u) {
    check_domains(a, u);
    const Measure1D div_ua = (u * a.profile()).derivative();
    const auto [pos, neg] = jordan(a.divergence());
    const LambdaSelector upper = LambdaSelector::constant(1), lower = LambdaSelector::constant(0);
    return {div_ua - lambda_times(u, upper, pos) + lambda_times(u, lower, neg),
            div_ua - lambda_times(u, lower, pos) + lambda_times(u, upper, neg)};
}

} // namespace bvpair
