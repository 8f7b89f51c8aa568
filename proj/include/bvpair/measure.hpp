#pragma once

#include "bvpair/cantor.hpp"
#include "bvpair/piecewise_poly.hpp"
#include "bvpair/rational.hpp"
#include "bvpair/stair_poly.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace bvpair {

// Finite union of disjoint open intervals plus finitely many points.
class BorelSet1D {
public:
    BorelSet1D() = default;
    BorelSet1D(std::vector<std::pair<Rational, Rational>> intervals, std::vector<Rational> points);

    static BorelSet1D interval(const Rational& lo, const Rational& hi);
    static BorelSet1D closed(const Rational& lo, const Rational& hi);
    static BorelSet1D point(const Rational& x);

    const std::vector<std::pair<Rational, Rational>>& intervals() const { return intervals_; }
    const std::vector<Rational>& points() const { return points_; }
    bool empty() const { return intervals_.empty() && points_.empty(); }
    bool contains(const Rational& x) const;

    BorelSet1D unite(const BorelSet1D& other) const;
    BorelSet1D intersect(const BorelSet1D& other) const;
    // Complement relative to the open interval (lo, hi).
    BorelSet1D complement(const Rational& lo, const Rational& hi) const;

    friend bool operator==(const BorelSet1D& a, const BorelSet1D& b) {
        return a.intervals_ == b.intervals_ && a.points_ == b.points_;
    }
    std::string to_string() const;

private:
    void normalize();
    std::vector<std::pair<Rational, Rational>> intervals_;
    std::vector<Rational> points_;
};

// density * L^1 on (lo, hi).
struct AcPiece {
    Rational lo;
    Rational hi;
    StairPoly density;
    friend bool operator==(const AcPiece& a, const AcPiece& b) {
        return a.lo == b.lo && a.hi == b.hi && a.density == b.density;
    }
};

// weight(x) dC restricted to the window [lo, hi], where C is the unit-mass
// Cantor measure carried by the staircase geometry.
struct CantorPart {
    Staircase geometry;
    Rational lo;
    Rational hi;
    Polynomial weight;

    // Cantor mass of the window (weight ignored).
    Rational base_mass() const;
    friend bool operator==(const CantorPart& a, const CantorPart& b) {
        return a.geometry == b.geometry && a.lo == b.lo && a.hi == b.hi && a.weight == b.weight;
    }
};

struct Approx {
    Rational value;
    bool exact = true;
};

// Signed Radon measure on the open interval (lo, hi): piecewise density,
// finitely many atoms and weighted Cantor components. Every constructor and
// operation returns the normalized form, so == is equality of measures for
// parts built on the same staircase geometries.
class Measure1D {
public:
    Measure1D() : Measure1D(Rational(0), Rational(1)) {}
    Measure1D(const Rational& lo, const Rational& hi);
    Measure1D(const Rational& lo, const Rational& hi, std::vector<AcPiece> ac, std::map<Rational, Rational> atoms,
              std::vector<CantorPart> cantor);

    static Measure1D dirac(const Rational& lo, const Rational& hi, const Rational& x, const Rational& w = 1);
    static Measure1D density(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b,
                             const StairPoly& d);
    // Classical Cantor measure carried by [a, b] with total mass m.
    static Measure1D cantor(const Rational& lo, const Rational& hi, const Rational& a, const Rational& b,
                            const Rational& m);

    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    const std::vector<AcPiece>& ac() const { return ac_; }
    const std::map<Rational, Rational>& atoms() const { return atoms_; }
    const std::vector<CantorPart>& cantor_parts() const { return cantor_; }
    bool is_zero() const { return ac_.empty() && atoms_.empty() && cantor_.empty(); }
    bool has_cantor() const { return !cantor_.empty(); }
    Rational atom(const Rational& x) const;

    Measure1D& operator+=(const Measure1D& o);
    Measure1D& operator-=(const Measure1D& o);
    friend Measure1D operator+(Measure1D a, const Measure1D& b) { return a += b; }
    friend Measure1D operator-(Measure1D a, const Measure1D& b) { return a -= b; }
    friend Measure1D operator*(const Measure1D& m, const Rational& s) { return m.scaled(s); }
    friend Measure1D operator*(const Rational& s, const Measure1D& m) { return m.scaled(s); }
    Measure1D operator-() const { return scaled(Rational(-1)); }
    Measure1D scaled(const Rational& s) const;
    friend bool operator==(const Measure1D& a, const Measure1D& b);
    friend bool operator!=(const Measure1D& a, const Measure1D& b) { return !(a == b); }

    // mu(E), the integral of phi, and the total mass mu(Omega). Cantor parts
    // use the self-similar quadrature; Approx::exact reports whether it was
    // exact.
    Approx eval(const BorelSet1D& e, unsigned depth_cap = cantor::kDefaultDepthCap) const;
    Approx act(const PiecewisePoly& phi, unsigned depth_cap = cantor::kDefaultDepthCap) const;
    Approx mass(unsigned depth_cap = cantor::kDefaultDepthCap) const;

    Measure1D restrict(const BorelSet1D& e) const;
    // Multiplication by a piecewise polynomial; its values at atoms must be
    // well defined (continuity there).
    Measure1D times(const PiecewisePoly& f) const;

    std::string to_string() const;

private:
    void normalize();
    void check_same_domain(const Measure1D& o) const;

    Rational lo_, hi_;
    std::vector<AcPiece> ac_;
    std::map<Rational, Rational> atoms_;
    std::vector<CantorPart> cantor_;
};

Measure1D parse_measure(const std::string& text);

// Width of the enclosing intervals used when a density changes sign at an
// irrational point; such splits make the result approximate.
Rational root_tolerance();

Measure1D total_variation(const Measure1D& mu);
std::pair<Measure1D, Measure1D> jordan(const Measure1D& mu);
// Sign of the polar density at x; throws NotInSupport off supp |mu| or at
// points where the one-sided signs disagree.
int polar_density(const Measure1D& mu, const Rational& x);
Measure1D lattice_min(const Measure1D& a, const Measure1D& b);
Measure1D lattice_max(const Measure1D& a, const Measure1D& b);

struct LebesgueParts {
    Measure1D ac;
    Measure1D jump;
    Measure1D cantor;
};
LebesgueParts lebesgue_decompose(const Measure1D& mu);

// Breakpoints, atoms and Cantor window ends of mu, sorted and unique.
std::vector<Rational> feature_points(const Measure1D& mu);

} // namespace bvpair
