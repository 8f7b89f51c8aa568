#pragma once

#include "bvpair/bv.hpp"
#include "bvpair/dm_field.hpp"
#include "bvpair/measure.hpp"

#include <map>
#include <string>
#include <vector>

namespace bvpair {

enum class PairingRoute { Definition, Decomposition };
const char* to_string(PairingRoute r);

// Density of the pairing with respect to |Du|, stored piecewise: values on
// the diffuse pieces of |Du| (a.c. or Cantor) and ratios at its atoms.
struct ThetaPiece {
    Rational lo;
    Rational hi;
    StairPoly value;
    bool cantor = false;
};

struct ThetaTable {
    std::vector<ThetaPiece> diffuse;
    std::map<Rational, Rational> atoms;

    // Throws UndefinedDensity where |Du| carries no mass.
    Rational at(const Rational& x) const;
    std::string to_string() const;
};

struct PairingResult {
    Measure1D measure;
    Measure1D ac;
    Measure1D diffuse;  // Cantor part
    Measure1D jump;
    ThetaTable theta;
    PairingRoute route = PairingRoute::Definition;

    std::string to_string() const;
};

// Div(uA) - u^lambda Div A.
PairingResult pairing_by_definition(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda);
// A u' L^1 + A D^c u + [(1 - lambda) Tr^+ + lambda Tr^-](u^+ - u^-) at each jump,
// the jump set oriented so that u^i = u^+.
PairingResult pairing_by_decomposition(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda);

// (1/2 - lambda)(u^+ - u^-) Div A restricted to the jump set of u.
Measure1D jump_correction(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda);
// pairing_lambda - pairing_{1/2} - jump_correction; the zero measure.
Measure1D resto_identity(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda);

// Radon-Nikodym derivative of `pairing` with respect to |du|.
ThetaTable theta_density(const Measure1D& pairing, const Measure1D& du);
ThetaTable theta_density(const DMField1D& a, const PiecewiseBV& u, const LambdaSelector& lambda);

struct ExtremalPairings {
    Measure1D lsc;  // -u^+ (Div A)^+ + u^- (Div A)^- + Div(uA)
    Measure1D usc;  // -u^- (Div A)^+ + u^+ (Div A)^- + Div(uA)
};
ExtremalPairings extremal_pairings(const DMField1D& a, const PiecewiseBV& u);

} // namespace bvpair
