#pragma once

// JSON forms of the exact types. A LaurentPoly maps exponent (signed-integer
// string) to coefficient ("p" or "p/q" rational string); round-trips are
// bit-exact because both sides are integers.

#include <nlohmann/json.hpp>

#include <string>

#include "tetra3d/laurent.hpp"

namespace tetra3d {

using json = nlohmann::ordered_json;

inline json laurent_to_json(const LaurentPoly& p) {
    json j = json::object();
    for (const auto& [e, c] : p.coeffs()) {
        const BigInt num = boost::multiprecision::numerator(c);
        const BigInt den = boost::multiprecision::denominator(c);
        std::string v = num.str();
        if (den != 1) v += "/" + den.str();
        j[std::to_string(e)] = v;
    }
    return j;
}

inline LaurentPoly laurent_from_json(const json& j) {
    LaurentPoly p;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const int e = std::stoi(it.key());
        const std::string v = it.value().get<std::string>();
        const auto slash = v.find('/');
        Rational c;
        if (slash == std::string::npos)
            c = Rational(BigInt(v));
        else
            c = Rational(BigInt(v.substr(0, slash)), BigInt(v.substr(slash + 1)));
        p += LaurentPoly::monomial(e, c);
    }
    return p;
}

} // namespace tetra3d
