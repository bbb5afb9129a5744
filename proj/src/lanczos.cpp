#include "qcm/lanczos.hpp"

#include <cmath>
#include <stdexcept>

namespace qcm {

Cumulants cumulants(double m1, double m2, double m3, double m4) {
    if (!std::isfinite(m1) || !std::isfinite(m2) || !std::isfinite(m3) || !std::isfinite(m4))
        throw std::runtime_error("cumulants: non-finite moment");
    Cumulants c;
    c.c1 = m1;
    c.c2 = m2 - c.c1 * m1;
    c.c3 = m3 - c.c1 * m2 - 2.0 * c.c2 * m1;
    c.c4 = m4 - c.c1 * m3 - 3.0 * c.c2 * m2 - 3.0 * c.c3 * m1;
    return c;
}

Cumulants cumulants(const MomentSet& ms) { return cumulants(ms.m[1], ms.m[2], ms.m[3], ms.m[4]); }

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::regular: return "regular";
        case Branch::negative_discriminant: return "negative_discriminant";
        case Branch::degenerate_c2: return "degenerate_c2";
        case Branch::degenerate_denominator: return "degenerate_denominator";
    }
    return "?";
}

Branch branch_from_name(const std::string& name) {
    if (name == "regular") return Branch::regular;
    if (name == "negative_discriminant") return Branch::negative_discriminant;
    if (name == "degenerate_c2") return Branch::degenerate_c2;
    if (name == "degenerate_denominator") return Branch::degenerate_denominator;
    throw std::runtime_error("unknown branch name: " + name);
}

LanczosEstimate lanczos_energy(const Cumulants& c) {
    if (!std::isfinite(c.c1) || !std::isfinite(c.c2) || !std::isfinite(c.c3) ||
        !std::isfinite(c.c4))
        throw std::runtime_error("lanczos_energy: non-finite cumulant");
    constexpr double eps = 1e-10;
    // energy-squared scale; eigenstate inputs must land exactly on c1
    const double scale = std::max({1.0, std::abs(c.c2), std::pow(std::abs(c.c3), 2.0 / 3.0),
                                   std::sqrt(std::abs(c.c4))});
    LanczosEstimate est;
    est.denominator = c.c3 * c.c3 - c.c2 * c.c4;
    est.discriminant = 3.0 * c.c3 * c.c3 - 2.0 * c.c2 * c.c4;
    if (c.c2 <= eps * scale) {
        est.value = c.c1;
        est.branch = Branch::degenerate_c2;
        return est;
    }
    if (std::abs(est.denominator) <= eps * scale * scale) {
        est.value = c.c1;
        est.branch = Branch::degenerate_denominator;
        return est;
    }
    if (est.discriminant < 0.0) {
        // the square root's real part is zero; keep only the -c3 piece
        est.value = c.c1 + c.c2 * c.c2 * c.c3 / est.denominator;
        est.branch = Branch::negative_discriminant;
        return est;
    }
    est.value = c.c1 - c.c2 * c.c2 / est.denominator * (std::sqrt(est.discriminant) - c.c3);
    est.branch = Branch::regular;
    return est;
}

}  // namespace qcm
