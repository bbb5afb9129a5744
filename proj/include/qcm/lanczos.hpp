#pragma once

#include <string>

#include "qcm/moments.hpp"

namespace qcm {

/// Connected moments c_1..c_4 of a distribution given by raw moments m_1..m_4.
struct Cumulants {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

Cumulants cumulants(double m1, double m2, double m3, double m4);
Cumulants cumulants(const MomentSet& ms);

enum class Branch { regular, negative_discriminant, degenerate_c2, degenerate_denominator };

const char* branch_name(Branch b);
Branch branch_from_name(const std::string& name);

/// Fourth-order Lanczos-expansion energy estimate together with the branch
/// taken. On the regular branch
///     E = c1 - c2^2/(c3^2 - c2 c4) (sqrt(3 c3^2 - 2 c2 c4) - c3);
/// a negative discriminant keeps only the real part of the square root
/// (zero), degenerate c2 or denominator fall back to c1.
struct LanczosEstimate {
    double value = 0.0;
    Branch branch = Branch::regular;
    double discriminant = 0.0;
    double denominator = 0.0;
};

LanczosEstimate lanczos_energy(const Cumulants& c);

}  // namespace qcm
