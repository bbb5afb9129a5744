#include "doctest.h"

#include <cmath>
#include <random>

#include "qcm/fci.hpp"
#include "qcm/integrals.hpp"
#include "qcm/lanczos.hpp"
#include "qcm/moments.hpp"

using namespace qcm;

namespace {

Cumulants cumulants_of_powers(double e) { return cumulants(e, e * e, e * e * e, e * e * e * e); }

// independent scripted evaluation of the fourth-order estimate
double scripted_estimate(double m1, double m2, double m3, double m4) {
    double c1 = m1;
    double c2 = m2 - c1 * m1;
    double c3 = m3 - c1 * m2 - 2 * c2 * m1;
    double c4 = m4 - c1 * m3 - 3 * c2 * m2 - 3 * c3 * m1;
    double disc = 3 * c3 * c3 - 2 * c2 * c4;
    double den = c3 * c3 - c2 * c4;
    double root = disc >= 0 ? std::sqrt(disc) : 0.0;  // real part only
    return c1 - c2 * c2 / den * (root - c3);
}

}  // namespace

TEST_CASE("cumulant recursion") {
    SUBCASE("eigenstate moments have no higher cumulants") {
        Cumulants c = cumulants_of_powers(-1.3);
        CHECK(c.c1 == doctest::Approx(-1.3));
        CHECK(std::abs(c.c2) < 1e-12);
        CHECK(std::abs(c.c3) < 1e-12);
        CHECK(std::abs(c.c4) < 1e-12);
    }
    SUBCASE("shift covariance") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int rep = 0; rep < 10; ++rep) {
            // moments of a random 3-point distribution
            double p1 = 0.2 + 0.6 * std::abs(u(rng)), p2 = (1 - p1) * 0.5, p3 = 1 - p1 - p2;
            double x1 = u(rng), x2 = u(rng), x3 = u(rng);
            auto mom = [&](double s, int p) {
                return p1 * std::pow(x1 + s, p) + p2 * std::pow(x2 + s, p) +
                       p3 * std::pow(x3 + s, p);
            };
            const double s = 0.77;
            Cumulants c0 = cumulants(mom(0, 1), mom(0, 2), mom(0, 3), mom(0, 4));
            Cumulants cs = cumulants(mom(s, 1), mom(s, 2), mom(s, 3), mom(s, 4));
            CHECK(cs.c1 == doctest::Approx(c0.c1 + s).epsilon(1e-10));
            CHECK(cs.c2 == doctest::Approx(c0.c2).epsilon(1e-9));
            CHECK(cs.c3 == doctest::Approx(c0.c3).epsilon(1e-8));
            CHECK(cs.c4 == doctest::Approx(c0.c4).epsilon(1e-7));
        }
    }
    SUBCASE("matches central-moment identities on a 3-level distribution") {
        double p1 = 0.5, p2 = 0.3, p3 = 0.2;
        double x1 = -1.0, x2 = 0.4, x3 = 2.2;
        auto mom = [&](int p) {
            return p1 * std::pow(x1, p) + p2 * std::pow(x2, p) + p3 * std::pow(x3, p);
        };
        double m1 = mom(1);
        auto cmom = [&](int p) {
            return p1 * std::pow(x1 - m1, p) + p2 * std::pow(x2 - m1, p) +
                   p3 * std::pow(x3 - m1, p);
        };
        Cumulants c = cumulants(mom(1), mom(2), mom(3), mom(4));
        CHECK(c.c2 == doctest::Approx(cmom(2)).epsilon(1e-10));
        CHECK(c.c3 == doctest::Approx(cmom(3)).epsilon(1e-10));
        CHECK(c.c4 == doctest::Approx(cmom(4) - 3 * cmom(2) * cmom(2)).epsilon(1e-10));
    }
}

TEST_CASE("lanczos_energy branches") {
    SUBCASE("eigenstate returns c1 on the degenerate_c2 branch") {
        Cumulants c = cumulants_of_powers(0.42);
        LanczosEstimate est = lanczos_energy(c);
        CHECK(est.branch == Branch::degenerate_c2);
        CHECK(est.value == doctest::Approx(0.42));
    }
    SUBCASE("negative discriminant keeps only the real part") {
        Cumulants c{0.0, 1.0, -1.0, 2.0};
        LanczosEstimate est = lanczos_energy(c);
        CHECK(est.branch == Branch::negative_discriminant);
        CHECK(est.discriminant == doctest::Approx(-1.0));
        CHECK(est.denominator == doctest::Approx(-1.0));
        CHECK(est.value == doctest::Approx(1.0));
    }
    SUBCASE("degenerate denominator returns c1") {
        // c3^2 = c2*c4 exactly
        Cumulants c{0.3, 1.0, 1.0, 1.0};
        LanczosEstimate est = lanczos_energy(c);
        CHECK(est.branch == Branch::degenerate_denominator);
        CHECK(est.value == doctest::Approx(0.3));
    }
    SUBCASE("two-level system is resolved exactly") {
        // H = diag(0, 1), amplitudes (sqrt(0.9), sqrt(0.1)): m_p = 0.1
        Cumulants c = cumulants(0.1, 0.1, 0.1, 0.1);
        LanczosEstimate est = lanczos_energy(c);
        CHECK(est.branch == Branch::regular);
        CHECK(est.value == doctest::Approx(scripted_estimate(0.1, 0.1, 0.1, 0.1)).epsilon(1e-12));
        CHECK(est.value < 0.1);  // below m1: correction is downward
        CHECK(est.value == doctest::Approx(0.0).epsilon(1e-10));  // exact ground state
    }
    SUBCASE("non-finite input rejected") {
        Cumulants c{0.0, std::nan(""), 0.0, 0.0};
        CHECK_THROWS(lanczos_energy(c));
    }
}

TEST_CASE("shift and scale covariance of the estimate") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        // moments of a random 4-point distribution (not an eigenstate)
        double w[4], x[4], tot = 0.0;
        for (int i = 0; i < 4; ++i) {
            w[i] = 0.1 + std::abs(u(rng));
            x[i] = 2.0 * u(rng);
            tot += w[i];
        }
        for (double& wi : w) wi /= tot;
        auto mom = [&](double shift, double scale, int p) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i) s += w[i] * std::pow(scale * x[i] + shift, p);
            return s;
        };
        LanczosEstimate base =
            lanczos_energy(cumulants(mom(0, 1, 1), mom(0, 1, 2), mom(0, 1, 3), mom(0, 1, 4)));
        const double s = 1.7;
        LanczosEstimate shifted =
            lanczos_energy(cumulants(mom(s, 1, 1), mom(s, 1, 2), mom(s, 1, 3), mom(s, 1, 4)));
        CHECK(shifted.value == doctest::Approx(base.value + s).epsilon(1e-8));
        const double a = 2.3;
        LanczosEstimate scaled =
            lanczos_energy(cumulants(mom(0, a, 1), mom(0, a, 2), mom(0, a, 3), mom(0, a, 4)));
        CHECK(scaled.value == doctest::Approx(a * base.value).epsilon(1e-8));
    }
}

TEST_CASE("moments correction improves on the HF energy for every fixture") {
    for (const std::string name : {"h2_sto3g", "hehp_sto3g", "h4_chain"}) {
        MolecularIntegrals mi = parse_fcidump_file("fixtures/" + name + ".fcidump");
        PauliSum h = jordan_wigner(build_hamiltonian(mi));
        std::vector<int> occ;
        for (int i = 0; i < mi.n_elec; ++i) occ.push_back(i);
        StateVector hf = hf_state(h.n_qubits(), occ);
        PauliSum zero(h.n_qubits());
        CoefficientTable t = krylov_coefficient_table(h, zero, hf);
        LanczosEstimate est = lanczos_energy(cumulants(assemble_moments(t, 0.0)));
        double e_fci = fci_solve(h, mi.n_elec, mi.ms2).energy;
        double e_hf = t.at(1, 0);
        CHECK(std::abs(est.value - e_fci) < std::abs(e_hf - e_fci));
    }
}
