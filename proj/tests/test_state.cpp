#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "qcm/ansatz.hpp"
#include "qcm/fci.hpp"
#include "qcm/integrals.hpp"
#include "qcm/selfcheck.hpp"
#include "qcm/state.hpp"

using namespace qcm;

namespace {

struct Fixture {
    MolecularIntegrals mi;
    DipoleIntegrals di;
    PauliSum h, mu;
    std::vector<int> occ_modes;
};

Fixture load(const std::string& name) {
    Fixture f;
    f.mi = parse_fcidump_file("fixtures/" + name + ".fcidump");
    f.di = parse_dipole_path("fixtures/" + name + ".dip");
    f.h = jordan_wigner(build_hamiltonian(f.mi));
    f.mu = jordan_wigner(build_dipole(f.di));
    for (int i = 0; i < f.mi.n_elec; ++i) f.occ_modes.push_back(i);
    return f;
}

double load_ref(const std::string& fixture, const std::string& key) {
    std::ifstream in("fixtures/references.txt");
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string fx, k;
        double v;
        if (ls >> fx >> k >> v)
            if (fx == fixture && k == key) return v;
    }
    FAIL("missing reference ", fixture, "/", key);
    return 0.0;
}

}  // namespace

TEST_CASE("hf_state conventions") {
    StateVector v = hf_state(4, {0, 1});
    CHECK(v.amps[0b0011] == cplx(1.0));
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK(v.ket_string(0b0011) == "1100");  // mode 0 leftmost
    StateVector empty = hf_state(3, {});
    CHECK(empty.amps[0] == cplx(1.0));
    CHECK_THROWS(hf_state(2, {5}));
}

TEST_CASE("hf expectation equals the closed-form RHF energy") {
    for (const std::string name : {"h2_sto3g", "hehp_sto3g", "h4_chain"}) {
        Fixture f = load(name);
        StateVector hf = hf_state(f.h.n_qubits(), f.occ_modes);
        double e = expectation(f.h, hf).real();
        std::vector<int> occ_orb;
        for (int i = 0; i < f.mi.n_elec / 2; ++i) occ_orb.push_back(i);
        CHECK(e == doctest::Approx(determinant_energy(f.mi, occ_orb)).epsilon(1e-10));
    }
}

TEST_CASE("uccd_state") {
    SUBCASE("zero angles reproduce the reference") {
        AnsatzSpec spec;
        spec.occupied = {0, 1};
        spec.excitations = {{0, 1, 2, 3}};
        spec.thetas = {0.0};
        StateVector v = uccd_state(spec, 4);
        CHECK(std::abs(v.amps[0b0011] - cplx(1.0)) < 1e-14);
    }
    SUBCASE("theta = pi/2 transfers all amplitude") {
        AnsatzSpec spec;
        spec.occupied = {0, 1};
        spec.excitations = {{0, 1, 2, 3}};
        spec.thetas = {M_PI / 2};
        StateVector v = uccd_state(spec, 4);
        CHECK(std::abs(v.amps[0b0011]) < 1e-14);
        CHECK(std::abs(std::abs(v.amps[0b1100]) - 1.0) < 1e-14);
    }
    SUBCASE("norm and particle number preserved on random specs") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.5, 1.5);
        AnsatzSpec spec;
        spec.occupied = {0, 1, 2, 3};
        spec.excitations = {{0, 1, 4, 5}, {2, 3, 6, 7}, {0, 3, 5, 6}};
        for (size_t i = 0; i < spec.excitations.size(); ++i) spec.thetas.push_back(u(rng));
        StateVector v = uccd_state(spec, 8);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        PauliSum num = jordan_wigner(number_operator(8));
        CHECK(expectation(num, v).real() == doctest::Approx(4.0).epsilon(1e-10));
    }
    SUBCASE("spec validation") {
        AnsatzSpec bad;
        bad.occupied = {0, 1};
        bad.excitations = {{0, 2, 1, 3}};  // source 2 not occupied
        bad.thetas = {0.1};
        CHECK_THROWS(uccd_state(bad, 4));
    }
    SUBCASE("serialize round trip") {
        AnsatzSpec spec;
        spec.occupied = {0, 1};
        spec.excitations = {{0, 1, 2, 3}};
        spec.thetas = {0.123456789012345};
        AnsatzSpec back = AnsatzSpec::deserialize(spec.serialize());
        CHECK(back.occupied == spec.occupied);
        CHECK(back.excitations == spec.excitations);
        CHECK(back.thetas[0] == spec.thetas[0]);
    }
}

TEST_CASE("fci_solve") {
    SUBCASE("diagonal hamiltonian fills the two lowest levels") {
        FermionOperator h(4);
        std::vector<double> eps{0.1, 0.4, 0.9, 1.7};
        for (int m = 0; m < 4; ++m) {
            FermTerm t;
            t.cre = t.ann = uint64_t(1) << m;
            h.add(t, eps[m]);
        }
        // modes 0,2 = alpha; 1,3 = beta; 2 electrons with ms2 = 0
        FciResult res = fci_solve(jordan_wigner(h), 2, 0);
        CHECK(res.energy == doctest::Approx(0.1 + 0.4).epsilon(1e-12));
    }
    SUBCASE("h2 matches the generating package's FCI energy") {
        Fixture f = load("h2_sto3g");
        FciResult res = fci_solve(f.h, f.mi.n_elec, f.mi.ms2);
        CHECK(res.energy == doctest::Approx(load_ref("h2_sto3g", "e_fci")).epsilon(1e-8));
        CHECK(res.energy < expectation(f.h, hf_state(4, {0, 1})).real());
        CHECK(eigen_residual(f.h, res.energy, res.state) < 1e-8);
    }
    SUBCASE("h4 and hehp match the generating package") {
        for (const std::string name : {"hehp_sto3g", "h4_chain"}) {
            Fixture f = load(name);
            FciResult res = fci_solve(f.h, f.mi.n_elec, f.mi.ms2);
            CHECK(res.energy == doctest::Approx(load_ref(name, "e_fci")).epsilon(1e-8));
            double mu = expectation(f.mu, res.state).real();
            CHECK(mu == doctest::Approx(load_ref(name, "mu_fci")).epsilon(1e-7));
        }
    }
    SUBCASE("iterative path agrees with dense") {
        Fixture f = load("h4_chain");
        FciOptions opt;
        opt.force_iterative = true;
        FciResult it = fci_solve(f.h, f.mi.n_elec, f.mi.ms2, opt);
        FciResult dn = fci_solve(f.h, f.mi.n_elec, f.mi.ms2);
        CHECK(it.energy == doctest::Approx(dn.energy).epsilon(1e-9));
        CHECK(eigen_residual(f.h, it.energy, it.state) < 1e-7);
    }
    SUBCASE("empty sector rejected") {
        Fixture f = load("toy4");
        CHECK_THROWS(fci_solve(f.h, 9, 0));
    }
    SUBCASE("non-Hermitian input rejected") {
        PauliSum bad(2);
        bad.add(PauliWord{1, 0}, cplx(0.0, 1.0));
        CHECK_THROWS(fci_solve(bad, 1, 1));
    }
}

TEST_CASE("E_lambda from fci_solve is concave in lambda") {
    for (const std::string name : {"hehp_sto3g", "toy4"}) {
        Fixture f = load(name);
        const double h_step = 0.05;
        for (double lam : {-0.2, 0.0, 0.3}) {
            auto e_at = [&](double l) {
                PauliSum hl = f.h.plus(f.mu.scaled(l));
                return fci_solve(hl, f.mi.n_elec, f.mi.ms2).energy;
            };
            double second = (e_at(lam + h_step) - 2 * e_at(lam) + e_at(lam - h_step)) /
                            (h_step * h_step);
            CHECK(second <= 1e-10);
        }
    }
}

TEST_CASE("vqe_optimize") {
    SUBCASE("diagonal hamiltonian keeps theta at zero") {
        FermionOperator h(4);
        std::vector<double> eps{-1.0, -1.0, 0.5, 0.5};
        for (int m = 0; m < 4; ++m) {
            FermTerm t;
            t.cre = t.ann = uint64_t(1) << m;
            h.add(t, eps[m]);
        }
        AnsatzSpec spec;
        spec.occupied = {0, 1};
        spec.excitations = {{0, 1, 2, 3}};
        spec.thetas = {0.0};
        VqeResult res = vqe_optimize(spec, jordan_wigner(h), {.n_starts = 1});
        CHECK(std::abs(res.spec.thetas[0]) < 1e-6);
        CHECK(res.energy == doctest::Approx(-2.0).epsilon(1e-10));
    }
    SUBCASE("h2 single double excitation reaches FCI") {
        Fixture f = load("h2_sto3g");
        AnsatzSpec spec;
        spec.occupied = {0, 1};
        spec.excitations = {{0, 1, 2, 3}};
        spec.thetas = {0.0};
        VqeResult res = vqe_optimize(spec, f.h, {.seed = 3});
        CHECK(res.energy == doctest::Approx(load_ref("h2_sto3g", "e_fci")).epsilon(1e-8));
        CHECK(res.gradient_norm < 1e-6);
        // restarting from the optimum moves nothing
        VqeResult res2 = vqe_optimize(res.spec, f.h, {.seed = 3, .n_starts = 1});
        CHECK(std::abs(res2.energy - res.energy) < 1e-10);
    }
    SUBCASE("multi-excitation gradient is consistent (h4, all doubles)") {
        MolecularIntegrals mi = parse_fcidump_file("fixtures/h4_chain.fcidump");
        PauliSum h = jordan_wigner(build_hamiltonian(mi));
        AnsatzSpec spec;
        spec.occupied = {0, 1, 2, 3};
        std::vector<bool> occ(8, false);
        for (int m : spec.occupied) occ[m] = true;
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j)
                for (int a = 0; a < 8; ++a)
                    for (int b = a + 1; b < 8; ++b) {
                        if (!occ[i] || !occ[j] || occ[a] || occ[b]) continue;
                        if ((i % 2) + (j % 2) != (a % 2) + (b % 2)) continue;
                        spec.excitations.push_back({i, j, a, b});
                    }
        spec.thetas.assign(spec.excitations.size(), 0.0);
        VqeResult res = vqe_optimize(spec, h, {.seed = 2, .n_starts = 1});
        CHECK(res.gradient_norm < 1e-6);
        double e_fci = load_ref("h4_chain", "e_fci");
        CHECK(res.energy > e_fci - 1e-10);   // variational
        CHECK(res.energy - e_fci < 5e-4);    // all-doubles UCCD is nearly exact here
    }
    SUBCASE("non-convergence carries best-so-far") {
        Fixture f = load("h2_sto3g");
        AnsatzSpec spec;
        spec.occupied = {0, 1};
        spec.excitations = {{0, 1, 2, 3}};
        spec.thetas = {0.0};
        VqeOptions opt;
        opt.max_iterations = 1;
        opt.gradient_tol = 1e-14;
        try {
            vqe_optimize(spec, f.h, opt);
            FAIL("expected VqeError");
        } catch (const VqeError& e) {
            CHECK(e.best().spec.thetas.size() == 1);
        }
    }
}

TEST_CASE("parameter sensitivity scaling at a VQE optimum") {
    // energy error is quadratic in the parameter step, dipole error linear
    Fixture f = load("hehp_sto3g");
    AnsatzSpec spec;
    spec.occupied = {0, 1};
    spec.excitations = {{0, 1, 2, 3}};
    spec.thetas = {0.0};
    VqeResult res = vqe_optimize(spec, f.h, {.seed = 11});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<double> steps{1e-2, 1e-3, 1e-4};
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> dir(res.spec.thetas.size());
        double nrm = 0.0;
        for (double& d : dir) {
            d = u(rng);
            nrm += d * d;
        }
        for (double& d : dir) d /= std::sqrt(nrm);
        std::vector<double> de, dmu;
        StateVector base = uccd_state(res.spec, f.h.n_qubits());
        double e0 = expectation(f.h, base).real();
        double mu0 = expectation(f.mu, base).real();
        for (double s : steps) {
            AnsatzSpec pert = res.spec;
            for (size_t i = 0; i < dir.size(); ++i) pert.thetas[i] += s * dir[i];
            StateVector v = uccd_state(pert, f.h.n_qubits());
            de.push_back(std::abs(expectation(f.h, v).real() - e0));
            dmu.push_back(std::abs(expectation(f.mu, v).real() - mu0));
        }
        auto slope = [&](const std::vector<double>& err) {
            // least-squares slope of log err vs log step
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (size_t i = 0; i < steps.size(); ++i) {
                double x = std::log(steps[i]), y = std::log(err[i]);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            double n = static_cast<double>(steps.size());
            return (n * sxy - sx * sy) / (n * sxx - sx * sx);
        };
        CHECK(slope(de) == doctest::Approx(2.0).epsilon(0.1));
        CHECK(slope(dmu) == doctest::Approx(1.0).epsilon(0.2));
    }
}

TEST_CASE("off-diagonal one-body expectations vanish for HF and mixed states") {
    const int n = 4;
    StateVector hf = hf_state(n, {0, 1});
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            FermionOperator op(n);
            op.add(FermTerm{uint64_t(1) << j, uint64_t(1) << k}, 1.0);
            PauliSum ps = jordan_wigner(op);
            CHECK(std::abs(expectation(ps, hf)) < 1e-12);
            // maximally mixed expectation = identity component
            CHECK(std::abs(identity_component(ps)) < 1e-12);
        }
}
