#include "doctest.h"

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "qcm/integrals.hpp"
#include "qcm/selfcheck.hpp"

using namespace qcm;

namespace {

// reference values emitted by the fixture generator
std::map<std::string, double> load_references() {
    std::ifstream in("fixtures/references.txt");
    REQUIRE(in.good());
    std::map<std::string, double> refs;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        std::string fix, key;
        double val;
        ls >> fix >> key >> val;
        refs[fix + "/" + key] = val;
    }
    return refs;
}

std::vector<int> lowest_orbitals(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

}  // namespace

TEST_CASE("single-entry fcidump") {
    std::istringstream in(
        "&FCI NORB=1,NELEC=2,MS2=0,\n&END\n"
        "0.5 1 1 1 1\n"
        "-1.0 1 1 0 0\n"
        "0.7 0 0 0 0\n");
    MolecularIntegrals mi = parse_fcidump(in);
    CHECK(mi.n_orb == 1);
    CHECK(mi.n_elec == 2);
    CHECK(mi.g_at(0, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mi.h_at(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(mi.e_core == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("slash header terminator also accepted") {
    std::istringstream in("&FCI NORB=1,NELEC=0,MS2=0 /\n0.7 0 0 0 0\n");
    MolecularIntegrals mi = parse_fcidump(in);
    CHECK(mi.e_core == doctest::Approx(0.7));
}

TEST_CASE("permutational symmetry populated from one entry") {
    std::istringstream in(
        "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n"
        "0.25 1 2 1 1\n");
    MolecularIntegrals mi = parse_fcidump(in);
    CHECK(mi.g_at(0, 1, 0, 0) == doctest::Approx(0.25));
    CHECK(mi.g_at(1, 0, 0, 0) == doctest::Approx(0.25));
    CHECK(mi.g_at(0, 0, 0, 1) == doctest::Approx(0.25));
    CHECK(mi.g_at(0, 0, 1, 0) == doctest::Approx(0.25));
}

TEST_CASE("parse errors carry line numbers") {
    SUBCASE("malformed header") {
        std::istringstream in("NORB=2\n");
        CHECK_THROWS_AS(parse_fcidump(in), ParseError);
    }
    SUBCASE("missing required key") {
        std::istringstream in("&FCI NORB=2,MS2=0,\n&END\n");
        CHECK_THROWS_AS(parse_fcidump(in), ParseError);
    }
    SUBCASE("index out of range") {
        std::istringstream in("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 3 1 1 1\n");
        CHECK_THROWS_WITH_AS(parse_fcidump(in), doctest::Contains("line 3"), ParseError);
    }
    SUBCASE("inconsistent duplicate") {
        std::istringstream in(
            "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n"
            "0.5 1 2 1 1\n"
            "0.6 2 1 1 1\n");
        CHECK_THROWS_AS(parse_fcidump(in), ParseError);
    }
    SUBCASE("consistent duplicate is fine") {
        std::istringstream in(
            "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n"
            "0.5 1 2 1 1\n"
            "0.5 2 1 1 1\n");
        CHECK_NOTHROW(parse_fcidump(in));
    }
}

TEST_CASE("dipole file parsing") {
    SUBCASE("symmetric fill") {
        std::istringstream in("&DIP NORB=2,AXIS=X,\n&END\n0.3 1 2 0 0\n");
        DipoleIntegrals di = parse_dipole_file(in);
        CHECK(di.f_at(0, 1) == doctest::Approx(0.3));
        CHECK(di.f_at(1, 0) == doctest::Approx(0.3));
    }
    SUBCASE("constant-only operator") {
        std::istringstream in("&DIP NORB=2,AXIS=Z,\n&END\n1.5 0 0 0 0\n");
        DipoleIntegrals di = parse_dipole_file(in);
        CHECK(di.d_core == doctest::Approx(1.5));
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) CHECK(di.f_at(p, q) == 0.0);
    }
    SUBCASE("two-body index rejected") {
        std::istringstream in("&DIP NORB=2,AXIS=X,\n&END\n0.3 1 2 1 0\n");
        CHECK_THROWS_AS(parse_dipole_file(in), ParseError);
    }
    SUBCASE("missing AXIS rejected") {
        std::istringstream in("&DIP NORB=2,\n&END\n0.3 1 2 0 0\n");
        CHECK_THROWS_AS(parse_dipole_file(in), ParseError);
    }
}

TEST_CASE("h2 fixture reproduces the generating package's HF energy") {
    auto refs = load_references();
    MolecularIntegrals mi = parse_fcidump_file("fixtures/h2_sto3g.fcidump");
    double e_hf = determinant_energy(mi, {0});
    CHECK(e_hf == doctest::Approx(refs.at("h2_sto3g/e_hf")).epsilon(1e-8));
}

TEST_CASE("dipole fixtures reproduce the generating package's HF dipole") {
    auto refs = load_references();
    for (const std::string name : {"hehp_sto3g", "h4_chain"}) {
        MolecularIntegrals mi = parse_fcidump_file("fixtures/" + name + ".fcidump");
        DipoleIntegrals di = parse_dipole_path("fixtures/" + name + ".dip");
        double mu_hf = determinant_dipole(di, lowest_orbitals(mi.n_elec / 2));
        CHECK(mu_hf == doctest::Approx(refs.at(name + "/mu_hf")).epsilon(1e-8));
    }
}

TEST_CASE("serialize/parse round trip") {
    MolecularIntegrals mi = parse_fcidump_file("fixtures/h4_chain.fcidump");
    std::istringstream in(serialize_fcidump(mi));
    MolecularIntegrals mi2 = parse_fcidump(in);
    REQUIRE(mi2.n_orb == mi.n_orb);
    double maxdiff = 0.0;
    for (size_t i = 0; i < mi.g.size(); ++i) maxdiff = std::max(maxdiff, std::abs(mi.g[i] - mi2.g[i]));
    for (size_t i = 0; i < mi.h.size(); ++i) maxdiff = std::max(maxdiff, std::abs(mi.h[i] - mi2.h[i]));
    maxdiff = std::max(maxdiff, std::abs(mi.e_core - mi2.e_core));
    CHECK(maxdiff < 1e-12);

    DipoleIntegrals di = parse_dipole_path("fixtures/h4_chain.dip");
    std::istringstream din(serialize_dipole(di));
    DipoleIntegrals di2 = parse_dipole_file(din);
    double fdiff = std::abs(di.d_core - di2.d_core);
    for (size_t i = 0; i < di.f.size(); ++i) fdiff = std::max(fdiff, std::abs(di.f[i] - di2.f[i]));
    CHECK(fdiff < 1e-12);
}

TEST_CASE("permutational closure of parsed g") {
    MolecularIntegrals mi = parse_fcidump_file("fixtures/h2_sto3g.fcidump");
    const int n = mi.n_orb;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < n; ++s) {
                    double v = mi.g_at(p, q, r, s);
                    CHECK(mi.g_at(q, p, r, s) == v);
                    CHECK(mi.g_at(p, q, s, r) == v);
                    CHECK(mi.g_at(r, s, p, q) == v);
                    CHECK(mi.g_at(s, r, q, p) == v);
                }
}

TEST_CASE("freeze_core_integrals") {
    SUBCASE("empty frozen list is the identity") {
        MolecularIntegrals mi = parse_fcidump_file("fixtures/h4_chain.fcidump");
        MolecularIntegrals out = freeze_core_integrals(mi, {});
        CHECK(out.n_orb == mi.n_orb);
        CHECK(out.n_elec == mi.n_elec);
        CHECK(out.e_core == doctest::Approx(mi.e_core).epsilon(1e-15));
        CHECK(out.h == mi.h);
        CHECK(out.g == mi.g);
    }
    SUBCASE("freezing occupied orbitals preserves the determinant energy") {
        for (const std::string name : {"h2_sto3g", "hehp_sto3g", "h4_chain", "toy4"}) {
            MolecularIntegrals mi = parse_fcidump_file("fixtures/" + name + ".fcidump");
            double full = determinant_energy(mi, lowest_orbitals(mi.n_elec / 2));
            MolecularIntegrals red = freeze_core_integrals(mi, {0});
            double reduced = determinant_energy(red, lowest_orbitals(red.n_elec / 2));
            CHECK(full == doctest::Approx(reduced).epsilon(1e-10));
        }
    }
    SUBCASE("frozen index out of range") {
        MolecularIntegrals mi = parse_fcidump_file("fixtures/toy4.fcidump");
        CHECK_THROWS(freeze_core_integrals(mi, {5}));
        CHECK_THROWS(freeze_core_integrals(mi, {0, 0}));
    }
}

TEST_CASE("random 3-orbital frozen-core cross-check against dense matrix elements") {
    // dense oracle: expectation of the full-space H in a determinant with
    // orbital 0 doubly occupied equals the reduced-space expectation
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    MolecularIntegrals mi;
    mi.n_orb = 3;
    mi.n_elec = 4;
    mi.h.assign(9, 0.0);
    mi.g.assign(81, 0.0);
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q <= p; ++q) {
            double v = u(rng);
            mi.h_at(p, q) = mi.h_at(q, p) = v;
        }
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) {
                    double v = u(rng);
                    mi.g_at(p, q, r, s) = v;
                    mi.g_at(q, p, r, s) = v;
                    mi.g_at(p, q, s, r) = v;
                    mi.g_at(q, p, s, r) = v;
                    mi.g_at(r, s, p, q) = v;
                    mi.g_at(s, r, p, q) = v;
                    mi.g_at(r, s, q, p) = v;
                    mi.g_at(s, r, q, p) = v;
                }
    mi.e_core = u(rng);

    FermionOperator h_full = build_hamiltonian(mi);
    Eigen::MatrixXcd m = check::dense_fermion(h_full);
    // determinant with orbital 0 (modes 0,1) and orbital 1 (modes 2,3) occupied
    size_t det = 0b1111;
    double dense_val = m(det, det).real();

    MolecularIntegrals red = freeze_core_integrals(mi, {0});
    double reduced_val = determinant_energy(red, {0});
    CHECK(dense_val == doctest::Approx(reduced_val).epsilon(1e-10));
}
