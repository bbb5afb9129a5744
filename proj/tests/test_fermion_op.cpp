#include "doctest.h"

#include <map>
#include <random>

#include "qcm/fermion_op.hpp"
#include "qcm/integrals.hpp"
#include "qcm/selfcheck.hpp"

using namespace qcm;
using check::dense_fermion;
using check::random_two_body;

namespace {

FermTerm term(uint64_t cre, uint64_t ann) { return FermTerm{cre, ann}; }

double dense_diff(const FermionOperator& a, const Eigen::MatrixXcd& m) {
    return (dense_fermion(a) - m).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("canonical anticommutation: a1 a1+ = 1 - a1+ a1") {
    FermionOperator a(2), adag(2);
    a.add(term(0, 0b10), 1.0);
    adag.add(term(0b10, 0), 1.0);
    FermionOperator prod = wick_multiply(a, adag);
    CHECK(prod.constant() == cplx(1.0));
    CHECK(prod.coefficient(term(0b10, 0b10)) == cplx(-1.0));
    CHECK(prod.n_terms() == 2);
}

TEST_CASE("number operator idempotence") {
    FermionOperator n0(1);
    n0.add(term(1, 1), 1.0);
    FermionOperator prod = wick_multiply(n0, n0);
    CHECK(prod.n_terms() == 1);
    CHECK(prod.coefficient(term(1, 1)) == cplx(1.0));
}

TEST_CASE("wick product matches dense matrices on random 4-mode operators") {
    for (int rep = 0; rep < 6; ++rep) {
        FermionOperator a = random_two_body(4, 100 + rep);
        FermionOperator b = random_two_body(4, 200 + rep);
        Eigen::MatrixXcd ma = dense_fermion(a), mb = dense_fermion(b);
        CHECK(dense_diff(wick_multiply(a, b), ma * mb) < 1e-10);
    }
}

TEST_CASE("associativity at desk scale") {
    for (int rep = 0; rep < 3; ++rep) {
        FermionOperator a = random_two_body(4, 300 + rep);
        FermionOperator b = random_two_body(4, 400 + rep);
        FermionOperator c = random_two_body(4, 500 + rep);
        FermionOperator left = wick_multiply(wick_multiply(a, b), c);
        FermionOperator right = wick_multiply(a, wick_multiply(b, c));
        CHECK((dense_fermion(left) - dense_fermion(right)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("hermiticity closure of a a+") {
    for (int rep = 0; rep < 3; ++rep) {
        FermionOperator a = random_two_body(4, 600 + rep, /*hermitian=*/false);
        FermionOperator prod = wick_multiply(a, a.adjoint());
        CHECK(prod.max_coeff_diff(prod.adjoint()) < 1e-12);
    }
}

TEST_CASE("truncation soundness on particle-number sectors") {
    // expectation on any N-particle state is unchanged when output terms with
    // more than N annihilators are dropped
    const int n_modes = 4, n_elec = 2;
    for (int rep = 0; rep < 4; ++rep) {
        FermionOperator a = random_two_body(n_modes, 700 + rep);
        FermionOperator b = random_two_body(n_modes, 800 + rep);
        FermionOperator full = wick_multiply(a, b);
        FermionOperator trunc = wick_multiply(a, b, n_elec);
        Eigen::MatrixXcd mf = dense_fermion(full), mt = dense_fermion(trunc);
        std::mt19937_64 rng(900 + rep);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
        for (int i = 0; i < 16; ++i)
            if (popcount64(i) == n_elec) psi[i] = cplx(u(rng), u(rng));
        psi.normalize();
        cplx ef = psi.dot(mf * psi), et = psi.dot(mt * psi);
        CHECK(std::abs(ef - et) < 1e-10);
    }
}

TEST_CASE("lambda_power") {
    SUBCASE("p=1 is [H, mu]") {
        FermionOperator h = random_two_body(4, 1000);
        FermionOperator mu = random_two_body(4, 1001);
        LambdaPolyOperator poly = lambda_power(h, mu, 1);
        CHECK(poly.degree == 1);
        CHECK(poly.coeffs[0].max_coeff_diff(h) < 1e-14);
        CHECK(poly.coeffs[1].max_coeff_diff(mu) < 1e-14);
    }
    SUBCASE("mu = 0 leaves only H^p") {
        FermionOperator h = random_two_body(4, 1002);
        FermionOperator zero(4);
        LambdaPolyOperator poly = lambda_power(h, zero, 3);
        FermionOperator h3 = wick_multiply(wick_multiply(h, h), h);
        CHECK(poly.coeffs[0].max_coeff_diff(h3) < 1e-10);
        for (int k = 1; k <= 3; ++k) CHECK(poly.coeffs[k].empty());
    }
    SUBCASE("p=2 matches dense (H+0.3 mu)^2") {
        FermionOperator h = random_two_body(4, 1003);
        FermionOperator mu = random_two_body(4, 1004);
        LambdaPolyOperator poly = lambda_power(h, mu, 2);
        const double lam = 0.3;
        Eigen::MatrixXcd hm = dense_fermion(h) + lam * dense_fermion(mu);
        Eigen::MatrixXcd sum = dense_fermion(poly.coeffs[0]) +
                               lam * dense_fermion(poly.coeffs[1]) +
                               lam * lam * dense_fermion(poly.coeffs[2]);
        CHECK((sum - hm * hm).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("C_{2,1} equals the anticommutator {H, mu}") {
        FermionOperator h = random_two_body(4, 1005);
        FermionOperator mu = random_two_body(4, 1006);
        LambdaPolyOperator poly = lambda_power(h, mu, 2);
        FermionOperator anti = wick_multiply(h, mu).plus(wick_multiply(mu, h));
        CHECK(poly.coeffs[1].max_coeff_diff(anti) < 1e-11);
    }
    SUBCASE("coefficients of Hermitian inputs are Hermitian") {
        FermionOperator h = random_two_body(4, 1007);
        FermionOperator mu = random_two_body(4, 1008);
        LambdaPolyOperator poly = lambda_power(h, mu, 4);
        for (const FermionOperator& c : poly.coeffs)
            CHECK(c.max_coeff_diff(c.adjoint()) < 1e-9);
    }
}

TEST_CASE("freeze_modes") {
    SUBCASE("occupied frozen number operator becomes the constant 1") {
        FermionOperator nf(3);
        nf.add(term(0b1, 0b1), 1.0);
        FermionOperator out = freeze_modes(nf, {{0, 1}});
        CHECK(out.n_modes() == 2);
        CHECK(out.constant() == cplx(1.0));
        CHECK(out.n_terms() == 1);
    }
    SUBCASE("unpaired frozen operator contracts to zero") {
        FermionOperator op(3);
        op.add(term(0b001, 0b010), 1.0);  // a+_0 a_1, freeze mode 0
        FermionOperator out = freeze_modes(op, {{0, 1}});
        CHECK(out.empty());
    }
    SUBCASE("matches the dense projection oracle") {
        for (int rep = 0; rep < 6; ++rep) {
            FermionOperator op = random_two_body(3, 1100 + rep);
            std::map<int, int> frozen{{0, rep % 2}};
            Eigen::MatrixXcd proj = check::project_frozen(dense_fermion(op), 3, frozen);
            CHECK(dense_diff(freeze_modes(op, frozen), proj) < 1e-10);
        }
        // multiple frozen modes, mixed occupations
        for (int rep = 0; rep < 6; ++rep) {
            FermionOperator op = random_two_body(5, 1200 + rep);
            std::map<int, int> frozen{{1, 1}, {3, rep % 2}};
            Eigen::MatrixXcd proj = check::project_frozen(dense_fermion(op), 5, frozen);
            CHECK(dense_diff(freeze_modes(op, frozen), proj) < 1e-10);
        }
    }
    SUBCASE("linear in the operator") {
        FermionOperator a = random_two_body(4, 1300);
        FermionOperator b = random_two_body(4, 1301);
        std::map<int, int> frozen{{2, 1}};
        FermionOperator lhs = freeze_modes(a.scaled(0.7).plus(b.scaled(-1.3)), frozen);
        FermionOperator rhs = freeze_modes(a, frozen).scaled(0.7).plus(
            freeze_modes(b, frozen).scaled(-1.3));
        CHECK(lhs.max_coeff_diff(rhs) < 1e-12);
    }
    SUBCASE("invalid mode rejected") {
        FermionOperator op(3);
        CHECK_THROWS(freeze_modes(op, {{7, 1}}));
    }
    SUBCASE("freezing H^2 differs from squaring frozen H") {
        MolecularIntegrals mi = parse_fcidump_file("fixtures/h4_chain.fcidump");
        FermionOperator h = build_hamiltonian(mi);
        std::map<int, int> frozen{{0, 1}, {1, 1}};
        FermionOperator h2 = wick_multiply(h, h);
        FermionOperator frozen_h2 = freeze_modes(h2, frozen);
        FermionOperator h_frozen = freeze_modes(h, frozen);
        FermionOperator h_frozen_sq = wick_multiply(h_frozen, h_frozen);
        CHECK(frozen_h2.max_coeff_diff(h_frozen_sq) > 1e-6);
    }
}

TEST_CASE("build_hamiltonian") {
    SUBCASE("one-body diagonal gives eps*(n_up + n_down)") {
        MolecularIntegrals mi;
        mi.n_orb = 1;
        mi.n_elec = 2;
        mi.h = {0.75};
        mi.g = {0.0};
        FermionOperator h = build_hamiltonian(mi);
        CHECK(h.n_terms() == 2);
        CHECK(h.coefficient(term(0b01, 0b01)) == cplx(0.75));
        CHECK(h.coefficient(term(0b10, 0b10)) == cplx(0.75));
    }
    SUBCASE("hermitian term by term") {
        MolecularIntegrals mi = parse_fcidump_file("fixtures/h2_sto3g.fcidump");
        FermionOperator h = build_hamiltonian(mi);
        CHECK(h.max_coeff_diff(h.adjoint()) < 1e-12);
    }
    SUBCASE("matches the determinant-pair dense oracle on 2 random orbitals") {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        MolecularIntegrals mi;
        mi.n_orb = 2;
        mi.n_elec = 2;
        mi.h.assign(4, 0.0);
        mi.g.assign(16, 0.0);
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q <= p; ++q) mi.h_at(p, q) = mi.h_at(q, p) = u(rng);
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                for (int r = 0; r < 2; ++r)
                    for (int s = 0; s < 2; ++s) {
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
        FermionOperator h = build_hamiltonian(mi);
        Eigen::MatrixXcd m = dense_fermion(h);

        // independent determinant-pair evaluation of <D'|H|D>
        auto slater = [&](uint64_t bra, uint64_t ket) {
            cplx val = 0.0;
            if (bra == ket) val += mi.e_core;
            // brute force over the second-quantized definition, mode picture
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    for (int s = 0; s < 2; ++s) {
                        uint64_t bits = ket;
                        int sign = 1;
                        int mq = 2 * q + s, mp = 2 * p + s;
                        if (!(bits >> mq & 1)) continue;
                        sign *= parity_sign(bits & bits_below(mq));
                        bits &= ~(uint64_t(1) << mq);
                        if (bits >> mp & 1) continue;
                        sign *= parity_sign(bits & bits_below(mp));
                        bits |= uint64_t(1) << mp;
                        if (bits == bra) val += mi.h_at(p, q) * double(sign);
                    }
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    for (int r = 0; r < 2; ++r)
                        for (int s = 0; s < 2; ++s)
                            for (int s1 = 0; s1 < 2; ++s1)
                                for (int s2 = 0; s2 < 2; ++s2) {
                                    uint64_t bits = ket;
                                    int sign = 1;
                                    int m1 = 2 * q + s1, m2 = 2 * s + s2;
                                    int m3 = 2 * r + s2, m4 = 2 * p + s1;
                                    auto ann = [&](int mo) {
                                        if (!(bits >> mo & 1)) return false;
                                        sign *= parity_sign(bits & bits_below(mo));
                                        bits &= ~(uint64_t(1) << mo);
                                        return true;
                                    };
                                    auto cre = [&](int mo) {
                                        if (bits >> mo & 1) return false;
                                        sign *= parity_sign(bits & bits_below(mo));
                                        bits |= uint64_t(1) << mo;
                                        return true;
                                    };
                                    if (!ann(m1)) continue;
                                    if (!ann(m2)) continue;
                                    if (!cre(m3)) continue;
                                    if (!cre(m4)) continue;
                                    if (bits == bra)
                                        val += 0.5 * mi.g_at(p, q, r, s) * double(sign);
                                }
            return val;
        };
        for (uint64_t bra = 0; bra < 16; ++bra)
            for (uint64_t ket = 0; ket < 16; ++ket)
                CHECK(std::abs(m(bra, ket) - slater(bra, ket)) < 1e-10);
    }
    SUBCASE("commutes with number and Sz operators") {
        MolecularIntegrals mi = parse_fcidump_file("fixtures/toy4.fcidump");
        FermionOperator h = build_hamiltonian(mi);
        Eigen::MatrixXcd hm = dense_fermion(h);
        FermionOperator num = number_operator(4);
        Eigen::MatrixXcd nm = dense_fermion(num);
        CHECK((hm * nm - nm * hm).cwiseAbs().maxCoeff() < 1e-10);
        FermionOperator sz(4);
        for (int m = 0; m < 4; ++m) {
            FermTerm t;
            t.cre = t.ann = uint64_t(1) << m;
            sz.add(t, (m % 2 == 0) ? 0.5 : -0.5);
        }
        Eigen::MatrixXcd szm = dense_fermion(sz);
        CHECK((hm * szm - szm * hm).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("build_dipole") {
    SUBCASE("identity f gives the total number operator") {
        DipoleIntegrals di;
        di.n_orb = 2;
        di.f = {1.0, 0.0, 0.0, 1.0};
        di.d_core = 0.0;
        FermionOperator mu = build_dipole(di);
        CHECK(mu.max_coeff_diff(number_operator(4)) < 1e-14);
    }
    SUBCASE("zero f gives the constant") {
        DipoleIntegrals di;
        di.n_orb = 2;
        di.f.assign(4, 0.0);
        di.d_core = -0.45;
        FermionOperator mu = build_dipole(di);
        CHECK(mu.n_terms() == 1);
        CHECK(mu.constant() == cplx(-0.45));
    }
    SUBCASE("random f matches the dense oracle") {
        std::mt19937_64 rng(88);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        DipoleIntegrals di;
        di.n_orb = 2;
        di.f.assign(4, 0.0);
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q <= p; ++q) di.f_at(p, q) = di.f_at(q, p) = u(rng);
        di.d_core = u(rng);
        FermionOperator mu = build_dipole(di);
        Eigen::MatrixXcd m = dense_fermion(mu);
        // independent: one-body matrix elements on determinants
        for (uint64_t ket = 0; ket < 16; ++ket) {
            double diag = di.d_core;
            for (int p = 0; p < 2; ++p)
                for (int s = 0; s < 2; ++s)
                    if (ket >> (2 * p + s) & 1) diag += di.f_at(p, p);
            CHECK(std::abs(m(ket, ket).real() - diag) < 1e-12);
        }
    }
}

TEST_CASE("operator dump round trip") {
    FermionOperator op = random_two_body(4, 4242);
    FermionOperator back = FermionOperator::parse_dump(op.dump(), 4);
    CHECK(op.max_coeff_diff(back) < 1e-12);
}
