#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qcm/fermion_op.hpp"
#include "qcm/pauli.hpp"
#include "qcm/state.hpp"

namespace qcm::check {

/// Dense matrix of a fermionic operator, built directly from the action of
/// creation/annihilation operators on occupation-number basis states
/// (sign = parity of occupied modes below the acted-on mode). Independent of
/// the Wick/Jordan-Wigner code paths.
Eigen::MatrixXcd dense_fermion(const FermionOperator& op);

/// Dense matrix of a Pauli sum, built from explicit 2x2 letter matrices via
/// Kronecker products (qubit 0 is the fastest-varying index).
Eigen::MatrixXcd dense_pauli(const PauliSum& ps);

Eigen::VectorXcd dense_state(const StateVector& v);

/// Projection of a full-space matrix onto the subspace with the frozen modes
/// pinned at the given occupations, expressed in the relabeled active basis.
Eigen::MatrixXcd project_frozen(const Eigen::MatrixXcd& m, int n_modes,
                                const std::map<int, int>& frozen);

/// Random normal-ordered Hermitian operator with terms of at most two
/// creations/annihilations (plus a constant); seeded and deterministic.
FermionOperator random_two_body(int n_modes, uint64_t seed, bool hermitian = true);

/// Exact minimum number of qubit-wise-commuting groups by exhaustive search
/// (exponential; only for small word lists).
int min_group_count(const std::vector<PauliWord>& words);

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

/// Oracle-equivalence suites on tiny random instances (fermion algebra,
/// encoding, freezing, moment assembly). Used by the validate command.
std::vector<CheckResult> run_validation_suite(uint64_t seed);

}  // namespace qcm::check
