#pragma once

#include <utility>
#include <vector>

#include "qcm/state.hpp"

namespace qcm {

struct FciOptions {
    double tol = 1e-10;
    // sector dimension above which the iterative (Lanczos) path is used
    size_t dense_max_dim = 4096;
    bool force_iterative = false;
};

struct FciResult {
    double energy = 0.0;
    StateVector state;  // full 2^n vector, sector amplitudes only
};

/// Lowest eigenpair of a Hermitian Pauli sum restricted to the sector with
/// n_elec particles and n_alpha - n_beta = ms2 (alpha modes are the even
/// qubits). The eigenvector phase is fixed so its largest-magnitude amplitude
/// is real positive.
FciResult fci_solve(const PauliSum& op, int n_elec, int ms2, const FciOptions& opt = {});

/// ||(H - E)|state>||, the eigenpair residual.
double eigen_residual(const PauliSum& op, double energy, const StateVector& state);

/// Basis indices of the (n_elec, ms2) sector.
std::vector<size_t> sector_basis(int n_qubits, int n_elec, int ms2);

}  // namespace qcm
