#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qcm/state.hpp"

namespace qcm {

/// Variational trial-state description: a reference determinant and an
/// ordered list of double excitations (i,j) -> (a,b) over spin-orbital modes.
/// The application order of the exponentials is the list order.
struct AnsatzSpec {
    std::vector<int> occupied;                  // reference determinant modes
    std::vector<std::array<int, 4>> excitations;  // {i, j, a, b}
    std::vector<double> thetas;                 // one angle per excitation

    void validate(int n_modes) const;

    /// Plain-text key=value section, bit-reproducible round trip.
    std::string serialize() const;
    static AnsatzSpec deserialize(const std::string& text);
};

/// Applies exp(theta_t (a+_a a+_b a_j a_i - h.c.)) for each excitation in
/// order, starting from the reference determinant. Each exponential acts as an
/// exact rotation of the two-determinant subspaces it couples.
StateVector uccd_state(const AnsatzSpec& spec, int n_qubits);

struct VqeOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-6;
    uint64_t seed = 0;
    int n_starts = 3;
};

struct VqeResult {
    AnsatzSpec spec;
    double energy = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
};

class VqeError : public std::runtime_error {
  public:
    VqeError(const std::string& what, VqeResult best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const VqeResult& best() const { return best_; }

  private:
    VqeResult best_;
};

/// BFGS on the exact (adjoint-mode) gradient, multi-start with seeded random
/// initial angles. Deterministic for a fixed seed and initial spec. Throws
/// VqeError carrying the best point if no start meets gradient_tol.
VqeResult vqe_optimize(const AnsatzSpec& spec, const PauliSum& h, const VqeOptions& opt = {});

}  // namespace qcm
