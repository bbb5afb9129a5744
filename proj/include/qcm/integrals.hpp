#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcm/util.hpp"

namespace qcm {

/// Spatial-orbital one- and two-electron integrals plus the scalar core term.
/// Two-electron integrals are kept in chemists' (pq|rs) convention, exactly as
/// they appear in FCIDUMP files.
struct MolecularIntegrals {
    int n_orb = 0;
    int n_elec = 0;
    int ms2 = 0;
    double e_core = 0.0;
    std::vector<double> h;       // n_orb x n_orb, row major
    std::vector<double> g;       // n_orb^4, index ((p*n+q)*n+r)*n+s = (pq|rs)
    std::vector<int> orbsym;     // optional irrep labels, empty if absent

    double& h_at(int p, int q) { return h[p * n_orb + q]; }
    double h_at(int p, int q) const { return h[p * n_orb + q]; }
    double& g_at(int p, int q, int r, int s) {
        return g[((static_cast<size_t>(p) * n_orb + q) * n_orb + r) * n_orb + s];
    }
    double g_at(int p, int q, int r, int s) const {
        return g[((static_cast<size_t>(p) * n_orb + q) * n_orb + r) * n_orb + s];
    }
};

/// One-body dipole integrals for a single Cartesian axis, plus the nuclear
/// contribution d_core.
struct DipoleIntegrals {
    char axis = 'x';             // one of x, y, z
    int n_orb = 0;
    double d_core = 0.0;
    std::vector<double> f;       // n_orb x n_orb symmetric

    double& f_at(int p, int q) { return f[p * n_orb + q]; }
    double f_at(int p, int q) const { return f[p * n_orb + q]; }
};

MolecularIntegrals parse_fcidump(std::istream& in);
MolecularIntegrals parse_fcidump_file(const std::string& path);
DipoleIntegrals parse_dipole_file(std::istream& in);
DipoleIntegrals parse_dipole_path(const std::string& path);

std::string serialize_fcidump(const MolecularIntegrals& mi);
std::string serialize_dipole(const DipoleIntegrals& di);

/// Folds a list of doubly-occupied spatial orbitals into the core energy and
/// effective one-body integrals, returning integrals over the remaining
/// (active) orbitals. n_elec drops by two per frozen orbital.
MolecularIntegrals freeze_core_integrals(const MolecularIntegrals& mi,
                                         const std::vector<int>& frozen);

DipoleIntegrals freeze_core_dipole(const DipoleIntegrals& di,
                                   const std::vector<int>& frozen);

/// Closed-shell determinant energy with the given doubly occupied orbitals.
double determinant_energy(const MolecularIntegrals& mi, const std::vector<int>& occ);

/// Closed-shell determinant dipole expectation (includes d_core).
double determinant_dipole(const DipoleIntegrals& di, const std::vector<int>& occ);

}  // namespace qcm
