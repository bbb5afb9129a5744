#!/usr/bin/env python3
"""Generate the bundled molecular fixtures (FCIDUMP + dipole integral files).

Self-contained STO-3G integral generator (McMurchie-Davidson scheme, s/p
shells), restricted Hartree-Fock, and a dense determinant-basis FCI used to
emit independent reference values alongside each fixture.

Usage:
    python3 scripts/make_fixtures.py [--outdir fixtures] [--water]

The water system is intentionally not bundled; pass --water to generate it
locally (needs a few seconds).
"""

import argparse
import itertools
import math
import os

import numpy as np
from scipy.linalg import eigh
from scipy.special import gammainc, gamma

ANGSTROM_TO_BOHR = 1.8897259886

# ---------------------------------------------------------------------------
# STO-3G basis data (exponents, contraction coefficients per shell).
STO3G = {
    "H": [("S", [3.42525091, 0.62391373, 0.16885540],
           [0.15432897, 0.53532814, 0.44463454])],
    "He": [("S", [6.36242139, 1.15892300, 0.31364979],
            [0.15432897, 0.53532814, 0.44463454])],
    "O": [
        ("S", [130.7093200, 23.8088610, 6.4436083],
         [0.15432897, 0.53532814, 0.44463454]),
        ("S", [5.0331513, 1.1695961, 0.3803890],
         [-0.09996723, 0.39951283, 0.70011547]),
        ("P", [5.0331513, 1.1695961, 0.3803890],
         [0.15591627, 0.60768372, 0.39195739]),
    ],
}

CHARGE = {"H": 1, "He": 2, "O": 8}


def boys(n, x):
    if x < 1e-12:
        return 1.0 / (2 * n + 1)
    return gammainc(n + 0.5, x) * gamma(n + 0.5) / (2 * x ** (n + 0.5))


def E_coef(i, j, t, Qx, a, b):
    """Hermite expansion coefficient for a Gaussian product."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * Qx * Qx)
    if j == 0:
        return (E_coef(i - 1, j, t - 1, Qx, a, b) / (2 * p)
                - q * Qx / a * E_coef(i - 1, j, t, Qx, a, b)
                + (t + 1) * E_coef(i - 1, j, t + 1, Qx, a, b))
    return (E_coef(i, j - 1, t - 1, Qx, a, b) / (2 * p)
            + q * Qx / b * E_coef(i, j - 1, t, Qx, a, b)
            + (t + 1) * E_coef(i, j - 1, t + 1, Qx, a, b))


def hermite_coulomb(t, u, v, n, p, PC):
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        return (-2 * p) ** n * boys(n, p * np.dot(PC, PC))
    if t > 0:
        return ((t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, PC)
                + PC[0] * hermite_coulomb(t - 1, u, v, n + 1, p, PC))
    if u > 0:
        return ((u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, PC)
                + PC[1] * hermite_coulomb(t, u - 1, v, n + 1, p, PC))
    return ((v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, PC)
            + PC[2] * hermite_coulomb(t, u, v - 1, n + 1, p, PC))


class Primitive:
    def __init__(self, alpha, lmn, center):
        self.alpha = alpha
        self.lmn = lmn
        self.center = np.asarray(center, dtype=float)
        l, m, n = lmn
        # normalization of a cartesian Gaussian
        self.norm = math.sqrt(
            (2 * alpha / math.pi) ** 1.5
            * (4 * alpha) ** (l + m + n)
            / (_df(2 * l - 1) * _df(2 * m - 1) * _df(2 * n - 1)))


def _df(n):
    return 1 if n <= 0 else n * _df(n - 2)


class Contracted:
    def __init__(self, prims, coefs):
        self.prims = prims
        self.coefs = coefs


def overlap_prim(a, b):
    A, B = a.center, b.center
    S = 1.0
    p = a.alpha + b.alpha
    for d in range(3):
        S *= E_coef(a.lmn[d], b.lmn[d], 0, A[d] - B[d], a.alpha, b.alpha)
    return S * (math.pi / p) ** 1.5


def kinetic_prim(a, b):
    l2, m2, n2 = b.lmn
    beta = b.alpha
    term0 = beta * (2 * (l2 + m2 + n2) + 3) * overlap_prim(a, b)
    term1 = -2 * beta ** 2 * sum(
        overlap_prim(a, Primitive(beta, _lift(b.lmn, d, 2), b.center)) /
        Primitive(beta, _lift(b.lmn, d, 2), b.center).norm * b.norm
        for d in range(3))
    # the lifted primitive normalization cancels; work with unnormalized shifts
    term1 = -2 * beta ** 2 * sum(_overlap_shift(a, b, d, 2) for d in range(3))
    term2 = -0.5 * sum(
        b.lmn[d] * (b.lmn[d] - 1) * _overlap_shift(a, b, d, -2)
        for d in range(3))
    return term0 + term1 + term2


def _lift(lmn, d, k):
    out = list(lmn)
    out[d] += k
    return tuple(out)


def _overlap_shift(a, b, d, k):
    if b.lmn[d] + k < 0:
        return 0.0
    shifted = Primitive(b.alpha, _lift(b.lmn, d, k), b.center)
    A, B = a.center, b.center
    p = a.alpha + b.alpha
    S = 1.0
    for dd in range(3):
        S *= E_coef(a.lmn[dd], shifted.lmn[dd], 0, A[dd] - B[dd],
                    a.alpha, b.alpha)
    return S * (math.pi / p) ** 1.5


def nuclear_prim(a, b, C):
    A, B = a.center, b.center
    p = a.alpha + b.alpha
    P = (a.alpha * A + b.alpha * B) / p
    PC = P - np.asarray(C, dtype=float)
    val = 0.0
    for t in range(a.lmn[0] + b.lmn[0] + 1):
        for u in range(a.lmn[1] + b.lmn[1] + 1):
            for v in range(a.lmn[2] + b.lmn[2] + 1):
                val += (E_coef(a.lmn[0], b.lmn[0], t, A[0] - B[0], a.alpha, b.alpha)
                        * E_coef(a.lmn[1], b.lmn[1], u, A[1] - B[1], a.alpha, b.alpha)
                        * E_coef(a.lmn[2], b.lmn[2], v, A[2] - B[2], a.alpha, b.alpha)
                        * hermite_coulomb(t, u, v, 0, p, PC))
    return 2 * math.pi / p * val


def dipole_prim(a, b, axis):
    A, B = a.center, b.center
    p = a.alpha + b.alpha
    P = (a.alpha * A + b.alpha * B) / p
    S = []
    for d in range(3):
        S.append(E_coef(a.lmn[d], b.lmn[d], 0, A[d] - B[d], a.alpha, b.alpha))
    D = (E_coef(a.lmn[axis], b.lmn[axis], 1, A[axis] - B[axis], a.alpha, b.alpha)
         + P[axis] * E_coef(a.lmn[axis], b.lmn[axis], 0, A[axis] - B[axis],
                            a.alpha, b.alpha))
    parts = [S[0], S[1], S[2]]
    parts[axis] = D
    return parts[0] * parts[1] * parts[2] * (math.pi / p) ** 1.5


def eri_prim(a, b, c, d):
    p = a.alpha + b.alpha
    q = c.alpha + d.alpha
    alpha = p * q / (p + q)
    A, B, C, D = a.center, b.center, c.center, d.center
    P = (a.alpha * A + b.alpha * B) / p
    Q = (c.alpha * C + d.alpha * D) / q
    PQ = P - Q
    val = 0.0
    l1, m1, n1 = (a.lmn[i] + b.lmn[i] for i in range(3))
    l2, m2, n2 = (c.lmn[i] + d.lmn[i] for i in range(3))
    E1x = [E_coef(a.lmn[0], b.lmn[0], t, A[0] - B[0], a.alpha, b.alpha) for t in range(l1 + 1)]
    E1y = [E_coef(a.lmn[1], b.lmn[1], u, A[1] - B[1], a.alpha, b.alpha) for u in range(m1 + 1)]
    E1z = [E_coef(a.lmn[2], b.lmn[2], v, A[2] - B[2], a.alpha, b.alpha) for v in range(n1 + 1)]
    E2x = [E_coef(c.lmn[0], d.lmn[0], t, C[0] - D[0], c.alpha, d.alpha) for t in range(l2 + 1)]
    E2y = [E_coef(c.lmn[1], d.lmn[1], u, C[1] - D[1], c.alpha, d.alpha) for u in range(m2 + 1)]
    E2z = [E_coef(c.lmn[2], d.lmn[2], v, C[2] - D[2], c.alpha, d.alpha) for v in range(n2 + 1)]
    for t in range(l1 + 1):
        for u in range(m1 + 1):
            for v in range(n1 + 1):
                for tt in range(l2 + 1):
                    for uu in range(m2 + 1):
                        for vv in range(n2 + 1):
                            val += (E1x[t] * E1y[u] * E1z[v]
                                    * E2x[tt] * E2y[uu] * E2z[vv]
                                    * (-1) ** (tt + uu + vv)
                                    * hermite_coulomb(t + tt, u + uu, v + vv,
                                                      0, alpha, PQ))
    return val * 2 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))


def build_basis(atoms):
    basis = []
    for sym, center in atoms:
        for shell, alphas, coefs in STO3G[sym]:
            if shell == "S":
                prims = [Primitive(al, (0, 0, 0), center) for al in alphas]
                basis.append(Contracted(prims, coefs))
            elif shell == "P":
                for lmn in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
                    prims = [Primitive(al, lmn, center) for al in alphas]
                    basis.append(Contracted(prims, coefs))
    return basis


def contract1(f, basis, *args):
    n = len(basis)
    M = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            v = 0.0
            for pa, ca in zip(basis[i].prims, basis[i].coefs):
                for pb, cb in zip(basis[j].prims, basis[j].coefs):
                    v += ca * cb * pa.norm * pb.norm * f(pa, pb, *args)
            M[i, j] = M[j, i] = v
    return M


def contract_eri(basis):
    n = len(basis)
    g = np.zeros((n, n, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    done = {}
    for (i, j) in pairs:
        for (k, l) in pairs:
            if (k, l) > (i, j):
                continue
            v = 0.0
            for pa, ca in zip(basis[i].prims, basis[i].coefs):
                for pb, cb in zip(basis[j].prims, basis[j].coefs):
                    for pc, cc in zip(basis[k].prims, basis[k].coefs):
                        for pd, cd in zip(basis[l].prims, basis[l].coefs):
                            v += (ca * cb * cc * cd
                                  * pa.norm * pb.norm * pc.norm * pd.norm
                                  * eri_prim(pa, pb, pc, pd))
            for (a, b) in ((i, j), (j, i)):
                for (c, d) in ((k, l), (l, k)):
                    g[a, b, c, d] = g[c, d, a, b] = v
    return g


def rhf(atoms, charge=0, max_iter=200, tol=1e-12):
    basis = build_basis(atoms)
    S = contract1(overlap_prim, basis)
    T = contract1(kinetic_prim, basis)
    V = np.zeros_like(S)
    for sym, center in atoms:
        V -= CHARGE[sym] * contract1(nuclear_prim, basis, center)
    hcore = T + V
    g = contract_eri(basis)
    n_elec = sum(CHARGE[s] for s, _ in atoms) - charge
    nocc = n_elec // 2
    e_nuc = 0.0
    for (s1, c1), (s2, c2) in itertools.combinations(atoms, 2):
        e_nuc += CHARGE[s1] * CHARGE[s2] / np.linalg.norm(
            np.asarray(c1, float) - np.asarray(c2, float))

    # core guess, plain SCF with light damping
    F = hcore.copy()
    C = None
    e_old = 0.0
    D_old = None
    for it in range(max_iter):
        e, C = eigh(F, S)
        Cocc = C[:, :nocc]
        D = 2 * Cocc @ Cocc.T
        if D_old is not None:
            D = 0.7 * D + 0.3 * D_old
        J = np.einsum("pqrs,rs->pq", g, D)
        K = np.einsum("prqs,rs->pq", g, D)
        F = hcore + J - 0.5 * K
        e_hf = 0.5 * np.einsum("pq,pq->", D, hcore + F) + e_nuc
        if abs(e_hf - e_old) < tol and it > 3:
            break
        e_old = e_hf
        D_old = D
    return basis, hcore, g, C, e_hf, e_nuc, n_elec


def mo_integrals(hcore, g, C):
    h_mo = C.T @ hcore @ C
    g_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", g, C, C, C, C, optimize=True)
    return h_mo, g_mo


def dipole_mo(atoms, basis, C, axis):
    ax = "xyz".index(axis)
    D_ao = contract1(dipole_prim, basis, ax)
    # electrons carry negative charge
    f = -C.T @ D_ao @ C
    d_nuc = sum(CHARGE[s] * np.asarray(c, float)[ax] for s, c in atoms)
    return f, d_nuc


def write_fcidump(path, h, g, e_core, n_elec, ms2, thresh=1e-14):
    n = h.shape[0]
    with open(path, "w") as fh:
        fh.write(f"&FCI NORB={n},NELEC={n_elec},MS2={ms2},\n")
        fh.write("  ORBSYM=" + "1," * n + "\n")
        fh.write("  ISYM=1,\n")
        fh.write("&END\n")
        for i in range(n):
            for j in range(i + 1):
                for k in range(i + 1):
                    lmax = j + 1 if k == i else k + 1
                    for l in range(lmax):
                        v = g[i, j, k, l]
                        if abs(v) > thresh:
                            fh.write(f"{v:23.16e} {i+1:3d} {j+1:3d} {k+1:3d} {l+1:3d}\n")
        for i in range(n):
            for j in range(i + 1):
                if abs(h[i, j]) > thresh:
                    fh.write(f"{h[i,j]:23.16e} {i+1:3d} {j+1:3d}   0   0\n")
        fh.write(f"{e_core:23.16e}   0   0   0   0\n")


def write_dipole(path, f, d_core, axis, thresh=1e-14):
    n = f.shape[0]
    with open(path, "w") as fh:
        fh.write(f"&DIP NORB={n},AXIS={axis.upper()},\n")
        fh.write("&END\n")
        for i in range(n):
            for j in range(i + 1):
                if abs(f[i, j]) > thresh:
                    fh.write(f"{f[i,j]:23.16e} {i+1:3d} {j+1:3d}   0   0\n")
        fh.write(f"{d_core:23.16e}   0   0   0   0\n")


# ---------------------------------------------------------------------------
# Dense determinant FCI (spin-orbital, JW bit convention: mode 2p=alpha(p)).

def fci_dense(h, g, e_core, n_elec, ms2, f=None, d_core=0.0):
    n_orb = h.shape[0]
    n_so = 2 * n_orb
    dets = []
    for bits in range(1 << n_so):
        if bin(bits).count("1") != n_elec:
            continue
        na = bin(bits & 0x5555555555555555).count("1")
        nb = bin(bits & 0xAAAAAAAAAAAAAAAA).count("1")
        if na - nb != ms2:
            continue
        dets.append(bits)
    idx = {d: i for i, d in enumerate(dets)}
    dim = len(dets)
    H = np.zeros((dim, dim))
    M = np.zeros((dim, dim))

    def apply_ann(bits, m):
        if not (bits >> m) & 1:
            return None
        sign = (-1) ** bin(bits & ((1 << m) - 1)).count("1")
        return bits & ~(1 << m), sign

    def apply_cre(bits, m):
        if (bits >> m) & 1:
            return None
        sign = (-1) ** bin(bits & ((1 << m) - 1)).count("1")
        return bits | (1 << m), sign

    for ci, det in enumerate(dets):
        H[ci, ci] += e_core
        M[ci, ci] += d_core
        # one-body
        for p in range(n_orb):
            for q in range(n_orb):
                for s in range(2):
                    r1 = apply_ann(det, 2 * q + s)
                    if r1 is None:
                        continue
                    b1, s1 = r1
                    r2 = apply_cre(b1, 2 * p + s)
                    if r2 is None:
                        continue
                    b2, s2 = r2
                    if b2 in idx:
                        H[idx[b2], ci] += h[p, q] * s1 * s2
                        if f is not None:
                            M[idx[b2], ci] += f[p, q] * s1 * s2
        # two-body, chemists (pq|rs): 1/2 sum a+_p a+_r a_s a_q
        for p in range(n_orb):
            for q in range(n_orb):
                for r in range(n_orb):
                    for s in range(n_orb):
                        v = g[p, q, r, s]
                        if abs(v) < 1e-14:
                            continue
                        for s1s in range(2):
                            for s2s in range(2):
                                r1 = apply_ann(det, 2 * q + s1s)
                                if r1 is None:
                                    continue
                                b1, sg1 = r1
                                r2 = apply_ann(b1, 2 * s + s2s)
                                if r2 is None:
                                    continue
                                b2, sg2 = r2
                                r3 = apply_cre(b2, 2 * r + s2s)
                                if r3 is None:
                                    continue
                                b3, sg3 = r3
                                r4 = apply_cre(b3, 2 * p + s1s)
                                if r4 is None:
                                    continue
                                b4, sg4 = r4
                                if b4 in idx:
                                    H[idx[b4], ci] += 0.5 * v * sg1 * sg2 * sg3 * sg4
    w, Y = np.linalg.eigh(H)
    e_fci = w[0]
    v0 = Y[:, 0]
    mu_fci = float(v0 @ M @ v0) if f is not None else None
    return e_fci, mu_fci


def hf_dipole(f, d_core, nocc):
    return d_core + 2 * sum(f[i, i] for i in range(nocc))


def emit(name, atoms, axis, outdir, refs, charge=0, run_fci=True):
    basis, hcore, g_ao, C, e_hf, e_nuc, n_elec = rhf(atoms, charge)
    h, g = mo_integrals(hcore, g_ao, C)
    f, d_nuc = dipole_mo(atoms, basis, C, axis)
    write_fcidump(os.path.join(outdir, f"{name}.fcidump"), h, g, e_nuc, n_elec, 0)
    write_dipole(os.path.join(outdir, f"{name}.dip"), f, d_nuc, axis)
    refs.append((name, "e_hf", e_hf))
    refs.append((name, "mu_hf", hf_dipole(f, d_nuc, n_elec // 2)))
    if run_fci:
        e_fci, mu_fci = fci_dense(h, g, e_nuc, n_elec, 0, f, d_nuc)
        refs.append((name, "e_fci", e_fci))
        refs.append((name, "mu_fci", mu_fci))
    print(f"{name}: E_HF={e_hf:.10f}  " +
          (f"E_FCI={e_fci:.10f}  mu_FCI={mu_fci:.10f}" if run_fci else ""))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="fixtures")
    ap.add_argument("--water", action="store_true",
                    help="also generate the water system (not bundled)")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    refs = []

    # H2 at the standard equilibrium bond length, oriented along z.
    r = 0.7414 * ANGSTROM_TO_BOHR
    emit("h2_sto3g", [("H", (0, 0, 0)), ("H", (0, 0, r))], "z", args.outdir, refs)

    # HeH+ is the 2-electron heteronuclear fixture (nonzero dipole).
    r = 0.7743 * ANGSTROM_TO_BOHR
    emit("hehp_sto3g", [("He", (0, 0, 0)), ("H", (0, 0, r))], "z", args.outdir,
         refs, charge=1)

    # Asymmetric H4 chain along x: unequal spacings break inversion symmetry
    # so the dipole moment is nonzero.
    xs = [0.0, 1.7, 3.7, 6.0]
    emit("h4_chain", [("H", (x, 0, 0)) for x in xs], "x", args.outdir, refs)

    if args.water:
        # HOH angle 104.5 deg, OH 0.96 A, in the xz-plane with the C2 axis
        # along x (the dipole axis).
        ang = math.radians(104.5 / 2)
        r = 0.96 * ANGSTROM_TO_BOHR
        atoms = [("O", (0, 0, 0)),
                 ("H", (r * math.cos(ang), 0, r * math.sin(ang))),
                 ("H", (r * math.cos(ang), 0, -r * math.sin(ang)))]
        emit("water_sto3g", atoms, "x", args.outdir, refs, run_fci=False)

    with open(os.path.join(args.outdir, "references.txt"), "w") as fh:
        fh.write("# fixture key value\n")
        for name, key, val in refs:
            fh.write(f"{name} {key} {val:.12f}\n")


if __name__ == "__main__":
    main()
