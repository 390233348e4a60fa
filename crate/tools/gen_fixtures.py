#!/usr/bin/env python3
"""Regenerate the bundled FCIDUMP fixtures (STO-6G, RHF/ROHF orbitals).

Requires pyscf. Run from the repository root:

    python3 tools/gen_fixtures.py

Outputs land in fixtures/. Orbital symmetry labels follow the Molpro
ordering written by pyscf (1..8), which is XOR-compatible after
subtracting one.
"""
import os

import numpy as np
from pyscf import ao2mo, gto, scf, symm
from pyscf.tools import fcidump

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def dump(name, mf, comment):
    mol = mf.mol
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.full(mol, c, compact=False).reshape([c.shape[1]] * 4)
    orbsym = symm.label_orb_symm(mol, mol.irrep_id, mol.symm_orb, c)
    orbsym = [symm.irrep_id2name(mol.groupname, i) for i in orbsym]
    molpro = [fcidump.ORBSYM_MAP[mol.groupname][mol.irrep_id[mol.irrep_name.index(l)]] for l in orbsym]
    path = os.path.join(OUT, name)
    fcidump.from_integrals(path, h1, eri, c.shape[1], mol.nelectron, mol.energy_nuc(),
                           ms=mol.spin, orbsym=molpro, tol=1e-12, float_format=" %.16e")
    print(f"{name}: E_HF={mf.e_tot:.10f} group={mol.groupname} orbsym={orbsym}  # {comment}")


def h_chain(n, r, name):
    atoms = [["H", (0.0, 0.0, i * r)] for i in range(n)]
    mol = gto.M(atom=atoms, basis="sto-6g", symmetry="D2h", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    dump(name, mf, f"linear H{n}, R(H-H) = {r} A")


def ch2(theta, group, name):
    r = 1.117
    half = np.radians(theta / 2.0)
    atoms = [
        ["C", (0.0, 0.0, 0.0)],
        ["H", (0.0, r * np.sin(half), r * np.cos(half))],
        ["H", (0.0, -r * np.sin(half), r * np.cos(half))],
    ]
    mol = gto.M(atom=atoms, basis="sto-6g", symmetry=group, verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    dump(name, mf, f"CH2, theta(HCH) = {theta} deg, R(C-H) = {r} A")


def beh2(theta, name):
    r1 = 1.310011
    r2 = r1 + 0.733008
    t = np.radians(theta)
    atoms = [
        ["Be", (0.0, 0.0, 0.0)],
        ["H", (0.0, 0.0, r1)],
        ["H", (0.0, r2 * np.sin(t), r2 * np.cos(t))],
    ]
    mol = gto.M(atom=atoms, basis="sto-6g", symmetry="Cs", verbose=0)
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    dump(name, mf, f"BeH2, theta(HBeH) = {theta} deg, R(Be-H) = {r1}/{r2} A")


def bo_series(distances):
    dm = None
    for d in distances:
        mol = gto.M(atom=[["B", (0, 0, 0)], ["O", (0, 0, d)]], basis="sto-6g",
                    symmetry="C2v", spin=1, verbose=0)
        mf = scf.ROHF(mol)
        mf.conv_tol = 1e-12
        mf.kernel(dm0=dm)
        dm = mf.make_rdm1()
        if d in (1.2, 2.1):
            dump(f"bo_{d:.1f}.fcidump", mf, f"BO, R(B-O) = {d} A, ROHF seeded along the curve")


def main():
    os.makedirs(OUT, exist_ok=True)
    h_chain(2, 0.74, "h2_0.74.fcidump")
    h_chain(4, 1.5, "h4_1.5.fcidump")
    h_chain(6, 2.0, "h6_2.0.fcidump")
    ch2(60, "C2v", "ch2_60.fcidump")
    ch2(180, "D2h", "ch2_180.fcidump")
    beh2(50, "beh2_50.fcidump")
    bo_series([1.2, 1.5, 1.8, 2.1])


if __name__ == "__main__":
    main()
