"""Regenerate the bundled STO-3G H2 qubit Hamiltonians.

Needs pyscf (not a runtime dependency). Orbital integrals come from an RHF
calculation; the fermionic operator is mapped to qubits with the package's
own Jordan-Wigner ladder operators using the spin-blocked ordering

    qubit 0 = sigma_g up, 1 = sigma_u up, 2 = sigma_g down, 3 = sigma_u down

and decomposed on the Pauli basis. Each file is checked against pyscf FCI.

    python scripts/generate_h2_hamiltonians.py [--out src/symcheck/data]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, scf

from symcheck.pauli import (
    Hamiltonian,
    HamiltonianTerm,
    dump_hamiltonian,
    jw_ladder,
    pauli_decompose,
)

BOND_LENGTHS = (0.5, 0.7414, 1.0, 1.5, 2.0)
N_QUBITS = 4


def spin_orbital(spatial: int, spin: int) -> int:
    return 2 * spin + spatial


def qubit_hamiltonian(bond: float) -> tuple[Hamiltonian, float]:
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {bond}", basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), 2)  # chemist (pq|rs)
    e_nuc = mol.energy_nuc()

    a = [jw_ladder(p, False, N_QUBITS).matrix() for p in range(N_QUBITS)]
    ad = [jw_ladder(p, True, N_QUBITS).matrix() for p in range(N_QUBITS)]
    dim = 2**N_QUBITS
    h = e_nuc * np.eye(dim, dtype=complex)
    so = [(i, s) for s in (0, 1) for i in (0, 1)]
    for p, (ip, sp) in enumerate(so):
        for q, (iq, sq) in enumerate(so):
            if sp == sq:
                h += h1[ip, iq] * ad[p] @ a[q]
    # 1/2 sum (pr|qs) a+_p a+_q a_s a_r over spin-allowed index sets
    for p, (ip, sp) in enumerate(so):
        for q, (iq, sq) in enumerate(so):
            for r, (ir, sr) in enumerate(so):
                for s, (is_, ss) in enumerate(so):
                    if sp != sr or sq != ss:
                        continue
                    v = eri[ip, ir, iq, is_]
                    if v != 0.0:
                        h += 0.5 * v * ad[p] @ ad[q] @ a[s] @ a[r]

    coeffs = pauli_decompose(h, N_QUBITS)
    identity = 0.0
    terms = []
    for string, g in coeffs.items():
        if string.is_identity:
            identity = g
        else:
            terms.append(HamiltonianTerm(g, string))
    order = {"Z": 0, "ZZ": 1}
    terms.sort(key=lambda t: (order.get("".join(a for a in t.string.axes if a != "I"), 2),
                              t.string.support, t.string.axes))
    ham = Hamiltonian(N_QUBITS, tuple(terms), identity, bond, f"H2 STO-3G R={bond} A")

    e_fci = fci.FCI(mf).kernel()[0]
    return ham, e_fci


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).parents[1] / "src/symcheck/data")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for bond in BOND_LENGTHS:
        ham, e_fci = qubit_hamiltonian(bond)
        e_sector = ham.ground_energy(sector=(1, 1))
        assert abs(e_sector - e_fci) < 1e-9, (bond, e_sector, e_fci)
        path = args.out / f"h2_{bond}.json"
        path.write_text(dump_hamiltonian(ham), encoding="utf-8")
        print(f"{path.name}: {len(ham.terms)} terms, E_fci = {e_fci:.10f}, "
              f"global min = {ham.spectrum()[0]:.10f}")


if __name__ == "__main__":
    main()
