"""Smoke test for the qembed Python extension."""

import json
import math
import sys
from pathlib import Path

import qembed

DATA = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "data"


def check(cond, what):
    if not cond:
        print(f"FAIL {what}")
        sys.exit(1)
    print(f"ok   {what}")


def main():
    h2 = qembed.Molecule([("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.7414))])
    check(h2.n_electrons == 2, "H2 electron count")
    sys_h2 = qembed.System(h2)
    check(abs(sys_h2.rhf_energy + 1.1166843871) < 1e-8, "H2 RHF energy")
    ham = sys_h2.hamiltonian()
    check(ham.n_qubits == 4 and ham.term_count == 15, "H2 Hamiltonian shape")
    e = ham.ground_state_energy(2)
    check(abs(e - sys_h2.fci_energy()) < 1e-10, "H2 qubit ground state equals FCI")
    back = qembed.QubitHamiltonian.from_json(ham.to_json())
    check(back.terms == ham.terms, "JSON round trip")
    check(json.loads(ham.to_json())["n_qubits"] == 4, "JSON payload")

    water = qembed.Molecule.read_xyz(str(DATA / "h2o.xyz"))
    system = qembed.System(water)
    emb = system.embed([0, 1])
    check((emb.n_active_orbitals, emb.n_environment_orbitals) == (4, 1), "water OH partition")
    check(system.hamiltonian().n_qubits == 14 and emb.n_qubits == 12, "water qubits 14 -> 12")
    check(abs(emb.same_level_energy - system.rhf_energy) < 1e-8, "HF-in-HF reproduces RHF")
    fci = system.fci_energy()
    check(abs(emb.wf_energy - fci) < abs(system.rhf_energy - fci), "FCI-in-HF beats RHF")
    check(emb.hamiltonian.constant != 0.0 and math.isfinite(emb.e_cls), "embedded constant")

    lazy = system.embed([0, 1], projector="mu", solve=False)
    check(lazy.wf_energy is None, "solver skipped")

    stretched = water.with_bond_length(0, 1, 2.0)
    check(abs(stretched.bond_length(0, 1) * qembed.BOHR_IN_ANGSTROM - 2.0) < 1e-12, "bond stretch")

    for bad, exc in [(lambda: system.embed([9]), ValueError), (lambda: system.embed([0], projector="x"), ValueError)]:
        try:
            bad()
        except exc as err:
            check(True, f"rejects bad input ({err})")
        else:
            check(False, "rejects bad input")
    print("all smoke checks passed")


if __name__ == "__main__":
    main()
