"""Show that genuine families depend on which qubit is taken as the pencil axis.

The classification reads a state as a pencil of three-qubit states indexed
by qubit 1.  Relabelings that keep qubit 1 in place leave the family alone;
relabelings that move it can change the family for some classes.
"""

import itertools

from slocc4 import GENUINE_CLASSES, canonical_state, classify4, permute_qubits


def main() -> None:
    for label in GENUINE_CLASSES:
        s = canonical_state(label, seed=1)
        fams = {}
        for perm in itertools.permutations(range(1, 5)):
            fam = classify4(permute_qubits(s, perm)).family.value
            fams.setdefault(fam, []).append("".join(map(str, perm)))
        mark = "" if len(fams) == 1 else "   <- axis dependent"
        print(f"{label.name:<20} {', '.join(f'{f} x{len(p)}' for f, p in fams.items())}{mark}")


if __name__ == "__main__":
    main()
