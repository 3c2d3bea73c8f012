"""Classify a handful of hand-written four-qubit states and print the reports.

Run with ``python demos/classify_examples.py``.
"""

from slocc4 import StateVector, classify4, extract_canonical

EXAMPLES = {
    "|0000> + |1111>": ["0000", "1111"],
    "|1000> + |0100> + |0010> + |0001>": ["1000", "0100", "0010", "0001"],
    "|0000> + |0111>": ["0000", "0111"],
    "|0000> + |0011> + |1100> + |1111>": ["0000", "0011", "1100", "1111"],
    "|0000> + |1100> + |1111>": ["0000", "1100", "1111"],
    "|0000> + |1101> + |1110>": ["0000", "1101", "1110"],
}


def main() -> None:
    for text, kets in EXAMPLES.items():
        s = StateVector.from_basis(kets)
        rep = classify4(s)
        line = f"{text:<36} {rep.structural.name:<14} {rep.family.display}"
        if rep.label.genuine:
            ps = rep.pencil_structure
            line += f"  [{len(ps.product_points)} product, {len(ps.zero_psi_points)} 0_kPsi, generic {ps.generic_class.value}"
            sub = extract_canonical(s, rep).subcase
            line += f", subcase {sub}]" if sub else "]"
        print(line)


if __name__ == "__main__":
    main()
