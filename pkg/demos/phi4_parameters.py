"""Recover the continuous data of the one-parameter family from a disguised state.

A canonical state with chosen ``lambda`` is hidden behind a random local
operation; the extracted invariant matches the one of the original.
"""

from slocc4 import apply, canonical_state, classify4, extract_canonical, random_local_op


def main() -> None:
    lam = (0.7 + 0.2j, -1.3 + 0.5j)
    s = canonical_state("W[0_1Psi,0_1Psi]", params={"lambda": lam})
    ref = extract_canonical(s, classify4(s))
    print(f"input lambda ratio {lam[0] / lam[1]:.6f}")
    print(f"canonical state: subcase {ref.subcase}, invariant {ref.params['invariant']:.6f}")
    for seed in range(5):
        t = apply(random_local_op(4, 100, seed=seed), s)
        got = extract_canonical(t, classify4(t))
        print(f"disguised, seed {seed}: subcase {got.subcase}, invariant {got.params['invariant']:.6f}")


if __name__ == "__main__":
    main()
