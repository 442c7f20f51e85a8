"""Probe the potential code distance of the shipped standard encoders.

For each weight w, the probe applies every weight-w Pauli error as a
p = 0.5 mixing channel to the encoded two-design and checks whether any
state pair loses trace distance.  The first failing weight is the
potential distance d*; for the shipped codes it coincides with the
claimed distance.

Run:  python demos/03_distance_probe.py
"""

from distqec import enumerate_pauli_errors, potential_distance, standard_encoder
from distqec.codes import num_errors

print(f"{'code':14s} {'n':>2s} {'k':>2s} {'claimed':>8s} {'d*':>3s}   per-weight max loss")
print("-" * 78)
for name in ("bit_flip_3", "approximate_4", "css_422", "perfect_5"):
    code = standard_encoder(name)
    d_star, per_weight = potential_distance(code, eps=0.0)
    detail = "  ".join(
        f"w={w}:{v:.2e}({num_errors(code.n, w)} errors)" for w, v in per_weight.items()
    )
    print(f"{name:14s} {code.n:2d} {code.k:2d} {code.claimed_distance:8d} {d_star:3d}   {detail}")

print("""
Reading the table: a weight passes while the worst-case loss stays at
numerical zero (< 1e-9).  bit_flip_3 already fails at weight 1 (phase
errors go undetected), the two four-qubit codes detect all single errors
but not all double ones, and the five-qubit code detects everything up to
weight 2 -- the smallest code that corrects an arbitrary single-qubit error.

The same probe accepts external circuits (ansatz JSON or OpenQASM 2.0)
through the CLI:  distqec distance --circuit my_encoder.qasm --k 1
""")
