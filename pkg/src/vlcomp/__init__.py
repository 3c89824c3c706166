"""Two-cell indoor VLC network simulator.

Channel modeling (Lambertian LOS + diffuse bounce cascade), coordinated ZF
precoding with an amplitude-safe normalization, NOMA / C-NOMA power
allocation (optimal and low-complexity solvers with brute-force oracles),
baselines, user clustering and seeded Monte Carlo sweeps.
"""

__version__ = "0.1.0"
