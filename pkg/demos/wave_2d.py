"""Standing acoustic wave in the unit-periodic square.

(p, u, v) tensor jets are advanced with Dual, Virtual and Central to t = 1
and the pressure error is printed for two refinements.  Upwind is not
defined for this system.
"""
from dataclasses import replace

from hermitewave import ExperimentConfig, converge

base = ExperimentConfig(equation="wave2d", K=(8, 16), C=0.9, T=1.0)
for scheme in ("dual", "virtual", "central"):
    for N in (1, 2):
        rep = converge(replace(base, scheme=scheme, N=N))
        print(f"{scheme:8s} N={N}  errors {rep.errors[0]:.2e} {rep.errors[1]:.2e}"
              f"  rate {rep.rates[0]:.2f}")
