"""Grid refinement for the four 1D schemes on periodic advection.

A sine wave is carried ten periods around [-1, 1].  Each doubling of K
should cut the L2 error by about 2^(2N+1), so the printed rates sit near
2N+1.  The full table goes to convergence_1d.csv.
"""
from dataclasses import replace

from hermitewave import ExperimentConfig, converge
from hermitewave.harness import CONVERGENCE_HEADER, convergence_rows, write_csv

base = ExperimentConfig(equation="advection1d", K=(16, 32, 64), C=0.9, T=10.0)
reports = []
for scheme in ("dual", "virtual", "central", "upwind"):
    print(f"\n{scheme}")
    for N in (1, 2, 3):
        rep = converge(replace(base, scheme=scheme, N=N))
        reports.append(rep)
        errs = "  ".join(f"{e:.2e}" for e in rep.errors)
        rates = "  ".join(f"{r:5.2f}" for r in rep.rates)
        print(f"  N={N}  errors {errs}   rates {rates}   (expected ~{2 * N + 1})")

write_csv("convergence_1d.csv", CONVERGENCE_HEADER, convergence_rows(reports))
print("\nwrote convergence_1d.csv")
