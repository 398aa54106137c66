"""Desk-scale tour of the bundled benchmark problems.

Runs the categorical cosine problem with its full 98-point design (a
couple of minutes), prints the fitted level-correlation matrix of the
13-level variable, then the cantilever beam at small scale, and the
DRAGON design-space audit.
"""

import numpy as np

from mixedgp import (
    FitConfig,
    dragon_space_audit,
    run_cantilever_benchmark,
    run_cosine_benchmark,
)

np.set_printoptions(precision=2, suppress=True, linewidth=150)

print("=== categorical cosine, 98-point LHS ===")
results, corr, errors = run_cosine_benchmark(
    ["gd", "ehh"], doe_size=98, seed=0, fit_config=FitConfig(max_evals=5000)
)
for r in results:
    print(f"{r.kind.value:>3}: {r.n_hyper:3d} hyperparameters, "
          f"RMSE {r.rmse:7.4f}, PVA {r.pva:6.2f}, fit {r.fit_seconds:5.1f}s")

print("\nfitted EHH correlations among the 13 cosine levels:")
ehh_corr = corr[results[-1].kind]
print(ehh_corr)
group1 = ehh_corr[:9, :9][~np.eye(9, dtype=bool)]
between = ehh_corr[:9, 9:]
print(f"\nlevels 1-9 come out strongly correlated (mean {group1.mean():.2f},")
print("adjacent levels most similar, matching the phase-shift structure);")
print(f"between-group entries are driven to ~0 (mean {between.mean():.1e}).")
print("The true between-group correlation is negative, which the exponential")
print("family floors at eps; modeling it is the HH kernel's niche.")

print("\n=== cantilever beam, 60-point LHS ===")
results, _, _ = run_cantilever_benchmark(
    ["gd", "ehh"], doe_size=60, seed=0,
    fit_config=FitConfig(n_starts=4, max_evals=2500), grid_points=(15, 15),
)
for r in results:
    print(f"{r.kind.value:>3}: RMSE {r.rmse * 100:7.4f} cm, "
          f"log-likelihood {r.log_likelihood:8.2f}")

print("\n=== DRAGON aircraft design-space audit ===")
report = dragon_space_audit()
print("relaxed dimension:", report["relaxed_total"])
print("hyperparameter counts:", report["hyperparameters"])
