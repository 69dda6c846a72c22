"""The three limit laws, at demo scale.

Runs reduced-size versions of the central-limit, stable-scaling and
iterated-logarithm experiments and prints each statistic against its
closed-form reference law.  Plot-ready CSVs (empirical vs reference CDF
columns, histogram bins, running-sup series) land in ./plot_data.
"""

from pathlib import Path

import numpy as np

from fitwalk import ExperimentSpec, run_experiment
from fitwalk.analytic import half_normal_mean, stable_laplace
from fitwalk.cli import emit_plot_data

outdir = Path("plot_data")

# death surplus over sqrt(2qn): half-normal in the limit
clt = run_experiment(
    ExperimentSpec(kind="clt", p=0.6, n=100_000, replicas=400, quick=True)
)
scaled = clt.samples["normalized_delta"]
print("central limit: delta_n / sqrt(2qn) over", len(scaled), "replicas")
print(f"  sample mean {scaled.mean():.4f}  vs sqrt(2/pi) = {half_normal_mean(1.0):.4f}")
print(f"  KS distance {clt.reports[0].statistic:.4f} (p = {clt.reports[0].p_value:.3f})")

# total skeleton length of m walk excursions over m^2: one-sided stable(1/2)
stable = run_experiment(
    ExperimentSpec(kind="stable", m=300, replicas=500, cap=10**9, quick=True)
)
t_scaled = stable.samples["t_over_m2"]
print("\nstable scaling: T_m / m^2 over", len(t_scaled), "replicas")
print(f"  median {np.median(t_scaled):.3f}  (reference law median ~ 2.198)")
print(
    f"  empirical Laplace at 1: {np.mean(np.exp(-t_scaled)):.4f}"
    f"  vs exp(-sqrt(2)) = {stable_laplace(1.0, 1.0):.4f}"
)

# running sup of the death surplus against its iterated-logarithm envelope
lil = run_experiment(
    ExperimentSpec(kind="lil", p=0.6, n=2_000_000, replicas=8, quick=True)
)
sups = lil.samples["terminal_sup"]
print("\niterated-logarithm band: sup delta / sqrt(4qn ln ln n) per replica")
print(f"  replica sups: {np.round(sups, 3)}")
print(f"  median {np.median(sups):.3f} (order 1 expected; exact constant is asymptotic)")

for result in (clt, stable, lil):
    for path in emit_plot_data(result, outdir):
        print("wrote", path)
