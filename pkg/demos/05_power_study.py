"""A small Monte Carlo power study.

Each cell simulates N stationary series from a copula Markov chain with a
chosen margin and counts rejections at the 5% level.  Every family and
pmax is applied to the same simulated series, and each cell draws from its
own seed stream, so results do not depend on the worker count.

The full benchmark grid ships as a config file:

    mlcop power --config paper_tables_desk.cfg

It takes several minutes.  This demo runs a quick slice.
"""

from mlcop import PowerStudyConfig, run_power_study

config = PowerStudyConfig(
    models=["indep", "clayton:tau=0.1", "gaussian:tau=0.1", "fgm"],
    margins=["f2"],
    n_values=[250],
    replications=200,
    families=["spearman", "vdw", "savage"],
    pmax_values=[2, 5],
    seed=1,
)
table = run_power_study(config)

print(f"rejection rates (%) at n=250, N={config.replications}, Poisson(6) margin")
print(f"{'model':18s} {'pmax':>4s} {'Spearman':>9s} {'vdW':>7s} {'Savage':>7s}")
for model in config.models:
    for pmax in config.pmax_values:
        rates = [table.lookup(model.label, "f2", 250, fam, pmax).reject_pct for fam in ("spearman", "vdw", "savage")]
        print(f"{model.label:18s} {pmax:4d} {rates[0]:9.1f} {rates[1]:7.1f} {rates[2]:7.1f}")

print()
print("Independence stays near 5%; Savage leads under Clayton (lower-tail")
print("dependence); FGM is invisible to pairs and only pmax=5 detects it.")
