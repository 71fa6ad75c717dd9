"""
How outlier signals and the number of signals affect recovery
==============================================================

A desk-scale Monte-Carlo sweep over M/N and the outlier fraction. The same
sweep is available from the command line as ``graphlearn experiment``.
"""

from graphlearn.experiment import ExperimentConfig, run_experiment, summarize

cfg = ExperimentConfig(sweep_m=(1, 4, 8), outlier_fractions=(0.1, 0.25), n_monte_carlo=10, seed=0)
summary = summarize(run_experiment(cfg), cfg)

print(" M/N  outliers   NMSE     F     mean w (smooth / outlier)")
for cell in summary["cells"]:
    split = cell["w_split"]
    print(f"{cell['m_over_n']:4g}  {cell['outlier_fraction']:8.2f}  {cell['nmse_mean']:.3f}  "
          f"{cell['f_mean']:.3f}  {split['smooth']['mean']:+.4f} / {split['outlier']['mean']:+.4f}")

# more signals lower the NMSE; outlier coefficients stay below smooth ones
