"""
mixqmc - randomized quasi-Monte Carlo for mixture distributions.

Scrambled Sobol' nets, stratum allocation rules (including power-of-two
allocations), inefficiency and minimax analysis, and replicate-variance
experiments.
"""
__version__ = "1.0.0"
