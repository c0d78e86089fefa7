"""Ruin probabilities for fractional Brownian motion inspected at random jump times.

The package estimates the ruin probability of a drifted fractional Brownian
motion observed only at the partial-sum epochs of positive i.i.d. jumps, the
Pickands-type constants entering its large-threshold asymptotics, and the
closed-form asymptotic formulas themselves, with coupled Monte Carlo checks
tying the three together.
"""

from .errors import RuinLabError

__all__ = ["RuinLabError"]
__version__ = "0.1.0"
