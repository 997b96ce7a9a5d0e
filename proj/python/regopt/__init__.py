"""Optimal terminal wealth and hedging for a surplus-driven institution under
VaR or expected-shortfall regulation, with closed-form solvers and a
brute-force verification oracle."""

try:
    from ._regopt import *  # noqa: F401,F403  (wheel layout)
except ImportError:  # build-tree layout: extension next to the package
    from _regopt import *  # noqa: F401,F403
