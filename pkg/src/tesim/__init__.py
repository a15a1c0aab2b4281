"""Traffic-engineering simulator.

Composes path-selection algorithms (k-shortest paths, all simple paths,
oblivious routing trees) with rate-adaptation objectives (load balance,
piecewise-linear average delay) into complete TE systems and simulates
them on capacitated topologies under time-varying demand.
"""

__version__ = "0.1.0"
