"""Self-dual stacked CSS quantum LDPC codes.

Construction, parameter computation, distance estimation, code search,
and quantum-memory Monte Carlo simulation with a BP+OSD decoder.
"""

__version__ = "0.1.0"
