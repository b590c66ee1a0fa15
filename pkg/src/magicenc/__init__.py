"""Surface-code magic state encoding simulator.

Two-phase post-selected encoding of a magic state into a planar surface
code: a small distance-d1 patch checks itself for two rounds and is
discarded on any syndrome, then grows to distance d2 and is decoded with
exact minimum-weight perfect matching.  The package provides the exact
first-order fault oracle, CNOT-schedule search, and a high-throughput
Monte Carlo harness.
"""

__version__ = "0.1.0"
