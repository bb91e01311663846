"""Sourceless lattice percolation toolkit: loop decompositions, exploration
processes, annulus-crossing fingerprints, loop-collection metrics, and the
critical Ising / current-trace couplings, with exact desk-scale checks."""

__version__ = "0.1.0"
