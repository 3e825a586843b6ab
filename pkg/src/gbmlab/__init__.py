"""Geometric block model lab.

Seeded generators for geometric block models (GBM) and random annulus
graphs (RAG), triangle-count community recovery, threshold solvers, a
space-efficient two-phase clustering mode over an edge-probe oracle, and
Monte-Carlo connectivity experiments.
"""

__version__ = "0.1.0"

SCHEMA = "gbm-lab/1"
