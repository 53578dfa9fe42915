"""Numerical core: arithmetic, zeta evaluation, processes, oracles and statistics."""
