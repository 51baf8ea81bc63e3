"""Signed Young subgroups of the infinite symmetric group: sampling,
classification, exact fixed-point and character formulas, and exhaustive
finite-lattice cross-checks."""

__version__ = "0.1.0"
