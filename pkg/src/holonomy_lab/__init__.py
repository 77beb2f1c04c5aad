"""holonomy-lab: exact conformal-gauge computations on hyperbolic systems."""

__version__ = "0.1.0"
