"""Risk-constrained utility maximization on finite scenario markets."""

__version__ = "0.1.0"
