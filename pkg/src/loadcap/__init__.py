"""loadcap: optimal stress fields, stress concentration factors and load
capacity ratios of discretized supported bodies, via linear programming."""

__version__ = "0.1.0"
