"""Scale-resolved angle-of-attack increment statistics from wind time series."""

__version__ = "0.1.0"
