"""focflow: a laboratory for fourth-order curvature flows."""

__version__ = "0.1.0"
