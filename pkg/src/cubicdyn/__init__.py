"""Real versus complex homology growth for quadratic birational maps fixing a cuspidal cubic."""

__version__ = "0.1.0"
