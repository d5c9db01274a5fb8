"""krlab: spectral verification toolkit for positive operators on cones."""

__version__ = "0.1.0"
