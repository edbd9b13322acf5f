"""GNSS antenna phase center calibration from far-field range measurements."""

__version__ = "0.1.0"
