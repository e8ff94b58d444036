"""Shared helpers: environment config, validation, image I/O."""
