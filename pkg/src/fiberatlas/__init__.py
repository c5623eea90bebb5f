"""fiberatlas: flat polygon families, surface gluings and fiber invariants."""

__version__ = "0.1.0"
