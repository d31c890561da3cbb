"""Exact-arithmetic weight filtrations, cone actions, Deligne systems, and
log-point sheaf computations, with a JSON/CSV command line."""

__version__ = "0.1.0"
