"""mazehunt: deterministic maze scavenger-hunt simulator and probing tools."""

__version__ = "0.1.0"
