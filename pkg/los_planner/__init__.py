"""LoS coverage engine and UAV placement planner for directional THz networks."""

__version__ = "0.1.0"
