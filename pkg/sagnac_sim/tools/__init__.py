from . import design, simulation

__all__ = [
    "design",
    "simulation",
]
