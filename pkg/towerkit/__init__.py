"""towerkit: finite 2-complexes, group actions, covers and equivariant tower lifting."""

__version__ = "0.1.0"

from .runner import DefaultRunner, run  # noqa: E402

__all__ = ["DefaultRunner", "run", "__version__"]
