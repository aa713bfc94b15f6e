"""Quiz-gated board games: engine, question bank, sessions, protocol, tools."""

from .boards import GameKind, SpeedMode

__version__ = "0.1.0"

__all__ = ["GameKind", "SpeedMode", "__version__"]
