"""relaxpolar: construction, coding and complexity analysis of relaxed polar codes."""

from __future__ import annotations

__version__ = "0.1.0"
