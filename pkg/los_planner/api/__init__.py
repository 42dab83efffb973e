"""API endpoints and handlers."""

from .endpoints import router

__all__ = ["router"]
