"""HTTP service exposing the store and the computations."""

from .app import create_app

__all__ = ["create_app"]
