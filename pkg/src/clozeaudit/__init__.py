"""Corpus contamination auditing and narrative-cloze evaluation toolkit."""

__version__ = "0.1.0"

from .kernels import BACKEND, have_extension  # noqa: F401
