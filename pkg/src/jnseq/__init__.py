"""Exact verification toolkit for a constructive weak*-null sequence of
finitely supported signed measures on products of Stone-Cech compactifications."""

from jnseq.errors import DomainError, IntegrityError, ResourceLimitError, SpecError

__version__ = "0.1.0"

__all__ = ["DomainError", "IntegrityError", "ResourceLimitError", "SpecError", "__version__"]
