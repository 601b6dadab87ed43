"""Finite sites: bar realizations, sheafification, and integer homology.

Everything here is exact and deterministic: identifiers are opaque strings
(or tuples built from them), collections are kept in a canonical sort order,
and all linear algebra is over arbitrary-precision integers.
"""

from finsite.reports import InputError, InternalCheckError, Report, ValidationError

__all__ = [
    "InputError",
    "InternalCheckError",
    "Report",
    "ValidationError",
]

__version__ = "0.1.0"
