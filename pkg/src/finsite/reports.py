"""Shared error types and the validation report record."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class FinsiteError(Exception):
    """Base class for all errors raised by this package."""


class InputError(FinsiteError):
    """Malformed or unresolvable input (bad file, unknown name, bad flag)."""


class ValidationError(FinsiteError):
    """Structurally well-formed input that violates a required invariant."""


class InternalCheckError(FinsiteError):
    """An internal consistency check failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class Report:
    """Outcome of a validator: ok, or the first violation found.

    kind is a short machine-readable tag; detail is human-readable; witness
    carries the offending identifiers so callers can point at the data.
    """

    ok: bool
    kind: str = "ok"
    detail: str = ""
    witness: tuple[Any, ...] = field(default=())

    @staticmethod
    def failure(kind: str, detail: str, witness: tuple[Any, ...] = ()) -> "Report":
        return Report(False, kind, detail, witness)

    @staticmethod
    def success(detail: str = "") -> "Report":
        return Report(True, detail=detail)

    def raise_if_failed(self) -> None:
        if not self.ok:
            raise ValidationError(f"{self.kind}: {self.detail}")

    def to_json(self) -> dict:
        from finsite.canon import cstr

        return {
            "ok": self.ok,
            "kind": self.kind,
            "detail": self.detail,
            "witness": [cstr(w) for w in self.witness],
        }
