"""Exception hierarchy.

Every error raised for bad input or a violated precondition derives from
``FreeIsoError``; the CLI maps those to exit code 2.  ``CapExceeded`` and its
subclasses signal that a configurable search cap was hit (exit code 3) and may
carry the partial result computed so far.
"""

from __future__ import annotations

from typing import Any


class FreeIsoError(Exception):
    """Base class for all library errors."""

    code = "error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details

    def to_json(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in sorted(self.details.items())}
        return out


def _jsonable(v: Any) -> Any:
    if isinstance(v, (str, int, bool)) or v is None:
        return v
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        return [_jsonable(x) for x in v]
    return str(v)


# metric input
class InvalidMetric(FreeIsoError):
    code = "InvalidMetric"


class AsymmetricMatrix(InvalidMetric):
    code = "AsymmetricMatrix"


class NegativeDistance(InvalidMetric):
    code = "NegativeDistance"


class ZeroOffDiagonal(InvalidMetric):
    code = "ZeroOffDiagonal"


class TriangleViolation(InvalidMetric):
    code = "TriangleViolation"


class SamePoint(FreeIsoError):
    code = "SamePoint"


class UnknownLabel(FreeIsoError):
    code = "UnknownLabel"


class NotAMolecule(FreeIsoError):
    code = "NotAMolecule"


# graph layer
class OppositePairPresent(FreeIsoError):
    code = "OppositePairPresent"


class NotProperSubset(FreeIsoError):
    code = "NotProperSubset"


class GraphNot2Connected(FreeIsoError):
    code = "GraphNot2Connected"


class Not3Connected(FreeIsoError):
    code = "Not3Connected"


class NotConnected(FreeIsoError):
    code = "NotConnected"


class NotCyclePreserving(FreeIsoError):
    code = "NotCyclePreserving"


class NoConsistentVertexMap(FreeIsoError):
    code = "NoConsistentVertexMap"


class InvalidSigma(FreeIsoError):
    code = "InvalidSigma"


# isometry layer
class NotWeakPrague(FreeIsoError):
    code = "NotWeakPrague"


class ConditionsNotVerified(FreeIsoError):
    code = "ConditionsNotVerified"


class SupportOutsideVext(FreeIsoError):
    code = "SupportOutsideVext"


class SingleComponent(FreeIsoError):
    code = "SingleComponent"


# constructions
class InvalidP(FreeIsoError):
    code = "InvalidP"


class PreconditionViolated(FreeIsoError):
    code = "PreconditionViolated"


class InputFormatError(FreeIsoError):
    code = "InputFormatError"


# caps
class CapExceeded(FreeIsoError):
    """A search cap was hit.  ``partial`` holds whatever was found so far."""

    code = "CapExceeded"

    def __init__(self, message: str, partial: Any = None, **details: Any):
        super().__init__(message, **details)
        self.partial = partial


class CycleCapExceeded(CapExceeded):
    code = "CycleCapExceeded"


class IncompleteCycleList(CapExceeded):
    code = "IncompleteCycleList"


class SearchCapExceeded(CapExceeded):
    code = "SearchCapExceeded"
