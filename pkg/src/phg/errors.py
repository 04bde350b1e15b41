"""Exception hierarchy shared by every phg module."""

from __future__ import annotations


class PhgError(Exception):
    """Base class for all errors raised by phg."""


class UsageError(PhgError):
    pass


class ShapeError(PhgError, ValueError):
    pass


class ParseError(PhgError, ValueError):
    """Malformed system/points document.

    ``line`` and ``column`` are 1-based when the location is known; ``path``
    is the JSON path of the offending value for semantic errors.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 path: str | None = None):
        self.line = line
        self.column = column
        self.path = path
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path is not None:
            where.append(f"at {path}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)


class DuplicateMonomial(PhgError, ValueError):
    def __init__(self, exponent, first: int, second: int):
        self.exponent = tuple(int(e) for e in exponent)
        self.first = first
        self.second = second
        super().__init__(f"support columns {first} and {second} are both {self.exponent}")


class EmptySupport(PhgError, ValueError):
    pass


class ZeroCoordinate(PhgError, ArithmeticError):
    def __init__(self, point: int, coordinate: int, sub_batch: int | None = None):
        self.point = point
        self.coordinate = coordinate
        self.sub_batch = sub_batch
        msg = f"point {point} has zero coordinate {coordinate}"
        if sub_batch is not None:
            msg += f" (sub-batch {sub_batch})"
        super().__init__(msg)


class MonomialOverflow(PhgError, ArithmeticError):
    def __init__(self, point: int, sub_batch: int | None = None):
        self.point = point
        self.sub_batch = sub_batch
        msg = f"monomial overflow at point {point}"
        if sub_batch is not None:
            msg += f" (sub-batch {sub_batch})"
        super().__init__(msg)


class RankDeficient(PhgError, ArithmeticError):
    """QR found a negligible diagonal entry ``R[column, column]``."""

    def __init__(self, column: int, index: int | None = None):
        self.column = column
        self.index = index
        msg = f"rank deficient at column {column}"
        if index is not None:
            msg = f"batch element {index}: " + msg
        super().__init__(msg)


class SingularJacobian(PhgError, ArithmeticError):
    def __init__(self, point: int | None = None, detail: str = ""):
        self.point = point
        msg = "singular Jacobian" if point is None else f"singular Jacobian at point {point}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class DegenerateTangent(PhgError, ArithmeticError):
    def __init__(self, point: int | None = None):
        self.point = point
        super().__init__("degenerate tangent" if point is None
                         else f"degenerate tangent at point {point}")


class StartPointInvalid(PhgError, ValueError):
    def __init__(self, point: int, residual: float, tol: float):
        self.point = point
        self.residual = residual
        super().__init__(f"start point {point} has residual {residual:.3e} > {tol:.1e}")
