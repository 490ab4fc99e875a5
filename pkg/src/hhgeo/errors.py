"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HHGeoError(Exception):
    """Base class for all library errors."""


class DimensionError(HHGeoError, ValueError):
    pass


class AsymmetryError(HHGeoError, ValueError):
    def __init__(self, asymmetry: float, limit: float):
        self.asymmetry = asymmetry
        self.limit = limit
        super().__init__(
            f"matrix is not symmetric: max |a_ij - a_ji| = {asymmetry:.3e} "
            f"exceeds {limit:.3e}"
        )


class EigenDecompositionError(HHGeoError, ArithmeticError):
    def __init__(self, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )


class DomainError(HHGeoError, ValueError):
    def __init__(self, fn_id: str, eigenvalue: float, domain):
        self.fn_id = fn_id
        self.eigenvalue = eigenvalue
        self.domain = domain
        super().__init__(
            f"eigenvalue {eigenvalue!r} lies outside the domain {domain} of '{fn_id}'"
        )


class DefinitenessError(HHGeoError, ValueError):
    def __init__(self, operand: str, lambda_min: float, floor: float):
        self.operand = operand
        self.lambda_min = lambda_min
        self.floor = floor
        super().__init__(
            f"operand {operand} is not positive definite: lambda_min = "
            f"{lambda_min:.6e} (required > {floor:.3e})"
        )


class QuadratureError(HHGeoError, ArithmeticError):
    def __init__(self, estimate: float, abs_tol: float):
        self.estimate = estimate
        self.abs_tol = abs_tol
        super().__init__(
            f"quadrature refinement budget exhausted: error estimate "
            f"{estimate:.3e} > 10 * abs_tol ({abs_tol:.1e})"
        )


class MatrixFormatError(HHGeoError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class UnknownIdError(HHGeoError, LookupError):
    def __init__(self, kind: str, name: str, known):
        self.name = name
        self.known = sorted(known)
        super().__init__(
            f"unknown {kind} '{name}'; known: {', '.join(self.known)}"
        )

    # LookupError subclasses KeyError-style repr; keep the readable message
    def __str__(self) -> str:
        return self.args[0]


class ConfigurationError(HHGeoError, ValueError):
    pass


class GenerationError(HHGeoError, RuntimeError):
    pass


class TermEvaluationError(HHGeoError, RuntimeError):
    def __init__(self, term: str, cause: BaseException):
        self.term = term
        self.cause = cause
        super().__init__(f"failed to evaluate term '{term}': {cause}")
