from __future__ import annotations


class DimensionError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, residual: float, rotations: int) -> None:
        super().__init__(
            f"Jacobi sweep did not converge after {rotations} rotations "
            f"(max off-diagonal {residual:.3e})"
        )
        self.residual = residual
        self.rotations = rotations


class NormViolationError(ValueError):
    def __init__(self, norm: float, index: int | None = None) -> None:
        where = f" at step {index}" if index is not None else ""
        super().__init__(f"Observation{where} has norm {norm:.12g} > 1")
        self.norm = norm
        self.index = index

    def at(self, index: int) -> NormViolationError:
        return NormViolationError(self.norm, index)
