"""Exception hierarchy shared by all dilatic modules."""


class DilaticError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DilaticError):
    """Input violates a mathematical precondition (CLI exit code 2)."""


class NotHermitian(DomainError):
    def __init__(self, residual, index=None):
        self.residual = float(residual)
        self.index = index
        where = "" if index is None else f" (element {index})"
        super().__init__(f"matrix is not Hermitian{where}: max |M - M^H| = {self.residual:.3e}")


class NotPositive(DomainError):
    def __init__(self, min_eigenvalue, index=None):
        self.min_eigenvalue = float(min_eigenvalue)
        self.index = index
        where = "" if index is None else f" (element {index})"
        super().__init__(
            f"matrix is not positive semidefinite{where}: min eigenvalue = {self.min_eigenvalue:.3e}"
        )


class NotUnitary(DomainError):
    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"matrix is not unitary: max |U^H U - I| = {self.residual:.3e}")


class NotContraction(DomainError):
    def __init__(self, norm):
        self.norm = float(norm)
        super().__init__(f"operator norm {self.norm!r} exceeds 1")


class NotComplete(DomainError):
    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"POVM is not complete: completeness residual max |sum Pi - I| = {self.residual:.3e}")


class StageInfeasible(DomainError):
    def __init__(self, stage, value):
        self.stage = stage
        self.value = float(value)
        super().__init__(f"stage {stage}: stage contraction value {self.value:.12g} exceeds 1")


class KrausBoundViolated(DomainError):
    def __init__(self, max_eigenvalue):
        self.max_eigenvalue = float(max_eigenvalue)
        super().__init__(f"sum K^H K has eigenvalue {self.max_eigenvalue:.12g} > 1")


class DegenerateInput(DomainError):
    pass


class ZeroOutcome(DomainError):
    def __init__(self, norm):
        self.norm = float(norm)
        super().__init__(f"map annihilates the state: |K psi| = {self.norm:.3e}")


class DimensionMismatch(DomainError):
    pass


class NoConvergence(DilaticError):
    def __init__(self, sweeps, off_norm):
        self.sweeps = sweeps
        self.off_norm = float(off_norm)
        super().__init__(f"Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {self.off_norm:.3e})")
