"""Exception hierarchy shared by every module of the package."""


class SymSepError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(SymSepError, ValueError):
    pass


class InvalidQuantumNumbers(SymSepError, ValueError):
    pass


class InvalidDegreeOrder(SymSepError, ValueError):
    pass


class IndexOutOfRange(SymSepError, IndexError):
    pass


class InvalidRank(SymSepError, ValueError):
    pass


class InvalidState(SymSepError, ValueError):
    """A vector or matrix violates the DickeVector / SymDensity invariants."""


class BlochOutOfBall(SymSepError, ValueError):
    pass


class OversizeEmbedding(SymSepError, ValueError):
    """Full 2**N tensor-space construction requested beyond the supported N."""


class QuadratureTooCoarse(SymSepError, RuntimeError):
    pass


class TooFewQubits(SymSepError, ValueError):
    pass


class InvalidCut(SymSepError, ValueError):
    pass


class SolverStall(SymSepError, RuntimeError):
    pass


class InternalInconsistency(SymSepError, RuntimeError):
    """A positive decomposition coexists with a firing entanglement witness.

    Mathematically impossible for a correct implementation, so this always
    signals a bug.
    """


class InvalidEnsemble(SymSepError, ValueError):
    pass


class UndefinedMeanDirection(SymSepError, ValueError):
    pass
