"""Exception hierarchy shared by all modules."""


class QuantumGraphError(Exception):
    """Base class for every error raised by this package."""


# graph validation

class GraphValidationError(QuantumGraphError, ValueError):
    pass


class LoopEdge(GraphValidationError):
    pass


class Disconnected(GraphValidationError):
    pass


class NonpositiveLength(GraphValidationError):
    pass


class IsolatedVertex(GraphValidationError):
    pass


class UnknownVertex(QuantumGraphError, KeyError):
    pass


# potentials

class OutOfDomain(QuantumGraphError, ValueError):
    pass


class DerivativeOrderExceedsSmoothness(QuantumGraphError, ValueError):
    pass


class NonzeroMean(QuantumGraphError, ValueError):
    pass


class InsufficientSmoothness(QuantumGraphError, ValueError):
    pass


# edge solver / M-matrix

class IntegratorFailure(QuantumGraphError, RuntimeError):
    pass


class PoleError(QuantumGraphError, ArithmeticError):
    """Spectral parameter sits on a pole of a decoupled edge problem."""


class DirichletEigenvalue(PoleError):
    pass


class NeumannEigenvalue(PoleError):
    pass


# series

class NonUnitLeadingCoefficient(QuantumGraphError, ValueError):
    pass


class ZeroLeadingCoefficient(QuantumGraphError, ZeroDivisionError):
    pass


# spectrum

class GridTooCoarse(QuantumGraphError, RuntimeError):
    pass


class MeshTooCoarse(QuantumGraphError, ValueError):
    pass


class InsufficientEigenvalues(QuantumGraphError, ValueError):
    pass


# trace formulae / recovery

class OrderOutOfRange(QuantumGraphError, ValueError):
    pass


class KindMismatch(QuantumGraphError, ValueError):
    pass


class NoBracket(QuantumGraphError, ValueError):
    pass


# configuration

class ConfigError(QuantumGraphError, ValueError):
    pass
