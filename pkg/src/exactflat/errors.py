"""Exception hierarchy shared by all modules."""


class ExactFlatError(Exception):
    """Base class for all structured errors raised by this package."""


class OrderMismatch(ExactFlatError):
    """Two cyclotomic numbers of different orders fed to a same-order operation."""


class NotDivisible(ExactFlatError):
    """embed_order(a, M) requires order(a) | M."""


class BadEmbedding(ExactFlatError):
    """embed(a, k, ...) requires gcd(k, order) = 1."""


class DegenerateField(ExactFlatError):
    """Realistic cyclotomic constructions need order q >= 3."""


class FieldJoinOverflow(ExactFlatError):
    """lcm of cyclotomic orders exceeded the configured cap."""


class InvalidSurface(ExactFlatError):
    """A translation surface failed validation; .defects holds the details."""

    def __init__(self, defects):
        self.defects = list(defects)
        super().__init__("; ".join(str(d) for d in self.defects))


class Disconnected(ExactFlatError):
    """Polygon gluing graph is not connected."""


class BadParameter(ExactFlatError):
    """Builder called with out-of-range parameters."""


class IrrationalPolygon(ExactFlatError):
    """Billiard unfolding group did not close up within the bound."""


class NonPositiveDeterminant(ExactFlatError):
    """Distortion matrices must have det > 0."""


class NonUnitDeterminant(ExactFlatError):
    """Operation requires an SL2 matrix (det = 1)."""


class NotAnAutomorphism(ExactFlatError):
    """A claimed affine automorphism failed its verification equations."""


class GenusZero(ExactFlatError):
    """Homology basis requested for a genus-zero surface."""


class PrimitiveSearchFailed(ExactFlatError):
    """No primitive element found for a trace field within the retry budget."""


class TooFewSlopes(ExactFlatError):
    """Cross-ratio field needs at least four distinct slopes."""


class CheckFailed(ExactFlatError):
    """An exact verification predicate failed; .witness carries the discrepancy."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class SingularA(ExactFlatError):
    """The a-period matrix is singular (must not happen for a symplectic basis)."""


class BlockDimensionUnexpected(ExactFlatError):
    """An eigenblock of the RM decomposition has the wrong dimension."""


class NotDiagonalCase(ExactFlatError):
    """Ahlfors derivative requested outside the exactly computable case i + j = 2k."""
