"""Exception types shared across the package."""


class DiskratError(Exception):
    """Base class for all library-specific errors."""


class PointNotInDisk(DiskratError):
    """A point required to lie strictly inside the unit disk does not."""


class NonFiniteIntegrand(DiskratError):
    """An integrand produced a non-finite value at a quadrature node."""

    def __init__(self, node_index, value):
        super().__init__(
            f"integrand is non-finite at node index {node_index}: {value!r}"
        )
        self.node_index = node_index
        self.value = value


class RadiusEscapesDisk(DiskratError):
    """A sampling circle for derivative extraction leaves the unit disk."""


class AccuracyNotReached(DiskratError):
    """Adaptive node doubling hit its cap before successive results agreed."""


class IndexOutOfRange(DiskratError):
    """A basis or coefficient index exceeds what the object holds."""


class CountOutOfRange(DiskratError):
    """A requested term count exceeds the stored coefficient count."""


class TrailingPolesMismatch(DiskratError):
    """The trailing block of the pole sequence does not equal the kernel point."""


class OrderTooSmall(DiskratError):
    """The approximation order n is smaller than the kernel weight alpha."""


class IllConditioned(DiskratError):
    """The discrete least-squares problem is rank deficient or near-singular."""

    def __init__(self, condition):
        super().__init__(
            f"design matrix is rank deficient or near-singular "
            f"(condition estimate {condition:.6g})"
        )
        self.condition = condition
