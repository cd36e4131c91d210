"""Exception types shared across the package."""


class GqtspError(Exception):
    """Base class for package errors."""


class ResourceLimitError(GqtspError):
    """Requested allocation exceeds the configured simulator memory bound."""


class NoHamiltonianCycleError(GqtspError):
    """The instance admits no Hamiltonian cycle (or none was found)."""


class PoolExhaustedError(GqtspError):
    """A circuit builder needed more zeroed ancillas than the ledger holds."""


class VerificationError(GqtspError):
    """A cross-check against a classical oracle failed."""
