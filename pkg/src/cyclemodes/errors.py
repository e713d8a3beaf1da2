"""Exception types shared across the package."""


class CycleModesError(Exception):
    """Base class for all library-specific errors."""


class PanelFormatError(CycleModesError, ValueError):
    """An input file or panel violates the data contract."""


class DegenerateSeriesError(CycleModesError, ValueError):
    """A series has zero variance and cannot be normalized."""


class NumericalError(CycleModesError, RuntimeError):
    """A numerical kernel failed to produce a reliable result."""


class PhaseUndefinedError(NumericalError):
    """A phase was requested for a vanishing complex amplitude."""


class SimulationDegenerateError(CycleModesError, RuntimeError):
    """A Monte-Carlo run accepted no trials."""
