"""Exception types shared across the package."""


class HcbsolError(Exception):
    """Base class for all package errors."""


class ParamDomain(HcbsolError):
    """A parameter lies outside its admissible domain."""


class InvalidState(HcbsolError):
    """A lattice state violates a structural invariant."""


class NonFinite(HcbsolError):
    """A state component became inf or NaN during integration."""


class ConservationBreach(HcbsolError):
    """A conserved quantity drifted beyond its tolerance."""

    def __init__(self, quantity, drift, tolerance):
        self.quantity = quantity
        self.drift = drift
        self.tolerance = tolerance
        super().__init__(
            f"{quantity} drift {drift:.3e} exceeds tolerance {tolerance:.3e}"
        )


class HardCoreViolation(HcbsolError):
    """A constructed density leaves the [0, 1] band."""


class SeparationTooSmall(HcbsolError):
    """Soliton centers packed closer than the additive-superposition limit."""


class WindingMismatch(HcbsolError):
    """Total phase winding incompatible with periodic boundaries."""


class PeriodMismatch(HcbsolError):
    """No integer number of train periods fits the lattice within strain."""


class NonUniformInput(HcbsolError):
    """Phase imprinting requires a uniform-density state."""


class CalibrationFailure(HcbsolError):
    """Reconstructed phase jump cannot be matched to the closed form."""


class NoCollisionDetected(HcbsolError):
    """Stationarity metric never dipped below threshold."""


class TrackerLost(HcbsolError):
    """Extremum tracking became ambiguous."""


class NoOscillationDetected(HcbsolError):
    """Site density variance below the noise floor."""


class ConfigError(HcbsolError):
    """Configuration text failed validation; carries all issues found."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


class IoFailure(HcbsolError):
    """Reading or writing an artifact failed."""


class FormatViolation(HcbsolError):
    """An input file does not match the expected format."""
