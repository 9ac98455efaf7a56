"""Exception types shared across the package.

Every error carries enough context (field, row, line number) to point at the
offending input without a debugger.
"""


class NvmCacheError(Exception):
    """Base class for all package errors."""


class ConfigError(NvmCacheError):
    """Invalid run configuration (bad paths, empty grids, unknown keys)."""


class MissingField(NvmCacheError):
    def __init__(self, field):
        self.field = field
        super().__init__(f"missing required field: {field}")


class NonPositiveValue(NvmCacheError):
    def __init__(self, field, value=None):
        self.field = field
        self.value = value
        msg = f"field must be strictly positive: {field}"
        if value is not None:
            msg += f" (got {value})"
        super().__init__(msg)


class UnknownMemoryKind(NvmCacheError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown memory kind: {name!r} (expected SRAM, STT_MRAM or SOT_MRAM)")


class InvalidFieldValue(NvmCacheError):
    def __init__(self, field, reason):
        self.field = field
        super().__init__(f"invalid value for {field}: {reason}")


class SchemaError(NvmCacheError):
    def __init__(self, row, column, reason=""):
        self.row = row
        self.column = column
        msg = f"bad profile record at row {row}, column {column!r}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class NegativeCount(NvmCacheError):
    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"count must be non-negative: {field} (got {value})")


class MalformedRecord(NvmCacheError):
    def __init__(self, line, text=""):
        self.line = line
        super().__init__(f"malformed trace record at line {line}: {text!r}")


class InfeasibleCapacity(NvmCacheError):
    """No cache organization exists for the requested capacity under the bounds."""


class InfeasibleOrganization(NvmCacheError):
    """Organization violates a structural constraint for the requested access."""


class CalibrationDiverged(NvmCacheError):
    def __init__(self, max_error, ceiling, residuals=None):
        self.max_error = max_error
        self.ceiling = ceiling
        self.residuals = residuals or []
        super().__init__(
            f"calibration error floor {max_error:.1%} exceeds ceiling {ceiling:.1%}"
        )


class CapacityMismatch(NvmCacheError):
    def __init__(self, cap_a, cap_b):
        super().__init__(
            f"iso-capacity comparison requires equal capacities ({cap_a} vs {cap_b} bytes)"
        )


class EmptyTrace(NvmCacheError):
    """Simulation requires at least one trace record."""


class NoBaseTraffic(NvmCacheError):
    """DRAM reduction is undefined when the baseline produced no DRAM traffic."""


class NoFeasibleCapacity(NvmCacheError):
    """Even the minimum capacity step exceeds the area budget."""
