"""Exception types shared across the simulator."""


class SlegpError(Exception):
    """Base class for simulator errors."""


class ConfigurationError(SlegpError, ValueError):
    """A parameter set violates one of its constraints."""


class ContractViolation(SlegpError, ValueError):
    """An operation was called outside its precondition."""
