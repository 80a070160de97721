"""Shared exception types with a stable mapping onto CLI exit codes."""


class InputError(ValueError):
    """Malformed or out-of-contract input (CLI exit code 2, HTTP 400)."""


class CapExceeded(RuntimeError):
    """An enumeration would exceed its configured budget (CLI exit code 3, HTTP 413)."""
