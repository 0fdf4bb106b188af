"""Domain error type shared across the package."""


class CoreScaleError(Exception):
    """Error with a short machine-parseable code.

    The CLI prints these as ``error: <code>: <message>`` and exits 1;
    anything else escaping to the CLI is a bug, not a domain error.
    """

    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}")
