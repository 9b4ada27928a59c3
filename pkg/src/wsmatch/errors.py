"""Exception types shared across the package."""


class WsMatchError(Exception):
    """Base class for all wsmatch errors."""


class LexiconError(WsMatchError):
    """Problem loading or querying the lexical taxonomy."""


class EmptySetComparison(WsMatchError):
    """Hausdorff aggregation was asked to reduce an empty matrix."""


class WsdlError(WsMatchError):
    """WSDL document could not be parsed or resolved."""


class ExpressionError(WsMatchError):
    """Matching-expression text failed to parse or resolve.

    ``position`` is the 0-based character offset of the offending token,
    or None when the problem is not tied to a location.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class EvaluationError(WsMatchError):
    """Data-mapping expression could not be evaluated."""


class AnnotationError(WsMatchError):
    """Matching plan could not be written to or read from WSDL documents."""


class RegistryError(WsMatchError):
    """Service registry location could not be loaded."""


class SessionError(WsMatchError):
    """Matching-session failure (unknown id, wrong state, bad input)."""

    code = "session_error"


class SessionNotFound(SessionError):
    code = "not_found"


class WrongSessionState(SessionError):
    code = "wrong_state"
