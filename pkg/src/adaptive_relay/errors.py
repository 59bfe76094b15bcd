"""Exception hierarchy shared by the coding, channel and bound modules."""


class AdaptiveRelayError(Exception):
    pass


class FieldError(AdaptiveRelayError, ValueError):
    pass


class CodeLengthError(FieldError):
    """Requested MDS code is longer than the field allows."""


class SingularSystemError(FieldError):
    pass


class DimensionError(FieldError):
    pass


class InsufficientSymbolsError(FieldError):
    pass


class DecodeInconsistencyError(FieldError):
    pass


class ParameterError(AdaptiveRelayError, ValueError):
    pass


class ZeroCapacityError(ParameterError):
    """N1 + N2 > T: no positive rate is achievable."""


class FieldTooSmallError(ParameterError):
    pass


class SequencingError(AdaptiveRelayError):
    """Packets were delivered out of slot order."""


class IncompleteHistoryError(AdaptiveRelayError):
    pass


class ChannelContractViolation(AdaptiveRelayError):
    """An erasure pattern exceeded the per-window erasure budget."""


class InternalFault(AdaptiveRelayError):
    """Encoder and decoder disagree; never expected under the channel contract."""


class DecodingFailure(AdaptiveRelayError):
    """Not enough surviving symbols to decode a message by its deadline."""

    def __init__(self, message, slot=None):
        super().__init__(message)
        self.slot = slot


class EnumerationTooLarge(AdaptiveRelayError):
    pass


class SearchTooLarge(AdaptiveRelayError):
    pass
