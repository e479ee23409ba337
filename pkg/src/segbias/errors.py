class SegbiasError(Exception):
    """Base class for validation errors raised by this package."""


class CorpusError(SegbiasError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ReservedMarkerError(CorpusError):
    pass


class BenchmarkError(SegbiasError):
    """Carries every problem found while validating a benchmark."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ModelFormatError(SegbiasError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SegmentationError(SegbiasError):
    pass
