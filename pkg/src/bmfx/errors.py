"""Exception hierarchy shared by all bmfx modules."""


class BmfxError(Exception):
    """Base class for every error raised by bmfx."""


class CycleDetected(BmfxError):
    pass


class UnknownCell(BmfxError):
    pass


class DanglingReference(BmfxError):
    pass


class InterfaceMismatch(BmfxError):
    pass


class ArityMismatch(BmfxError):
    pass


class TooManyInputs(BmfxError):
    pass


class DimensionMismatch(BmfxError):
    pass


class Infeasible(BmfxError):
    pass


class Unpartitionable(BmfxError):
    pass


class TooLarge(BmfxError):
    pass


class DegreeUnderflow(BmfxError):
    pass


class NoCandidates(BmfxError):
    pass


class ConfigError(BmfxError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class BlifError(BmfxError):
    """Base for BLIF parse failures; carries the 1-based source line."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BlifSyntaxError(BlifError):
    pass


class UndefinedSignal(BlifError):
    pass


class MultipleDrivers(BlifError):
    pass


class UnsupportedConstruct(BlifError):
    pass
