"""Exception hierarchy. Each error carries the CLI exit code it maps to."""


class JetlogError(Exception):
    exit_code = 2


class BadFixture(JetlogError):
    exit_code = 2


class BudgetExceeded(JetlogError):
    exit_code = 3

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class StabilityViolation(JetlogError):
    exit_code = 4


class IncompleteTable(JetlogError):
    exit_code = 5

    def __init__(self, missing):
        self.missing = sorted(missing)
        shown = ", ".join(f"(e={e}, n={n})" for e, n in self.missing)
        super().__init__(f"jet-dimension table is missing {shown}")


class MissingStratum(JetlogError):
    exit_code = 6


class MissingCountPolynomial(JetlogError):
    exit_code = 7


class NonIntegerExponent(JetlogError):
    exit_code = 8


class NotMonomial(JetlogError):
    exit_code = 9


class UnsupportedShape(JetlogError):
    exit_code = 10


class NonPrincipalComponent(JetlogError):
    exit_code = 11


class DomainMismatch(JetlogError):
    exit_code = 12


class PrecisionTooLow(JetlogError):
    exit_code = 13


class UnboundedEnumeration(JetlogError):
    exit_code = 14
