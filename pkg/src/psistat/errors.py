"""Exception hierarchy.

Every error carries a module-qualified ``code`` (``"<module>.<ClassName>"``)
and the process exit status the command line front end should use for it.
"""


class PsiStatError(Exception):
    """Base class for all package errors."""

    module = "psistat"
    exit_code = 4

    @property
    def code(self) -> str:
        return f"{self.module}.{type(self).__name__}"


class InputError(PsiStatError, ValueError):
    """Bad arguments or input data (precondition violations)."""

    exit_code = 3


class NumericalError(PsiStatError, ArithmeticError):
    """A computation could not produce a trustworthy result."""

    exit_code = 4


class ConfigError(PsiStatError, ValueError):
    exit_code = 2
