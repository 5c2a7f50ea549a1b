"""Exception taxonomy.

Every error carries a short machine-readable ``code`` so the CLI can emit
diagnostics that scripts can match on without parsing prose.
"""


class RobustEqError(Exception):
    code = "error"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class InfeasiblePointError(RobustEqError):
    code = "domain/infeasible-point"


class UnboundedDomainError(RobustEqError):
    code = "domain/unbounded"


class UnsupportedDomainError(RobustEqError):
    code = "domain/unsupported"


class UnsupportedPairError(RobustEqError):
    """No registered mirror map for this (regularizer, domain) pair."""

    code = "regularizer/unsupported-pair"


class SteepnessError(RobustEqError):
    """Subgradient of a steep kernel requested at a boundary point."""

    code = "regularizer/steepness"


class ConstructionError(RobustEqError):
    """Preconditions of a payoff-perturbation construction are violated."""

    code = "games/construction-inapplicable"


class ScheduleError(RobustEqError):
    """Sampling-radius schedule incompatible with the pivot radius."""

    code = "feedback/schedule"


class LPError(RobustEqError):
    code = "lp/error"


class LPInfeasibleError(LPError):
    code = "lp/infeasible"


class LPUnboundedError(LPError):
    code = "lp/unbounded"


class MissingReferenceError(RobustEqError):
    code = "analysis/missing-reference"


class ConfigError(RobustEqError):
    code = "config/invalid"

    def __init__(self, message, key=None, code=None):
        super().__init__(message, code=code)
        self.key = key

    def __str__(self):
        base = super().__str__()
        if self.key:
            return f"[{self.code}] {self.key}: {base}"
        return f"[{self.code}] {base}"
