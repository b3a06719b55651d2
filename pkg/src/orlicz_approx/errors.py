"""Exception types shared across the package."""


class OrliczError(Exception):
    """Base class for all package errors."""


class BracketFailure(OrliczError):
    """A 1-d search could not bracket its target."""


class Unsupported(OrliczError):
    pass


class DegenerateWeight(OrliczError):
    pass


class IndiceOne(OrliczError):
    """The indice p(phi) equals one, so no dual exponent exists."""


class Saturated(OrliczError):
    """phi overflowed to the +inf sentinel at some grid node."""


class VariationBoundViolated(OrliczError):
    pass


class HypothesisViolated(OrliczError):
    """A context fails the hypotheses a check requires (W in A_p(phi), ...)."""


class YClassViolated(HypothesisViolated):
    pass


class BadOrder(OrliczError):
    pass


class ConfigError(OrliczError):
    pass


class NonConvergenceWarning(UserWarning):
    pass


class AliasRiskWarning(UserWarning):
    pass
