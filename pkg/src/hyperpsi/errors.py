"""Exception hierarchy shared by every module of the package."""


class HyperPsiError(Exception):
    """Base class for all numerical failures raised by :mod:`hyperpsi`."""


class DegenerateCurve(HyperPsiError):
    pass


class SheetAmbiguity(HyperPsiError):
    pass


class CutCrossing(HyperPsiError):
    pass


class NoConvergence(HyperPsiError):
    pass


class IllConditioned(HyperPsiError):
    pass


class RadiusCap(HyperPsiError):
    pass


class NearDivisor(HyperPsiError):
    """Raised when sigma is too close to zero for a log-derivative to be trusted."""


class InconsistentGamma(HyperPsiError):
    pass


class NoVanishingCharacteristic(HyperPsiError):
    pass


class PathNearBranch(HyperPsiError):
    pass


class DegeneratePoint(HyperPsiError):
    """Raised for curve points with y ~ 0 or sigma_2(u) ~ 0."""


class NearLattice(HyperPsiError):
    pass


class SingularFit(HyperPsiError):
    pass
