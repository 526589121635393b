"""Exception hierarchy shared by all ramlab modules."""


class RamlabError(Exception):
    """Base class for all errors raised by this package."""


# --- graph construction / validation ---------------------------------------

class IrregularGraph(RamlabError):
    """A vertex does not have exactly d neighbors."""


class SelfLoop(RamlabError):
    """A vertex is adjacent to itself."""


class Asymmetric(RamlabError):
    """Adjacency is not symmetric (u lists v but v does not list u)."""


class Disconnected(RamlabError):
    """The graph is not connected."""


class NonSimple(RamlabError):
    """A constructor produced a parallel edge or loop."""


class BadParams(RamlabError):
    """Constructor parameters violate primality/congruence/size conditions."""


class SamplingExhausted(RamlabError):
    """Rejection sampling failed within the retry budget."""


class BaseHasSelfLoop(RamlabError):
    """Lift base graph contains a self-loop."""


class UnknownName(RamlabError):
    """Unrecognized named-graph identifier."""


class DegreeTooSmall(RamlabError):
    """Requested family has degree < 3."""


class ParseError(RamlabError):
    """Graph file is malformed; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvariantViolation(RamlabError):
    """Loaded or constructed graph fails a RegularGraph invariant."""


# --- walk engine ------------------------------------------------------------

class ParityOnNonBipartite(RamlabError):
    """Parity-restricted stationary measure requested on a non-bipartite graph."""


class SpaceMismatch(RamlabError):
    """Distribution lives on the wrong state space for the kernel."""


class SupportViolation(RamlabError):
    """Distribution puts mass outside the reference's support."""


class NotReached(RamlabError):
    """Mixing threshold was not crossed within the computed curve."""

    def __init__(self, t_max: int):
        super().__init__(f"threshold not reached by t_max={t_max}")
        self.t_max = t_max


# --- spectral lab -----------------------------------------------------------

class SizeCap(RamlabError):
    """A dense computation was requested above the configured size cap."""


class EigenbasisNotOrthonormal(RamlabError):
    """Supplied adjacency eigenbasis is not orthonormal."""


class VerificationFailed(RamlabError):
    """A decomposition residual exceeded tolerance; carries the component name."""

    def __init__(self, component: str, detail: str = ""):
        super().__init__(f"{component}: {detail}" if detail else component)
        self.component = component


class NotRamanujan(RamlabError):
    """Operation requires a certified Ramanujan graph."""


class GraphIsBipartite(RamlabError):
    """Operation requires a non-bipartite graph."""


# --- theory -----------------------------------------------------------------

class AlphaDegenerate(RamlabError):
    """Relative entropy undefined: alpha in {0,1} with beta != alpha."""


class POutOfRange(RamlabError):
    """L^p exponent outside the supported range."""


class LambdaOutOfRange(RamlabError):
    """Spectral bound parameter must satisfy 0 < lambda < d."""
