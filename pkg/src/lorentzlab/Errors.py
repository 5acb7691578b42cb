class LorentzError(Exception):
    """Base class for every error raised by lorentzlab."""


class StructuralError(LorentzError):
    """Malformed input: matrix shapes, negative τ, off-surface points, bad maps."""


class SchemaError(StructuralError):
    """A space document failed validation at the given JSON pointer."""

    def __init__(self, pointer: str, message: str) -> None:
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
        self.message = message


class PreconditionError(LorentzError):
    """An operation was called outside its precondition."""


class NoCurveError(PreconditionError):
    """No non-constant causal curve joins the requested points."""


class NotADagError(LorentzError):
    """The causal step relation has a cycle; carries the cycle as a witness."""

    def __init__(self, cycle: list[int]) -> None:
        super().__init__(f"not a DAG: causal cycle through {cycle}")
        self.cycle = cycle


class NotAdmissibleError(LorentzError):
    """Side lengths with c < a + b do not describe an admissible triangle."""


class InfeasibleTriangleError(LorentzError):
    """A comparison triangle could not be realized (size bounds held)."""


class NoCorrespondenceError(LorentzError):
    """Corresponding points only exist on timelike sides."""


class RegionRejectedError(LorentzError):
    """A region is not a comparison-neighbourhood candidate."""

    def __init__(self, pair: tuple[int, int], reason: str) -> None:
        super().__init__(f"region rejected at pair {pair}: {reason}")
        self.pair = pair
        self.reason = reason


class NotCheckableError(LorentzError):
    """Data needed for the check (atlas, basis, coordinates) is absent."""


class OracleError(LorentzError):
    """The geodesic-shooting oracle failed or disagreed with a closed form."""


class EmptySpaceError(StructuralError):
    """A builder produced a carrier without points."""
