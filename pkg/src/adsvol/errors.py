"""Error taxonomy for the adsvol package.

Every failure mode that callers are expected to branch on gets its own class;
the CLI maps these onto process exit codes (see adsvol.cli).
"""


class AdsvolError(Exception):
    """Base class for all package-specific errors."""


class NullVectorError(AdsvolError):
    """A light-like vector was passed where a causal character is required
    (complex length, Minkowski angle)."""


class BoundaryPointError(AdsvolError):
    """A point operation hit the boundary locus where it is undefined:
    sheet sign 0 where a strict sheet is needed, x0 = 0 in the hyperboloid
    embedding, or an inversion applied on the null cone."""


class DegenerateFacetError(AdsvolError):
    """A facet has zero discriminant (light-cone tangent face) or is not a
    genuine quadric/plane; such half-spaces are outside the good class."""


class DecompositionRequiredError(AdsvolError):
    """The polytope (or a sheet portion of it) could not be certified bounded
    inside its declared box, so a direct volume computation would be
    meaningless without first decomposing it."""


class NullTangentError(AdsvolError):
    """A boundary polygon has a light-like side direction or tangent, so the
    angle at a vertex is undefined."""


class NonConvergenceError(AdsvolError):
    """An epsilon-regularized sequence failed to settle, pointing at an input
    whose volume does not exist in the regularized sense."""


class IllConditionedArcError(AdsvolError):
    """An arc endpoint sits (numerically) on a light-cone crossing, so the
    closed-form face volume is unreliable there."""


class BreakpointError(AdsvolError):
    """A slice was requested exactly at (or too close to) a structural
    breakpoint of the arrangement."""


class ConventionViolationError(AdsvolError):
    """An internal consistency check failed in a way that indicates the input
    violates the conventions rather than a numerical blow-up (e.g. boundary
    polygon angle sum with a non-vanishing imaginary residue)."""


class LiftConstructionError(AdsvolError):
    """Failed to build the auxiliary 3-dimensional polytope that a boundary
    region lifts to."""
