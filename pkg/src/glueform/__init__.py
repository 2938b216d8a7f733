"""Exact De Rham forms and truncated cohomology of spaces generated by two plots."""

from pathlib import Path

from .diffeology import (
    Plot,
    PullbackChart,
    Retraction,
    SpacePresentation,
    SymmetryGenerators,
    falsify_by_sampling,
    horizontal_basis,
    is_horizontal,
    verify_factorization,
    verify_plot,
    verify_pullback_chart,
    verify_witness,
)
from .errors import GlueformError, InternalConsistencyError, ParseError, UsageError, VerificationError
from .exterior import DifferentialForm, ext_derivative, parse_form, pullback_form, wedge
from .linalg import LabeledMatrix, image_membership, mat_kernel_basis, mat_rank
from .mv import (
    GluedForm,
    GlueRejected,
    cohomology,
    cohomology_report,
    d_glued,
    delta,
    exactness_audit,
    glue,
    omega_basis,
    restrict,
)
from .presentation import format_presentation, load_presentation, parse_presentation
from .ratpoly import PolyMap, Polynomial, VarContext, parse_poly

__version__ = "0.1.0"

SPACES_DIR = Path(__file__).parent / "spaces"


def shipped_space(name: str) -> Path:
    """Path of a bundled presentation file, e.g. ``shipped_space("cross")``."""
    path = SPACES_DIR / f"{name}.space"
    if not path.exists():
        raise FileNotFoundError(path)
    return path
