"""Noncommutative operator graphs, Naimark dilations and error models.

Finite-dimensional constructions of operator graphs from Kraus sets and
POVMs, the errors that generate them, Knill-Laflamme codes, and numerical
checks of the covariant and dynamical examples.
"""

from .core import (
    DEFAULT_TOL,
    DimensionError,
    OpGraphError,
    PreconditionError,
    Tolerances,
    classify_operator,
    herm_eig,
    hs_inner,
    orthonormalize_span,
    psd_power,
    residual_outside_span,
)
from .graphs import (
    KrausSet,
    OperatorGraph,
    graph_from_generators,
    graph_from_kraus,
    graph_from_povm,
    graphs_equal,
    operator_system_check,
)
from .naimark import NaimarkDilation, Povm, dilate, random_povm, subset_isometry, verify_proposition1
from .kl_codes import (
    AnticliqueCertificate,
    RecoveryChannel,
    correct_single_error,
    kl_recovery,
    search_anticlique,
    verify_anticlique,
)
from .report import Report

__version__ = "0.1.0"
