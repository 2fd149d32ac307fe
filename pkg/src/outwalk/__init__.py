"""Exact computation and simulation toolkit for the geometry of Out(F_N):
marked metric graphs, the Lipschitz metric via candidate loops, rational
geodesic currents, axes and strips of current pairs, and seeded random
walks on the group.
"""

from .errors import (
    ContractError,
    InputError,
    InternalError,
    ResourceError,
    ToolkitError,
)
from .freegroup import (
    Automorphism,
    Basis,
    ConjClass,
    Word,
    apply,
    apply_class,
    canonicalize,
    compose,
    cyclic_reduce,
    enumerate_conj_classes,
    format_automorphism,
    format_letters,
    identity_automorphism,
    invert,
    parse_automorphism,
    parse_letters,
)
from .outerspace import (
    CandidateSet,
    MarkedMetricGraph,
    MetricGraph,
    act,
    candidates,
    distance,
    exact_ratio,
    from_text,
    length_spectrum,
    lipschitz,
    lipschitz_witness,
    normalize,
    rose,
    sym_distance,
    to_text,
    translation_length,
    unit_rose,
)
from .currents import (
    PositivityReport,
    RationalCurrent,
    base_current,
    check_positive_pair,
    current_of_class,
    normalize_against,
    pair,
    projective_current_distance,
    stretch,
)
from .currents import act as act_current
from .axes import (
    AxisCertificate,
    CensusResult,
    ProbeSet,
    SandwichReport,
    THEOREM_SLACK,
    L_value,
    axis_membership,
    default_probes,
    l_value,
    pair_L_value,
    sandwich_check,
    sigma,
    strip_ball_census,
    strip_membership,
)
from .walk import (
    BilateralPath,
    CurrentTrack,
    DriftTrack,
    MeasureStats,
    SamplePath,
    SpectrumTrack,
    WalkMeasure,
    bilateral_path,
    current_track,
    default_class_window,
    dirac,
    drift_track,
    fibonacci_pair,
    measure_stats,
    sample_path,
    spectrum_track,
    strip_density_experiment,
    uniform_measure,
    walk_probes,
)
from .projection import ProjectionTrack, project, project_image, projection_track
from .records import ExperimentRecord, config_hash, write_csv, write_json

__version__ = "0.1.0"
