"""shiftpress: thermodynamic formalism on subshifts of finite type.

Pressure estimators and their transfer-operator oracle, ergodic-measure
spectra, gluing certificates, and the construction of compact invariant
subsystems with prescribed intermediate pressure.
"""

__version__ = "0.1.0"

from .core import (
    ShiftSystem,
    Resolution,
    count_words,
    enumerate_words,
    separated_set,
    digraph_diameter,
    load_system,
)
from .potentials import Potential, birkhoff_sum, variation, load_potential
from .segments import (
    SegmentClass,
    OrbitDecomposition,
    all_segments,
    empty_segments,
    trivial_decomposition,
    prefix_run_decomposition,
    affix_bounded,
    load_decomposition,
)
from .thermo import (
    PressureReport,
    partition_function,
    pressure_enumerate,
    pressure_oracle,
    pressure_floor,
    birkhoff_sup,
    birkhoff_sup_sequence,
    bowen_bound,
    expansivity_report,
)
from .measures import (
    MarkovMeasure,
    PeriodicOrbitMeasure,
    markov_entropy,
    measure_pressure,
    spectrum_sample,
)
from .gluing import GluingCertificate, check_gluing, glue_words, trace_times, is_traced
from .construct import (
    ConstructConfig,
    GluedSubshift,
    build_glued,
    select_words,
    check_structure_conditions,
    construct_intermediate,
    verify_counting_bound,
    density_experiment,
)

__all__ = [
    "ShiftSystem",
    "Resolution",
    "count_words",
    "enumerate_words",
    "separated_set",
    "digraph_diameter",
    "load_system",
    "Potential",
    "birkhoff_sum",
    "variation",
    "load_potential",
    "SegmentClass",
    "OrbitDecomposition",
    "all_segments",
    "empty_segments",
    "trivial_decomposition",
    "prefix_run_decomposition",
    "affix_bounded",
    "load_decomposition",
    "PressureReport",
    "partition_function",
    "pressure_enumerate",
    "pressure_oracle",
    "pressure_floor",
    "birkhoff_sup",
    "birkhoff_sup_sequence",
    "bowen_bound",
    "expansivity_report",
    "MarkovMeasure",
    "PeriodicOrbitMeasure",
    "markov_entropy",
    "measure_pressure",
    "spectrum_sample",
    "GluingCertificate",
    "check_gluing",
    "glue_words",
    "trace_times",
    "is_traced",
    "ConstructConfig",
    "GluedSubshift",
    "build_glued",
    "select_words",
    "check_structure_conditions",
    "construct_intermediate",
    "verify_counting_bound",
    "density_experiment",
]
