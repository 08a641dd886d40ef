"""Linear-optical compilation of contractions and POVMs on single-photon qudits."""

__version__ = "0.1.0"

from .dilation import (  # noqa: E402
    ContractionMap,
    DilationResult,
    apply_dilation,
    build_g,
    dilate,
    extend_sigma,
    validate_contraction,
)
from .errors import *  # noqa: E402,F401,F403
from .interferometer import (  # noqa: E402
    OpticalCircuit,
    OpticalElement,
    beam_splitter,
    beam_splitter_bound,
    dilation_to_circuit,
    element_matrix,
    phase_shifter,
    recompose,
    reck_decompose,
)
from .linalg import (  # noqa: E402
    cholesky_psd,
    hermitian_eigen,
    operator_norm,
    pinv_diag,
    sqrt_psd,
    svd,
)
from .povm import (  # noqa: E402
    PovmCircuitBundle,
    PovmSpec,
    choose_v,
    compile_povm,
    compile_stage,
    detection_operators,
    outcome_blocks,
    validate_povm,
)
from .simulator import (  # noqa: E402
    DensityMatrix,
    MeasurementRecord,
    QuditState,
    apply_pure_map,
    apply_quantum_operation,
    dephase_and_mix,
    entanglement_filter,
    measure_povm,
    prepare_qudit,
    propagate,
)
