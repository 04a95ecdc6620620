"""Differentially private sketched block coordinate descent.

Library layout:

- :mod:`dpsketch.linalg` -- vectors, positive diagonals, weighted norms.
- :mod:`dpsketch.sampling` -- subset distributions and unbiased diagonal sketches.
- :mod:`dpsketch.erm` -- datasets, logistic/quadratic losses, regularity constants.
- :mod:`dpsketch.privacy` -- sensitivity, noise calibration, RDP accounting.
- :mod:`dpsketch.optimizer` -- the sketched noisy-gradient loop, schedules, bounds.
- :mod:`dpsketch.synth` -- synthetic problem generator with exact constants.
- :mod:`dpsketch.experiments` -- experiment configs, runners, CSV/JSON reports.
- :mod:`dpsketch.service` -- FastAPI app exposing the above.
- :mod:`dpsketch.cli` -- thin command-line client of the service.

The core API is re-exported here; the service and CLI are imported
explicitly by users who need them.
"""

from .erm import (
    Dataset,
    LipschitzMap,
    LogisticLoss,
    QuadraticLoss,
    lipschitz_map,
    make_loss,
    reference_optimum,
)
from .optimizer import (
    BoundQuery,
    RunResult,
    Schedule,
    default_step_sizes,
    importance_probabilities,
    schedule_convex,
    schedule_strongly_convex,
    sketch_second_moment,
    sketched_gd,
    utility_bound,
)
from .privacy import (
    NoiseScales,
    PrivacyBudget,
    audit_budget,
    calibrate_noise,
    compose_rdp,
    gaussian_rdp,
    mean_gradient_sensitivity,
    rdp_to_dp,
)
from .sampling import (
    BlockSampling,
    FullSampling,
    NiceSampling,
    SingletonSampling,
    inclusion_probabilities,
    sample_subset,
    sketch_apply,
)
from .synth import SyntheticSpec, gen_synthetic

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "LipschitzMap",
    "LogisticLoss",
    "QuadraticLoss",
    "lipschitz_map",
    "make_loss",
    "reference_optimum",
    "BoundQuery",
    "RunResult",
    "Schedule",
    "default_step_sizes",
    "importance_probabilities",
    "schedule_convex",
    "schedule_strongly_convex",
    "sketch_second_moment",
    "sketched_gd",
    "utility_bound",
    "NoiseScales",
    "PrivacyBudget",
    "audit_budget",
    "calibrate_noise",
    "compose_rdp",
    "gaussian_rdp",
    "mean_gradient_sensitivity",
    "rdp_to_dp",
    "BlockSampling",
    "FullSampling",
    "NiceSampling",
    "SingletonSampling",
    "inclusion_probabilities",
    "sample_subset",
    "sketch_apply",
    "SyntheticSpec",
    "gen_synthetic",
    "__version__",
]
