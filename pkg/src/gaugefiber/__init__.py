"""Tensor algebra and frame checks for the U(1), SU(2) and SU(3) gauge bundles."""

from .atlas import (
    Atlas,
    Chart,
    Frame,
    Group,
    MetricSample,
    TransitionMap,
    audit_atlas,
    check_cocycle,
    classify_group,
    orthonormalize,
    transition_matrix,
)
from .metrics import (
    HermitianMetric,
    SkewMetric,
    apply_skew_metric,
    concordance_residual_2d_alt,
    hermitian_pairing,
    is_concordant,
    is_orthonormal,
    raise_hermitian,
    skew_expand,
    skew_inverse,
)
from .tensor import (
    BlockType,
    Bundle,
    TensorField,
    Transition,
    TypeSignature,
    change_frame,
    contract,
    make_signature,
    tau,
    tensor_product,
)
from .typelang import (
    builtin_registry,
    bundle_signature,
    check_contraction,
    format_signature,
    parse_signature,
)

__version__ = "0.1.0"
