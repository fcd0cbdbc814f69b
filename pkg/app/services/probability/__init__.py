"""
확률 엔진 서비스
"""
from app.services.probability.joint import (
    ConditionalFamily,
    JointDistribution,
    build_joint,
    conditional,
    corner_families,
    decode,
    encode,
    flatten_tensor,
    grid_families,
    joint_tensor_batch,
    marginal,
    marginal_tensor,
    mirror,
    mirror_closure,
    perturb_full_support,
    random_family,
    tensor_view,
)

__all__ = [
    "ConditionalFamily",
    "JointDistribution",
    "build_joint",
    "conditional",
    "corner_families",
    "decode",
    "encode",
    "flatten_tensor",
    "grid_families",
    "joint_tensor_batch",
    "marginal",
    "marginal_tensor",
    "mirror",
    "mirror_closure",
    "perturb_full_support",
    "random_family",
    "tensor_view",
]
