"""
선형화 서비스
"""
from app.services.linearization.chain import (
    KIND_NO_PATH,
    KIND_PROPER,
    KIND_SAME_CLIQUE,
    BinarizedChain,
    ChainReduction,
    binarize_chain,
    binarize_exhaustive,
    chain_outcome,
    clique_factor_belief,
    reduce_to_chain,
    transition,
)

__all__ = [
    "KIND_NO_PATH",
    "KIND_PROPER",
    "KIND_SAME_CLIQUE",
    "BinarizedChain",
    "ChainReduction",
    "binarize_chain",
    "binarize_exhaustive",
    "chain_outcome",
    "clique_factor_belief",
    "reduce_to_chain",
    "transition",
]
