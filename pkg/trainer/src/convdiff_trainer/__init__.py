"""Toy-scale neural restorer for the convdiff inference loop.

Trains a small beta-conditioned U-Net on tensor-file triples produced by
``convdiff gen-data`` and serves it behind the external-restorer
subprocess contract (``--input/--beta/--output``). It talks to the
restoration package only through those file formats.
"""

from .model import RestorerUNet, strength_embedding
from .tensorfile import MAGIC, read_tensor, write_tensor
from .training import TrainerConfig, Triple, load_model, load_triples, train

__all__ = [
    "RestorerUNet",
    "strength_embedding",
    "MAGIC",
    "read_tensor",
    "write_tensor",
    "TrainerConfig",
    "Triple",
    "load_model",
    "load_triples",
    "train",
]
