from .batchio import read_batch, read_scores, write_scores
from .checkpoint import load_checkpoint, make_tiny_checkpoint
from .scorer import AdapterConfig, PoolingWindow, adapt_score_batch, pooling_window

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "PoolingWindow",
    "adapt_score_batch",
    "load_checkpoint",
    "make_tiny_checkpoint",
    "pooling_window",
    "read_batch",
    "read_scores",
    "write_scores",
]
