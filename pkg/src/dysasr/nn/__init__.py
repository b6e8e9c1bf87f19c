from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import GradCheckReport, grad_check
from .layers import Conv1D, Dense, Geometry, Layer, Parallel
from .network import Network, layer_from_config, network_from_config
from .train import TrainConfig, TrainLog, sgd_train

__all__ = [
    "Conv1D",
    "Dense",
    "Geometry",
    "GradCheckReport",
    "Layer",
    "Network",
    "Parallel",
    "TrainConfig",
    "TrainLog",
    "grad_check",
    "layer_from_config",
    "load_checkpoint",
    "network_from_config",
    "save_checkpoint",
    "sgd_train",
]
