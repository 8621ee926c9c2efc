"""Point-cloud guidance model: data pipeline, network, training, serving."""

from .data import EXPECTED_POINTS, GuidanceDataset, TrainingSample, load_dataset, sample_from_record
from .model import GuidanceNet
from .server import create_app, serve
from .train import TrainConfig, evaluate, load_checkpoint, train

__version__ = "0.1.0"
