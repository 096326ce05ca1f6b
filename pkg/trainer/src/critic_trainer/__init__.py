"""Toy-scale critique model training and serving over the critic wire protocol."""

from .data import DataError, Example, Vocab, load_examples, render_input
from .model import BASE_MODELS, CritiqueModel, build_model
from .server import create_app, is_affirmative, serve
from .train import TrainerConfig, TrainResult, load_artifact, train

__version__ = "0.1.0"
