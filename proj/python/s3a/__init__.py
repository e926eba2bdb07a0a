"""Subclass supervised sparse autoencoder: training, features, SVM and protocols."""

from ._s3a import *  # noqa: F401,F403
from ._s3a import S3AError

__all__ = [name for name in dir() if not name.startswith("_")]
