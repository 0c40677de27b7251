"""Generative design pipeline for soft pneumatic network actuators."""

__version__ = "0.1.0"
