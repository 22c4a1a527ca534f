"""LSTM-with-attention aggression classifier, feature baseline and scorer."""

__version__ = "0.1.0"
