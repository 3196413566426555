"""topicforge: topic-aware sentiment features for daily stock price forecasting."""

__version__ = "0.1.0"
