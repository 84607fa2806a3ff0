"""bankruptcy-forecast: from-scratch classifiers, projections and quality control for bankruptcy prediction."""

__version__ = "0.1.0"
