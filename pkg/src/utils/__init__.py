# src/utils package
# Logging configuration, JSON serialization helpers and atomic file output.
