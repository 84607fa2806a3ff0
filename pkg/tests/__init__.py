# tests package
# Unit tests for the library and CLI, plus acceptance checks against the public datasets.
