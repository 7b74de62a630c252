"""emrQA toolkit: clinical reading-comprehension corpus tooling."""

__version__ = '0.1.0'
