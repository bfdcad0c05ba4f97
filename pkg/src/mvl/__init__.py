"""MVL: a mini verification language with a program/spec/test co-evolution engine."""

__version__ = "0.1.0"
