"""cflow: lift a C subset to a dataflow IR, parallelize, analyze, re-emit C."""

__version__ = "0.1.0"
