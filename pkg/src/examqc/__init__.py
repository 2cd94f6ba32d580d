"""Exam quality-control pipeline.

Item calibration and misfit screening on response matrices, a text
scorer for examinee comments, and tree-ensemble flag models that
combine both, with a review service on top. See the README for the
store layout and the CLI for the stage-by-stage workflow.
"""

__version__ = "0.1.0"
