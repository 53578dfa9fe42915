"""Experiment orchestration: sampling, limit-law and lemma experiments, reports."""
