"""Corpus ingestion, per-curve pipeline, report emission and command line."""

from .corpus import CorpusEntry, emit, ingest, read_reports
from .pipeline import CHECKS, VERDICTS, Config, CurveReport, LsResult, ls_scan, run_corpus, run_pipeline

__all__ = ["CHECKS", "VERDICTS", "Config", "CorpusEntry", "CurveReport", "LsResult", "emit", "ingest",
           "ls_scan", "read_reports", "run_corpus", "run_pipeline"]
