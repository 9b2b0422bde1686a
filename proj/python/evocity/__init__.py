"""Python access to the evocity analyzers and project store."""

import json
import os

from . import _evocity
from ._evocity import SCHEMA_VERSION, EvocityError

__all__ = [
    "SCHEMA_VERSION",
    "EvocityError",
    "classify",
    "compute_metrics",
    "analyze_source",
    "analyze_json",
    "analyze_xml",
    "extract_sql",
    "parse_sql",
    "visual_mapping",
    "analyze",
    "list_projects",
    "load_scene",
    "load_scene_bytes",
    "load_document",
]


def _bytes(content):
    return content.encode() if isinstance(content, str) else bytes(content)


def classify(path, content=b""):
    return _evocity.classify(path, _bytes(content))


def compute_metrics(kind, path, content):
    return json.loads(_evocity.compute_metrics(kind, path, _bytes(content)))


def analyze_source(text):
    return json.loads(_evocity.analyze_source(text))


def analyze_json(text):
    return json.loads(_evocity.analyze_json(text))


def analyze_xml(text):
    return json.loads(_evocity.analyze_xml(text))


def extract_sql(text):
    return json.loads(_evocity.extract_sql(text))


def parse_sql(text, dialect="generic"):
    return json.loads(_evocity.parse_sql(text, dialect))


def visual_mapping(kind, metrics):
    return json.loads(_evocity.visual_mapping(kind, json.dumps(metrics)))


def analyze(source, data_dir, branch=None, db_type="generic", cache_dir=None, limit=None):
    """Analyze a repository and publish it under data_dir; returns the project record."""
    return json.loads(
        _evocity.analyze(
            str(source),
            os.fspath(data_dir),
            branch,
            db_type,
            None if cache_dir is None else os.fspath(cache_dir),
            limit,
        )
    )


def list_projects(data_dir):
    return json.loads(_evocity.list_projects(os.fspath(data_dir)))


def load_scene_bytes(data_dir, project, ordinal):
    return _evocity.load_scene(os.fspath(data_dir), project, ordinal).encode()


def load_scene(data_dir, project, ordinal):
    return json.loads(_evocity.load_scene(os.fspath(data_dir), project, ordinal))


def load_document(data_dir, project, name):
    return json.loads(_evocity.load_document(os.fspath(data_dir), project, name))
