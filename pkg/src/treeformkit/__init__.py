"""Form-understanding annotations as trees: conversion, metrics and repair."""

from .annotation import BoundingBox, Entity, EntityLabel, FunsdDocument, parse_funsd, validate
from .aggregate import AggregatedTree, build_aggregated_tree
from .align import greedy_align, naa, normalized_levenshtein
from .errors import (
    ConfigError,
    EmptyCorpusError,
    EmptyTreeError,
    ParseError,
    SchemaError,
    TreeFormKitError,
)
from .metrics import score_document, tree_f1
from .treeform import ConversionConfig, NodeKind, TreeFormDoc, TreeFormNode, convert

__version__ = "0.1.0"
